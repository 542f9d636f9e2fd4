import math

import numpy as np
import pytest

from strideqcnn import qae
from strideqcnn.encoding import ImageTensor, KernelWeights, angle_of
from strideqcnn.layers import (
    ConvConfig,
    FcWeights,
    FeatureMap,
    PoolConfig,
    build_conv_prep,
    build_fc_prep,
    build_pool_prep,
    classify,
    coherent_conv_state,
    conv_layer,
    conv_layout,
    conv_qae_result,
    decode_feature,
    fc_layer,
    fc_layout,
    feature_decode_circuit,
    pool_layer,
    pool_layout,
    pool_qae_result,
    truncated_decode,
)
from strideqcnn.reference import conv2d_ref, fc_probabilities, fc_ref, pool_ref
from strideqcnn.statevector import RegisterLayout, init_state


def quantized(values, bits):
    """Loader-visible values: cos of the truncated arccos angles."""
    values = np.asarray(values, dtype=float)
    out = np.empty_like(values)
    flat_in, flat_out = values.ravel(), out.ravel()
    for i, v in enumerate(flat_in):
        flat_out[i] = math.cos(angle_of(float(v), bits).reconstruct())
    return out


def random_instance(rng, m=4, n=2):
    image = ImageTensor(rng.integers(1, 256, size=(m, m))).normalized()
    kernel = KernelWeights(rng.uniform(-1, 1, size=(n, n))).normalized()
    return image, kernel


# -- configuration validation -------------------------------------------------


def test_conv_config_divisibility():
    with pytest.raises(ValueError, match="not divisible"):
        ConvConfig(m=5, n=2, stride=2)
    assert ConvConfig(m=4, n=2, stride=2).out_side == 2
    assert ConvConfig(m=4, n=2, stride=1).out_side == 3


def test_pool_config_divisibility():
    with pytest.raises(ValueError, match="not divisible"):
        PoolConfig(in_side=3, window=2, stride=2)
    assert PoolConfig(in_side=3, window=2, stride=1).out_side == 2


# -- feature decode -------------------------------------------------------------


def test_decode_feature_examples():
    assert decode_feature(0.5, 2) == pytest.approx(4.0)
    assert decode_feature(0.25, 1) == pytest.approx(0.0)


def test_decode_identity_with_conv_formula():
    rng = np.random.default_rng(0)
    for _ in range(50):
        n = int(rng.integers(1, 4))
        inner = float(rng.uniform(-n * n, n * n))
        sinsq = (n * n + inner) / (2 * n * n)
        theta_tilde = math.asin(math.sqrt(sinsq)) / math.pi
        assert decode_feature(theta_tilde, n) == pytest.approx(inner, abs=1e-9)


def test_truncated_decode_matches_circuit_table():
    from strideqcnn.layers import _decode_fixed

    t = 4
    layout = RegisterLayout([("est", t), ("out", 2 * t)])
    for n in (1, 2):
        circ = feature_decode_circuit(layout, "est", "out", n, t)
        for y in range(1 << t):
            state = init_state(layout)
            for q, b in layout.register("est").conditions(y):
                if b:
                    state.apply_gate(np.array([[0, 1], [1, 0]]), q)
            circ.apply(state)
            dist = state.register_distribution("out")
            bits = int(np.argmax(dist))
            assert dist[bits] == pytest.approx(1.0)
            # sin^2 is fold-symmetric, so the in-register decode of the raw
            # outcome equals the classical decode of the folded estimate
            folded = min(y, (1 << t) - y) / (1 << t)
            assert _decode_fixed(bits, t) * n ** 2 == pytest.approx(
                truncated_decode(folded, n, t), abs=1e-12)


# -- convolution layer -----------------------------------------------------------


def test_conv_single_term_closed_form():
    # 1x1 kernel with weight 1: sin^2 theta = (1 + r~)/2 per pixel
    cfg = ConvConfig(m=2, n=1, stride=1, angle_bits=12)
    image = ImageTensor([[3, 4], [0, 5]]).normalized()
    kernel = np.array([[1.0]])
    layout = conv_layout(cfg)
    mix = layout.qubits("mix")[0]
    q_image = quantized(image, cfg.angle_bits)
    for xp in range(2):
        for yp in range(2):
            prep = build_conv_prep(cfg, image, kernel, (xp, yp))
            state = init_state(layout)
            prep.apply(state)
            expected = (1 + q_image[xp, yp]) / 2
            assert state.probability(((mix, 0),)) == pytest.approx(expected, abs=1e-12)


def test_conv_uniform_closed_form():
    # uniform image and kernel: sin^2 theta = (1 + 1/(M N)) / 2
    m, n = 4, 2
    cfg = ConvConfig(m=m, n=n, stride=2, angle_bits=16)
    image = np.full((m, m), 1.0 / m)
    kernel = np.full((n, n), 1.0 / n)
    layout = conv_layout(cfg)
    mix = layout.qubits("mix")[0]
    prep = build_conv_prep(cfg, image, kernel, (0, 0))
    state = init_state(layout)
    prep.apply(state)
    q_r = quantized(image, cfg.angle_bits)[0, 0]
    q_w = quantized(kernel, cfg.angle_bits)[0, 0]
    expected = (n * n + n * n * q_r * q_w) / (2 * n * n)
    assert state.probability(((mix, 0),)) == pytest.approx(expected, abs=1e-12)
    # and the unquantized closed form within the quantization bound
    assert state.probability(((mix, 0),)) == pytest.approx(
        (1 + 1 / (m * n)) / 2, abs=2 * math.pi * 2 ** -cfg.angle_bits)


def test_conv_good_mass_matches_classical_formula():
    rng = np.random.default_rng(1)
    cfg = ConvConfig(m=4, n=2, stride=2, angle_bits=12)
    image, kernel = random_instance(rng)
    q_image = quantized(image, cfg.angle_bits)
    q_kernel = quantized(kernel, cfg.angle_bits)
    layout = conv_layout(cfg)
    mix = layout.qubits("mix")[0]
    expected_map = conv2d_ref(q_image, q_kernel, cfg.stride)
    for xp in range(cfg.out_side):
        for yp in range(cfg.out_side):
            prep = build_conv_prep(cfg, image, kernel, (xp, yp))
            state = init_state(layout)
            prep.apply(state)
            expected = (cfg.n ** 2 + expected_map[xp, yp]) / (2 * cfg.n ** 2)
            assert state.probability(((mix, 0),)) == pytest.approx(expected, abs=1e-11)


@pytest.mark.parametrize("stride", [1, 2])
def test_conv_layer_exact_matches_reference(stride):
    rng = np.random.default_rng(2 + stride)
    cfg = ConvConfig(m=4, n=2, stride=stride, angle_bits=12)
    image, kernel = random_instance(rng)
    fmap = conv_layer(cfg, image, kernel)
    reference = conv2d_ref(image, kernel, stride)
    bound = 2 * cfg.n ** 2 * math.pi * 2.0 ** -cfg.angle_bits + 1e-9
    assert fmap.side == cfg.out_side
    assert np.abs(fmap.values - reference).max() <= bound
    assert fmap.min_uncompute_fidelity >= 1 - 1e-9
    assert fmap.rotation_scale == cfg.n ** 2
    # quantized-oracle agreement is exact
    q_reference = conv2d_ref(quantized(image, 12), quantized(kernel, 12), stride)
    assert np.abs(fmap.values - q_reference).max() <= 1e-9


def test_conv_delta_kernel_reads_window_origin():
    rng = np.random.default_rng(5)
    image = ImageTensor(rng.integers(1, 256, size=(4, 4))).normalized()
    kernel = np.zeros((2, 2))
    kernel[0, 0] = 1.0
    cfg = ConvConfig(m=4, n=2, stride=1, angle_bits=14)
    fmap = conv_layer(cfg, image, kernel)
    bound = 2 * 4 * math.pi * 2.0 ** -14 + 1e-9
    assert np.abs(fmap.values - image[:3, :3]).max() <= bound


def test_conv_output_sides_for_both_strides():
    image = np.full((4, 4), 0.25)
    kernel = np.full((2, 2), 0.5)
    assert conv_layer(ConvConfig(4, 2, 1), image, kernel).side == 3
    assert conv_layer(ConvConfig(4, 2, 2), image, kernel).side == 2


def test_conv_stride_flexibility_subsampling():
    rng = np.random.default_rng(6)
    for _ in range(5):
        image, kernel = random_instance(rng)
        dense = conv_layer(ConvConfig(4, 2, 1, angle_bits=10), image, kernel)
        strided = conv_layer(ConvConfig(4, 2, 2, angle_bits=10), image, kernel)
        assert np.allclose(strided.values, dense.values[::2, ::2], atol=1e-12)


def test_conv_circuit_backend_within_qae_tolerance():
    rng = np.random.default_rng(7)
    t, bits = 6, 12
    cfg = ConvConfig(m=4, n=2, stride=2, angle_bits=bits, qae_bits=t,
                     backend="circuit")
    image, kernel = random_instance(rng)
    fmap = conv_layer(cfg, image, kernel)
    reference = conv2d_ref(image, kernel, cfg.stride)
    tol = (2 * cfg.n ** 2 * (2 * math.pi * 2.0 ** -t + math.pi ** 2 * 4.0 ** -t)
           + 2 * cfg.n ** 2 * math.pi * 2.0 ** -bits)
    assert np.abs(fmap.values - reference).max() <= tol


def test_conv_qae_gates_matches_reduced():
    rng = np.random.default_rng(8)
    cfg = ConvConfig(m=2, n=1, stride=1, angle_bits=6, qae_bits=3)
    image, _ = random_instance(rng, m=2, n=1)
    kernel = np.array([[1.0]])
    for pos in [(0, 0), (1, 1)]:
        gates = conv_qae_result(cfg, image, kernel, pos, method="gates")
        reduced = conv_qae_result(cfg, image, kernel, pos, method="reduced")
        assert np.allclose(gates.distribution, reduced.distribution, atol=1e-9)
        assert gates.theta_tilde == reduced.theta_tilde


def test_coherent_conv_state_matches_per_feature():
    rng = np.random.default_rng(9)
    cfg = ConvConfig(m=2, n=1, stride=1, angle_bits=8, qae_bits=3)
    image, _ = random_instance(rng, m=2, n=1)
    kernel = np.array([[1.0]])
    t = 3
    state, layout = coherent_conv_state(cfg, image, kernel, t)
    ext = layout.extended(qae.PHASE_REGISTER, t)
    for xp in range(2):
        for yp in range(2):
            pos_conds = (layout.register("out_x").conditions(xp)
                         + layout.register("out_y").conditions(yp))
            p_pos = state.probability(pos_conds)
            assert p_pos == pytest.approx(0.25, abs=1e-10)
            conditional = np.array([
                state.probability(pos_conds
                                  + ext.register(qae.PHASE_REGISTER).conditions(y))
                for y in range(1 << t)
            ]) / p_pos
            per_feature = conv_qae_result(cfg, image, kernel, (xp, yp),
                                          method="reduced")
            assert np.allclose(conditional, per_feature.distribution, atol=1e-9)


def test_coherent_conv_rejects_large_images():
    with pytest.raises(ValueError, match="2x2"):
        coherent_conv_state(ConvConfig(4, 2, 2), np.full((4, 4), 0.25),
                            np.full((2, 2), 0.5), 3)


# -- pooling layer ---------------------------------------------------------------


def feature_fixture(rng, side, scale=1.0):
    values = rng.uniform(-1, 1, size=(side, side)) * scale
    return FeatureMap(values, scale, "test")


def test_pool_constant_input_window_sum():
    const = FeatureMap(np.full((3, 3), 0.5), 1.0, "test")
    cfg = PoolConfig(in_side=3, window=2, stride=1)
    pooled = pool_layer(cfg, const)
    assert np.allclose(pooled.values, 2.0, atol=1e-9)
    assert pooled.rotation_scale == pytest.approx(4.0)


def test_pool_full_frame_single_output():
    rng = np.random.default_rng(10)
    fmap = feature_fixture(rng, 2)
    cfg = PoolConfig(in_side=2, window=2, stride=1)
    pooled = pool_layer(cfg, fmap)
    assert pooled.values.shape == (1, 1)
    assert pooled.values[0, 0] == pytest.approx(fmap.values.sum(), abs=1e-9)


@pytest.mark.parametrize("side,stride", [(2, 1), (2, 2), (3, 1), (4, 1), (4, 2)])
def test_pool_matches_reference_sums(side, stride):
    rng = np.random.default_rng(11 + side + stride)
    fmap = feature_fixture(rng, side)
    cfg = PoolConfig(in_side=side, window=2, stride=stride)
    pooled = pool_layer(cfg, fmap)
    reference = pool_ref(fmap.values, 2, stride, "sum")
    assert np.abs(pooled.values - reference).max() <= 1e-9
    assert np.allclose(pooled.values,
                       4 * pool_ref(fmap.values, 2, stride, "average"),
                       atol=1e-9)
    assert pooled.min_uncompute_fidelity >= 1 - 1e-9


def test_pool_respects_rotation_scale():
    rng = np.random.default_rng(15)
    values = rng.uniform(-4, 4, size=(3, 3))
    fmap = FeatureMap(values, 4.0, "conv-like")
    cfg = PoolConfig(in_side=3, window=2, stride=1)
    pooled = pool_layer(cfg, fmap)
    assert np.abs(pooled.values - pool_ref(values, 2, 1, "sum")).max() <= 1e-9
    assert pooled.rotation_scale == pytest.approx(16.0)


def test_pool_scaling_violation_diagnosed():
    fmap = FeatureMap(np.full((2, 2), 1.5), 1.0, "broken")
    cfg = PoolConfig(in_side=2, window=2, stride=1)
    with pytest.raises(ValueError, match="rotation domain"):
        pool_layer(cfg, fmap)


def test_pool_good_mass_formula():
    rng = np.random.default_rng(16)
    side = 3
    fmap = feature_fixture(rng, side)
    cfg = PoolConfig(in_side=side, window=2, stride=1)
    layout = pool_layout(cfg)
    good = ((layout.qubits("match")[0], 0), (layout.qubits("pool_mix")[0], 0))
    for pos in [(0, 0), (1, 1), (0, 1)]:
        prep = build_pool_prep(cfg, fmap, pos)
        state = init_state(layout)
        prep.apply(state)
        window = fmap.values[pos[0]: pos[0] + 2, pos[1]: pos[1] + 2]
        expected = (4 + window.sum()) / (2 * side ** 2 * 4)
        assert state.probability(good) == pytest.approx(expected, abs=1e-11)


def test_pool_circuit_backend_tolerance():
    rng = np.random.default_rng(17)
    t = 6
    fmap = feature_fixture(rng, 3)
    cfg = PoolConfig(in_side=3, window=2, stride=1, qae_bits=t, backend="circuit")
    pooled = pool_layer(cfg, fmap)
    reference = pool_ref(fmap.values, 2, 1, "sum")
    norm = 2 * cfg.in_side ** 2 * cfg.window ** 2
    tol = norm * (2 * math.pi * 2.0 ** -t + math.pi ** 2 * 4.0 ** -t) + 1e-9
    assert np.abs(pooled.values - reference).max() <= tol


def test_pool_qae_gates_matches_reduced():
    rng = np.random.default_rng(18)
    fmap = feature_fixture(rng, 2)
    cfg = PoolConfig(in_side=2, window=2, stride=1, qae_bits=3)
    gates = pool_qae_result(cfg, fmap, (0, 0), method="gates")
    reduced = pool_qae_result(cfg, fmap, (0, 0), method="reduced")
    assert np.allclose(gates.distribution, reduced.distribution, atol=1e-9)


# -- fully connected layer ---------------------------------------------------------


def test_fc_zero_inner_product_gives_uniform_halves():
    features = FeatureMap(np.zeros((2, 2)), 1.0, "test")
    weights = FcWeights(np.stack([np.full((2, 2), 0.7), np.full((2, 2), -0.3)]))
    probs = fc_layer(features, weights)
    assert np.allclose(probs, 1 / 4, atol=1e-10)  # 1/(2K), K=2


def test_fc_perfect_match_closed_form():
    features = FeatureMap(np.ones((2, 2)), 1.0, "test")
    weights = FcWeights(np.stack([np.ones((2, 2)), np.ones((2, 2))]))
    probs = fc_layer(features, weights)
    assert np.allclose(probs, 0.5, atol=1e-10)  # (4+4)/(2*2*4)


def test_fc_matches_probability_formula_random():
    rng = np.random.default_rng(19)
    for _ in range(25):
        side = int(rng.integers(1, 3))
        k = int(rng.integers(2, 4))
        scale = float(rng.uniform(0.5, 3.0))
        values = rng.uniform(-scale, scale, size=(side, side))
        features = FeatureMap(values, scale, "test")
        weights = FcWeights(rng.uniform(-1, 1, size=(k, side, side)))
        probs = fc_layer(features, weights)
        expected = fc_probabilities(values / scale, weights.weights)
        assert np.allclose(probs, expected, atol=1e-9)
        assert classify(probs) == int(np.argmax(fc_ref(values / scale,
                                                       weights.weights)))


def test_fc_shots_mode_deterministic_and_converging():
    rng = np.random.default_rng(20)
    features = FeatureMap(rng.uniform(-1, 1, size=(2, 2)), 1.0, "test")
    weights = FcWeights(rng.uniform(-1, 1, size=(2, 2, 2)))
    exact = fc_layer(features, weights)
    sampled_a = fc_layer(features, weights, shots=200_000, seed=3)
    sampled_b = fc_layer(features, weights, shots=200_000, seed=3)
    assert np.array_equal(sampled_a, sampled_b)
    assert np.abs(sampled_a - exact).max() < 5e-3


def test_classify_ties_and_empty():
    assert classify([0.3, 0.2]) == 0
    assert classify([0.25, 0.25]) == 0
    with pytest.raises(ValueError):
        classify([])


# -- feature map serialization -------------------------------------------------------


def test_feature_map_roundtrip(tmp_path):
    rng = np.random.default_rng(21)
    fmap = FeatureMap(rng.normal(size=(3, 3)), 4.0, "conv(M=4,N=2,s=1)")
    path = tmp_path / "features.txt"
    fmap.save(path)
    loaded = FeatureMap.load(path)
    assert np.array_equal(loaded.values, fmap.values)
    assert loaded.rotation_scale == fmap.rotation_scale
    assert loaded.source == fmap.source
