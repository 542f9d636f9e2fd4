"""Quantum convolution, pooling, and fully connected layers.

Each layer prepares an interference state whose good-subspace mass encodes
a window inner product, reads it out either exactly from the amplitudes
(``exact`` backend) or through amplitude estimation (``circuit`` backend),
then uncomputes so every working register is reusable.

Layer outputs travel between layers as classical feature maps with a
tracked rotation scale: values divided by the scale lie in [-1, 1] and are
re-encoded as rotation amplitudes by the next layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import qae
from .arithmetic import (
    build_comparator,
    build_constant_load,
    build_index_map,
    build_stride_load,
)
from .encoding import ImageTensor, KernelWeights, QramTable, fused_loader_circuit, loader_angles
from .statevector import (
    Circuit,
    RegisterLayout,
    build_uniform,
    init_state,
)

UNCOMPUTE_THRESHOLD = 1 - 1e-9


def _width_for(count: int) -> int:
    """Qubits needed to index ``count`` values; zero for a single value."""
    return max(count - 1, 0).bit_length()


def _as_normalized(data, cls):
    if isinstance(data, cls):
        return data.normalized()
    return np.asarray(data, dtype=float)


# ---------------------------------------------------------------------------
# Configurations


@dataclass(frozen=True)
class ConvConfig:
    """Convolution hyperparameters: image side, kernel side, stride,
    angle precision bits, estimation precision bits, and backend."""

    m: int
    n: int
    stride: int
    angle_bits: int = 12
    qae_bits: int = 6
    backend: str = "exact"

    def __post_init__(self):
        if self.n < 1 or self.m < self.n:
            raise ValueError(f"need image side >= kernel side >= 1, "
                             f"got {self.m} and {self.n}")
        if self.stride < 1:
            raise ValueError(f"stride must be positive, got {self.stride}")
        if (self.m - self.n) % self.stride:
            raise ValueError(
                f"(M - N) = {self.m - self.n} not divisible by stride "
                f"{self.stride}; ragged edges are rejected, not padded"
            )
        if self.angle_bits < 1:
            raise ValueError("angle_bits must be >= 1")
        if self.qae_bits < 1:
            raise ValueError("qae_bits must be >= 1")
        if self.backend not in ("exact", "circuit"):
            raise ValueError(f"unknown backend {self.backend!r}")

    @property
    def out_side(self) -> int:
        return (self.m - self.n) // self.stride + 1


@dataclass(frozen=True)
class PoolConfig:
    """Pooling hyperparameters over a feature map of side ``in_side``."""

    in_side: int
    window: int
    stride: int
    qae_bits: int = 6
    backend: str = "exact"

    def __post_init__(self):
        if self.window < 1 or self.in_side < self.window:
            raise ValueError(f"need map side >= window >= 1, "
                             f"got {self.in_side} and {self.window}")
        if self.stride < 1:
            raise ValueError(f"stride must be positive, got {self.stride}")
        if (self.in_side - self.window) % self.stride:
            raise ValueError(
                f"(M' - N') = {self.in_side - self.window} not divisible by "
                f"stride {self.stride}"
            )
        if self.qae_bits < 1:
            raise ValueError("qae_bits must be >= 1")
        if self.backend not in ("exact", "circuit"):
            raise ValueError(f"unknown backend {self.backend!r}")

    @property
    def out_side(self) -> int:
        return (self.in_side - self.window) // self.stride + 1


# ---------------------------------------------------------------------------
# Feature maps and weights


@dataclass
class FeatureMap:
    """Square map of real feature values with encoding provenance.

    values / rotation_scale lie in [-1, 1] and are what the next layer
    loads as rotation amplitudes.
    """

    values: np.ndarray
    rotation_scale: float
    source: str
    min_uncompute_fidelity: float = 1.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2 or self.values.shape[0] != self.values.shape[1]:
            raise ValueError(f"feature map must be square, got {self.values.shape}")
        if not np.isfinite(self.values).all():
            raise ValueError("feature values must be finite")

    @property
    def side(self) -> int:
        return self.values.shape[0]

    def scaled(self) -> np.ndarray:
        """Values mapped into [-1, 1]; raises if the scale does not cover them."""
        scaled = self.values / self.rotation_scale
        overshoot = np.abs(scaled).max(initial=0.0) - 1.0
        if overshoot > 1e-9:
            raise ValueError(
                f"features exceed the rotation domain by {overshoot:.3e}; "
                f"scale {self.rotation_scale} is too small for "
                f"max |value| {np.abs(self.values).max():.6g}"
            )
        return np.clip(scaled, -1.0, 1.0)

    def save(self, path) -> None:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(f"# layer {self.source}\n")
            fh.write(f"# side {self.side}\n")
            fh.write(f"# scale {self.rotation_scale:.17g}\n")
            for row in self.values:
                fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")

    @classmethod
    def load(cls, path) -> "FeatureMap":
        source, scale, rows = "unknown", 1.0, []
        with open(path, encoding="ascii") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("# layer"):
                    source = line.split(None, 2)[2]
                elif line.startswith("# scale"):
                    scale = float(line.split()[2])
                elif line.startswith("#"):
                    continue
                else:
                    rows.append([float(v) for v in line.split()])
        return cls(np.array(rows), scale, source)


@dataclass
class FcWeights:
    """K weight matrices, entries pre-normalized into [-1, 1]."""

    weights: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if self.weights.ndim != 3 or self.weights.shape[1] != self.weights.shape[2]:
            raise ValueError(
                f"weights must be (K, side, side), got {self.weights.shape}"
            )
        if np.abs(self.weights).max(initial=0.0) > 1.0 + 1e-12:
            raise ValueError("weight entries must lie in [-1, 1]")

    @property
    def num_classes(self) -> int:
        return self.weights.shape[0]

    @property
    def side(self) -> int:
        return self.weights.shape[1]


# ---------------------------------------------------------------------------
# Quantum convolution


def conv_layout(config: ConvConfig) -> RegisterLayout:
    wm_out = _width_for(config.out_side)
    wn = _width_for(config.n)
    wm = _width_for(config.m)
    return RegisterLayout([
        ("out_x", wm_out), ("out_y", wm_out),
        ("win_x", wn), ("win_y", wn),
        ("stride", config.stride.bit_length()),
        ("img_x", wm), ("img_y", wm),
        ("mix", 1), ("img_data", 1), ("ker_data", 1),
        ("carry", 1),
    ])


def _xy_key(x: int, y: int, x_width: int) -> int:
    """Concatenated register index with the x register in the low bits."""
    return x + (y << x_width)


def conv_angle_tables(config: ConvConfig, image, kernel):
    """Quantized QRAM angle tables for the image and the kernel."""
    image_norm = _as_normalized(image, ImageTensor)
    kernel_norm = _as_normalized(kernel, KernelWeights)
    if image_norm.shape != (config.m, config.m):
        raise ValueError(f"image shape {image_norm.shape} != ({config.m}, {config.m})")
    if kernel_norm.shape != (config.n, config.n):
        raise ValueError(f"kernel shape {kernel_norm.shape} != ({config.n}, {config.n})")
    wm = _width_for(config.m)
    wn = _width_for(config.n)
    image_table = QramTable.from_values(
        {_xy_key(x, y, wm): float(image_norm[x, y])
         for x in range(config.m) for y in range(config.m)},
        config.angle_bits,
    )
    kernel_table = QramTable.from_values(
        {_xy_key(i, j, wn): float(kernel_norm[i, j])
         for i in range(config.n) for j in range(config.n)},
        config.angle_bits,
    )
    return image_table, kernel_table


def build_conv_prep(config: ConvConfig, image, kernel,
                    position: tuple[int, int] | None) -> Circuit:
    """State preparation for one output position (or all, when coherent).

    Applied to |0...0> it loads the position, spreads the kernel index,
    recovers image indices through the stride arithmetic, and runs the
    two-loader interference whose mix-qubit |0> mass is
    (N^2 + sum r~ w~) / (2 N^2). ``position=None`` prepares the uniform
    superposition over all output positions instead (coherent mode).
    """
    layout = conv_layout(config)
    image_table, kernel_table = conv_angle_tables(config, image, kernel)
    circ = Circuit()
    if position is None:
        circ.extend(build_uniform(layout.qubits("out_x"), config.out_side))
        circ.extend(build_uniform(layout.qubits("out_y"), config.out_side))
    else:
        xp, yp = position
        if not (0 <= xp < config.out_side and 0 <= yp < config.out_side):
            raise ValueError(f"position {position} outside "
                             f"{config.out_side}x{config.out_side} output")
        circ.extend(build_constant_load(layout, "out_x", xp))
        circ.extend(build_constant_load(layout, "out_y", yp))
    circ.extend(build_uniform(layout.qubits("win_x"), config.n))
    circ.extend(build_uniform(layout.qubits("win_y"), config.n))
    stride_load = build_stride_load(layout, "stride", config.stride)
    circ.extend(stride_load)
    circ.extend(build_index_map(
        layout, ("out_x", "out_y"), ("win_x", "win_y"), "stride",
        ("img_x", "img_y"), coarse_max=config.out_side - 1,
        offset_max=config.n - 1, stride_value=config.stride))
    circ.extend(stride_load.inverse())
    mix = layout.qubits("mix")[0]
    circ.h(mix)
    circ.extend(fused_loader_circuit(
        layout, ("img_x", "img_y"), layout.qubits("img_data")[0],
        loader_angles(image_table), controls=((mix, 0),)))
    circ.extend(fused_loader_circuit(
        layout, ("win_x", "win_y"), layout.qubits("ker_data")[0],
        loader_angles(kernel_table), controls=((mix, 0),)))
    circ.h(mix)
    return circ


def decode_feature(theta_tilde: float, n: int) -> float:
    """Angle estimate to window inner product: 2 n^2 sin^2(pi x) - n^2."""
    if not 0.0 <= theta_tilde <= 1.0:
        raise ValueError(f"theta_tilde must lie in [0, 1], got {theta_tilde}")
    return 2 * n ** 2 * math.sin(math.pi * theta_tilde) ** 2 - n ** 2


def _encode_fixed(value: float, t: int) -> int:
    """Sign + magnitude fixed point with 2t bits, truncating toward zero."""
    frac_bits = 2 * t - 1
    sign = 1 if value < 0 else 0
    mag = min(int(abs(value) * (1 << frac_bits)), (1 << frac_bits) - 1)
    return (sign << frac_bits) | mag


def _decode_fixed(bits: int, t: int) -> float:
    frac_bits = 2 * t - 1
    sign = -1.0 if (bits >> frac_bits) & 1 else 1.0
    return sign * (bits & ((1 << frac_bits) - 1)) / (1 << frac_bits)


def truncated_decode(theta_tilde: float, n: int, t: int) -> float:
    """Decode through the 2t-bit fixed-point path used by the circuit mode."""
    scaled = decode_feature(theta_tilde, n) / n ** 2
    return _decode_fixed(_encode_fixed(scaled, t), t) * n ** 2


def feature_decode_circuit(layout: RegisterLayout, phase_reg: str, out_reg: str,
                           n: int, t: int) -> Circuit:
    """Basis arithmetic turning a t-bit angle estimate into a feature value.

    Writes the 2t-bit sign-magnitude encoding of (2 n^2 sin^2(pi y/2^t)
    - n^2) / n^2 into ``out_reg`` conditioned on the estimate register
    holding y. Matches :func:`truncated_decode` on every outcome.
    """
    reg = layout.register(out_reg)
    if reg.width != 2 * t:
        raise ValueError(f"decode register needs width {2 * t}, has {reg.width}")
    phase = layout.register(phase_reg)
    if phase.width != t:
        raise ValueError(f"estimate register needs width {t}, has {phase.width}")
    circ = Circuit()
    for y in range(1 << t):
        scaled = decode_feature(y / (1 << t), n) / n ** 2
        bits = _encode_fixed(scaled, t)
        conds = phase.conditions(y)
        for b in range(reg.width):
            if (bits >> b) & 1:
                circ.x(reg.offset + b, conds)
    return circ


def conv_layer(config: ConvConfig, image, kernel) -> FeatureMap:
    """Feature map of window inner products, one estimation per position.

    Exact backend reads sin^2(theta) from the mix-qubit mass; circuit
    backend runs t-bit amplitude estimation and the fixed-point decode.
    After each position the preparation is inverted and the residual mass
    outside |0...0> is recorded as the uncompute fidelity.
    """
    layout = conv_layout(config)
    good = ((layout.qubits("mix")[0], 0),)
    side = config.out_side
    values = np.zeros((side, side))
    min_fidelity = 1.0
    for xp in range(side):
        for yp in range(side):
            prep = build_conv_prep(config, image, kernel, (xp, yp))
            state = init_state(layout, requested_by="convolution layer")
            prep.apply(state)
            p_good = state.probability(good)
            if config.backend == "exact":
                feature = 2 * config.n ** 2 * p_good - config.n ** 2
            else:
                theta = math.asin(math.sqrt(min(max(p_good, 0.0), 1.0)))
                dist = qae.phase_estimation_distribution(theta, config.qae_bits)
                result = qae.result_from_distribution(dist, config.qae_bits)
                feature = truncated_decode(result.theta_tilde, config.n,
                                           config.qae_bits)
            values[xp, yp] = feature
            prep.inverse().apply(state)
            min_fidelity = min(min_fidelity,
                               state.assert_disentangled(layout.names(), 0))
    source = (f"conv(M={config.m},N={config.n},s={config.stride},"
              f"L={config.angle_bits},t={config.qae_bits},"
              f"backend={config.backend})")
    return FeatureMap(values, float(config.n ** 2), source,
                      min_uncompute_fidelity=min_fidelity)


def conv_qae_result(config: ConvConfig, image, kernel,
                    position: tuple[int, int], *, method: str = "reduced",
                    max_qubits: int | None = None) -> qae.QaeResult:
    """Amplitude estimation result for one output position.

    ``method='gates'`` runs the literal controlled-iterate circuit with the
    phase register attached; ``'reduced'`` computes the same statistics in
    the invariant subspace.
    """
    layout = conv_layout(config)
    prep = build_conv_prep(config, image, kernel, position)
    good = ((layout.qubits("mix")[0], 0),)
    return qae.qae_estimate(prep, layout, good, config.qae_bits, method=method,
                            max_qubits=max_qubits,
                            requested_by="convolution layer")


def coherent_conv_state(config: ConvConfig, image, kernel, t: int,
                        max_qubits: int | None = None):
    """Joint phase-estimation state over every output position at once.

    Demo-scale only (2x2 images): the iterate must stay block-diagonal in
    the position register, so the zero reflection covers only the
    non-position qubits. Returns (state, layout) for conditional readout.
    """
    if config.m != 2:
        raise ValueError("coherent mode is supported only for 2x2 images")
    layout = conv_layout(config)
    prep = build_conv_prep(config, image, kernel, None)
    good = ((layout.qubits("mix")[0], 0),)
    position_qubits = set(layout.qubits("out_x")) | set(layout.qubits("out_y"))
    zero_qubits = [q for q in range(layout.num_qubits) if q not in position_qubits]
    state = qae.phase_estimation_state(prep, layout, good, t,
                                       zero_qubits=zero_qubits,
                                       max_qubits=max_qubits,
                                       requested_by="coherent convolution")
    return state, layout


# ---------------------------------------------------------------------------
# Quantum pooling


def pool_layout(config: PoolConfig) -> RegisterLayout:
    wf = _width_for(config.in_side)
    wo = _width_for(config.out_side)
    ww = _width_for(config.window)
    return RegisterLayout([
        ("feat_x", wf), ("feat_y", wf),
        ("pool_x", wo), ("pool_y", wo),
        ("win_x", ww), ("win_y", ww),
        ("stride", config.stride.bit_length()),
        ("tgt_x", wf), ("tgt_y", wf),
        ("match", 1), ("pool_mix", 1), ("pool_data", 1),
        ("carry", 1),
    ])


def build_pool_prep(config: PoolConfig, features: FeatureMap,
                    position: tuple[int, int] | None) -> Circuit:
    """Pooling interference state for one pooled position.

    Spreads the input position register uniformly (the indexing state of
    the upstream feature map), recovers source positions via the stride
    arithmetic, equality-compares them against the input register into the
    match flag, and runs the match-conditioned rotation interference whose
    (match, pool_mix) = (0, 0) mass is
    (N'^2 + window sum) / (2 M'^2 N'^2) on scaled features.
    """
    if features.side != config.in_side:
        raise ValueError(f"feature map side {features.side} != configured "
                         f"{config.in_side}")
    layout = pool_layout(config)
    scaled = features.scaled()
    wf = _width_for(config.in_side)
    circ = Circuit()
    circ.extend(build_uniform(layout.qubits("feat_x"), config.in_side))
    circ.extend(build_uniform(layout.qubits("feat_y"), config.in_side))
    if position is None:
        circ.extend(build_uniform(layout.qubits("pool_x"), config.out_side))
        circ.extend(build_uniform(layout.qubits("pool_y"), config.out_side))
    else:
        xq, yq = position
        if not (0 <= xq < config.out_side and 0 <= yq < config.out_side):
            raise ValueError(f"position {position} outside "
                             f"{config.out_side}x{config.out_side} output")
        circ.extend(build_constant_load(layout, "pool_x", xq))
        circ.extend(build_constant_load(layout, "pool_y", yq))
    circ.extend(build_uniform(layout.qubits("win_x"), config.window))
    circ.extend(build_uniform(layout.qubits("win_y"), config.window))
    stride_load = build_stride_load(layout, "stride", config.stride)
    circ.extend(stride_load)
    circ.extend(build_index_map(
        layout, ("pool_x", "pool_y"), ("win_x", "win_y"), "stride",
        ("tgt_x", "tgt_y"), coarse_max=config.out_side - 1,
        offset_max=config.window - 1, stride_value=config.stride))
    circ.extend(stride_load.inverse())
    match = layout.qubits("match")[0]
    circ.x(match)  # flag starts |1>, flips to |0> on equality
    circ.extend(build_comparator(
        layout.qubits("feat_x") + layout.qubits("feat_y"),
        layout.qubits("tgt_x") + layout.qubits("tgt_y"),
        match))
    mix = layout.qubits("pool_mix")[0]
    data = layout.qubits("pool_data")[0]
    circ.h(mix, ((match, 0),))
    angles = {
        _xy_key(x, y, wf): math.acos(float(scaled[x, y]))
        for x in range(config.in_side) for y in range(config.in_side)
    }
    circ.extend(fused_loader_circuit(
        layout, ("feat_x", "feat_y"), data, angles,
        controls=((match, 0), (mix, 0))))
    circ.h(mix, ((match, 0),))
    return circ


def pool_layer(config: PoolConfig, features: FeatureMap) -> FeatureMap:
    """Window-sum feature map extracted through the pooling interference.

    Returns sums in the input's units (the rotation scale is untangled
    afterward); the next layer's scale grows by the window area. The
    decoded sum relates to average pooling by the constant N'^2.
    """
    layout = pool_layout(config)
    good = ((layout.qubits("match")[0], 0), (layout.qubits("pool_mix")[0], 0))
    side = config.out_side
    norm = config.in_side ** 2 * config.window ** 2
    values = np.zeros((side, side))
    min_fidelity = 1.0
    for xq in range(side):
        for yq in range(side):
            prep = build_pool_prep(config, features, (xq, yq))
            state = init_state(layout, requested_by="pooling layer")
            prep.apply(state)
            p_good = state.probability(good)
            if config.backend == "exact":
                scaled_sum = 2 * norm * p_good - config.window ** 2
            else:
                theta = math.asin(math.sqrt(min(max(p_good, 0.0), 1.0)))
                dist = qae.phase_estimation_distribution(theta, config.qae_bits)
                result = qae.result_from_distribution(dist, config.qae_bits)
                sinsq = math.sin(math.pi * result.theta_tilde) ** 2
                raw = (2 * norm * sinsq - config.window ** 2) / config.window ** 2
                scaled_sum = _decode_fixed(
                    _encode_fixed(raw, config.qae_bits), config.qae_bits
                ) * config.window ** 2
            values[xq, yq] = scaled_sum * features.rotation_scale
            prep.inverse().apply(state)
            min_fidelity = min(min_fidelity,
                               state.assert_disentangled(layout.names(), 0))
    source = (f"pool(M'={config.in_side},N'={config.window},s'={config.stride},"
              f"t={config.qae_bits},backend={config.backend})")
    return FeatureMap(values, features.rotation_scale * config.window ** 2,
                      source, min_uncompute_fidelity=min_fidelity)


def pool_qae_result(config: PoolConfig, features: FeatureMap,
                    position: tuple[int, int], *, method: str = "reduced",
                    max_qubits: int | None = None) -> qae.QaeResult:
    layout = pool_layout(config)
    prep = build_pool_prep(config, features, position)
    good = ((layout.qubits("match")[0], 0), (layout.qubits("pool_mix")[0], 0))
    return qae.qae_estimate(prep, layout, good, config.qae_bits, method=method,
                            max_qubits=max_qubits, requested_by="pooling layer")


# ---------------------------------------------------------------------------
# Quantum fully connected layer


def fc_layout(features_side: int, num_classes: int) -> RegisterLayout:
    return RegisterLayout([
        ("pos_x", _width_for(features_side)),
        ("pos_y", _width_for(features_side)),
        ("cls", _width_for(num_classes)),
        ("w_data", 1), ("feat_data", 1), ("fc_mix", 1),
    ])


def build_fc_prep(features: FeatureMap, weights: FcWeights) -> Circuit:
    """Class-superposed interference state for the fully connected layer.

    (cls, fc_mix) = (k, 0) mass is (Mbar^2 + sum r~ w^k) / (2 K Mbar^2).
    """
    if weights.side != features.side:
        raise ValueError(f"weights side {weights.side} != features side "
                         f"{features.side}")
    layout = fc_layout(features.side, weights.num_classes)
    scaled = features.scaled()
    side = features.side
    wpos = _width_for(side)
    circ = Circuit()
    circ.extend(build_uniform(layout.qubits("pos_x"), side))
    circ.extend(build_uniform(layout.qubits("pos_y"), side))
    circ.extend(build_uniform(layout.qubits("cls"), weights.num_classes))
    mix = layout.qubits("fc_mix")[0]
    w_data = layout.qubits("w_data")[0]
    f_data = layout.qubits("feat_data")[0]
    circ.h(mix)
    cls_reg = layout.register("cls")
    for k in range(weights.num_classes):
        angles = {
            _xy_key(x, y, wpos): math.acos(float(weights.weights[k, x, y]))
            for x in range(side) for y in range(side)
        }
        circ.extend(fused_loader_circuit(
            layout, ("pos_x", "pos_y"), w_data, angles,
            controls=((mix, 0),) + cls_reg.conditions(k)))
    feat_angles = {
        _xy_key(x, y, wpos): math.acos(float(scaled[x, y]))
        for x in range(side) for y in range(side)
    }
    circ.extend(fused_loader_circuit(
        layout, ("pos_x", "pos_y"), f_data, feat_angles,
        controls=((mix, 0),)))
    circ.h(mix)
    return circ


def fc_layer(features: FeatureMap, weights: FcWeights, *,
             shots: int | None = None, seed: int = 0) -> np.ndarray:
    """Per-class probabilities Prob(k, 0) of the joint (class, mix) readout.

    Exact probabilities by default; with ``shots`` the vector is estimated
    from a seeded multinomial draw over the joint outcome distribution.
    """
    layout = fc_layout(features.side, weights.num_classes)
    prep = build_fc_prep(features, weights)
    state = init_state(layout, requested_by="fully connected layer")
    prep.apply(state)
    mix = layout.qubits("fc_mix")[0]
    cls_reg = layout.register("cls")
    k = weights.num_classes
    exact = np.array([
        state.probability(cls_reg.conditions(ki) + ((mix, 0),))
        for ki in range(k)
    ])
    if shots is None:
        return exact
    joint = []
    for ki in range(1 << cls_reg.width):
        for b in (0, 1):
            joint.append(state.probability(cls_reg.conditions(ki) + ((mix, b),)))
    joint = np.array(joint)
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, joint / joint.sum())
    return np.array([counts[2 * ki] / shots for ki in range(k)])


def classify(probabilities) -> int:
    """Argmax class label; ties break to the lowest index."""
    probabilities = np.asarray(probabilities)
    if probabilities.size == 0:
        raise ValueError("empty probability vector")
    return int(np.argmax(probabilities))
