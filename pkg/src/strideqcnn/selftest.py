"""Condensed invariant suite behind the `selftest` subcommand.

Quick checks of the simulator's load-bearing properties; the full pytest
suite is the authoritative verification.
"""

from __future__ import annotations

import math

import numpy as np

from .arithmetic import build_adder, build_comparator, build_constant_load, build_multiplier
from .encoding import QramTable, fused_loader_circuit, loader_angles
from .layers import ConvConfig, FcWeights, FeatureMap, PoolConfig, conv_layer, fc_layer, pool_layer
from .qae import qae_estimate
from .reference import conv2d_ref, fc_probabilities, pool_ref
from .statevector import Circuit, RegisterLayout, init_state


def _basis(layout, **values):
    state = init_state(layout)
    for name, value in values.items():
        build_constant_load(layout, name, value).apply(state)
    return state


def check_norm_preservation():
    rng = np.random.default_rng(0)
    layout = RegisterLayout([("r", 6)])
    state = init_state(layout)
    circ = Circuit()
    for _ in range(40):
        target = int(rng.integers(0, 6))
        other = int(rng.integers(0, 6))
        controls = ((other, 1),) if other != target else ()
        circ.ry(rng.uniform(0, math.pi), target, controls)
    circ.apply(state)
    assert state.norm_error() < 1e-10, f"norm error {state.norm_error():.2e}"
    circ.inverse().apply(state)
    fidelity = state.assert_disentangled(["r"], 0)
    assert fidelity >= 1 - 1e-9, f"round-trip fidelity {fidelity}"


def check_adder():
    layout = RegisterLayout([("a", 3), ("b", 4), ("carry", 1)])
    circ = build_adder(layout, "a", "b", layout.qubits("carry")[0])
    for alpha in range(8):
        for beta in range(16):
            state = _basis(layout, a=alpha, b=beta)
            circ.apply(state)
            expected = (alpha + beta) % 16
            got = int(np.argmax(state.register_distribution("b")))
            assert got == expected, f"{alpha}+{beta}: got {got}"


def check_multiplier():
    layout = RegisterLayout([("a", 2), ("b", 2), ("out", 4)])
    circ = build_multiplier(layout, "a", "b", "out")
    for alpha in range(4):
        for beta in range(4):
            state = _basis(layout, a=alpha, b=beta)
            circ.apply(state)
            got = int(np.argmax(state.register_distribution("out")))
            assert got == alpha * beta, f"{alpha}*{beta}: got {got}"


def check_comparator():
    layout = RegisterLayout([("m", 2), ("mt", 2), ("flag", 1)])
    circ = build_comparator(layout.qubits("m"), layout.qubits("mt"),
                            layout.qubits("flag")[0])
    for m in range(4):
        for mt in range(4):
            state = _basis(layout, m=m, mt=mt, flag=1)
            circ.apply(state)
            got = int(np.argmax(state.register_distribution("flag")))
            assert got == (0 if m == mt else 1), f"compare {m},{mt}: flag {got}"


def check_loader_bound():
    width = 8
    values = {i: v for i, v in enumerate(np.linspace(-1, 1, 4))}
    table = QramTable.from_values(values, width)
    layout = RegisterLayout([("idx", 2), ("data", 1)])
    circ = fused_loader_circuit(layout, ["idx"], layout.qubits("data")[0],
                                loader_angles(table))
    for idx, value in values.items():
        state = _basis(layout, idx=idx)
        circ.apply(state)
        amp = math.sqrt(state.probability(((layout.qubits("data")[0], 0),)))
        assert abs(amp - abs(math.cos(table.angle(idx)))) < 1e-10
        assert abs(math.cos(table.angle(idx)) - value) <= math.pi * 2 ** -width + 1e-12


def check_conv_oracle():
    rng = np.random.default_rng(1)
    image = rng.random((4, 4))
    image /= np.sqrt((image ** 2).sum())
    kernel = rng.uniform(-1, 1, (2, 2))
    kernel /= np.sqrt((kernel ** 2).sum())
    cfg = ConvConfig(4, 2, 2, angle_bits=12)
    fmap = conv_layer(cfg, image, kernel)
    bound = 2 * 4 * math.pi * 2.0 ** -12 + 1e-9
    err = np.abs(fmap.values - conv2d_ref(image, kernel, 2)).max()
    assert err <= bound, f"conv error {err:.2e} > {bound:.2e}"
    assert fmap.min_uncompute_fidelity >= 1 - 1e-9


def check_pool_oracle():
    rng = np.random.default_rng(2)
    values = rng.uniform(-1, 1, (3, 3))
    pooled = pool_layer(PoolConfig(3, 2, 1), FeatureMap(values, 1.0, "selftest"))
    err = np.abs(pooled.values - pool_ref(values, 2, 1, "sum")).max()
    assert err <= 1e-9, f"pool error {err:.2e}"


def check_fc_formula():
    rng = np.random.default_rng(3)
    values = rng.uniform(-1, 1, (2, 2))
    weights = rng.uniform(-1, 1, (2, 2, 2))
    probs = fc_layer(FeatureMap(values, 1.0, "selftest"), FcWeights(weights))
    expected = fc_probabilities(values, weights)
    assert np.abs(probs - expected).max() <= 1e-9


def check_qae_exact_phase():
    layout = RegisterLayout([("sys", 1)])
    result = qae_estimate(Circuit().ry(math.pi / 4, 0), layout, ((0, 1),), 3,
                          method="gates")
    assert result.theta_tilde == 0.25, f"theta_tilde {result.theta_tilde}"
    assert result.confidence > 1 - 1e-9


CHECKS = [
    ("norm preservation / unitarity round-trip", check_norm_preservation),
    ("adder truth table (widths 3+4)", check_adder),
    ("multiplier truth table (widths 2x2)", check_multiplier),
    ("comparator truth table (width 2)", check_comparator),
    ("loader amplitude bound (8 bits)", check_loader_bound),
    ("convolution vs classical oracle", check_conv_oracle),
    ("pooling vs window sums", check_pool_oracle),
    ("fully connected probability formula", check_fc_formula),
    ("amplitude estimation exact phase", check_qae_exact_phase),
]


def run(verbose: bool = True) -> int:
    failures = 0
    for name, check in CHECKS:
        try:
            check()
        except AssertionError as exc:
            failures += 1
            print(f"FAIL {name}: {exc}")
        else:
            if verbose:
                print(f"PASS {name}")
    if failures:
        print(f"{failures} of {len(CHECKS)} checks failed")
    else:
        print(f"all {len(CHECKS)} checks passed")
    return 1 if failures else 0
