import math

import numpy as np
import pytest

from strideqcnn.statevector import (
    H,
    X,
    Circuit,
    QubitBudgetError,
    RegisterError,
    RegisterLayout,
    Statevector,
    build_uniform,
    init_state,
    rotation,
)


def simple_layout(n, name="r"):
    return RegisterLayout([(name, n)])


def test_init_state_is_all_zeros():
    state = init_state(simple_layout(3))
    assert np.allclose(state.amplitudes, [1, 0, 0, 0, 0, 0, 0, 0])
    state = init_state(simple_layout(1))
    assert np.allclose(state.amplitudes, [1, 0])


def test_qubit_cap_enforced():
    with pytest.raises(QubitBudgetError, match="27"):
        init_state(simple_layout(27))
    with pytest.raises(QubitBudgetError, match="pooling"):
        init_state(simple_layout(27), requested_by="pooling layer")
    # raising the cap is allowed explicitly
    init_state(simple_layout(5), max_qubits=5)


def test_layout_registers_disjoint_and_packed():
    layout = RegisterLayout([("a", 2), ("b", 3), ("c", 0), ("d", 1)])
    assert layout.qubits("a") == (0, 1)
    assert layout.qubits("b") == (2, 3, 4)
    assert layout.qubits("c") == ()
    assert layout.qubits("d") == (5,)
    assert layout.num_qubits == 6
    with pytest.raises(RegisterError):
        layout.register("nope")
    with pytest.raises(RegisterError):
        RegisterLayout([("a", 1), ("a", 2)])


def test_hadamard_on_zero():
    state = init_state(simple_layout(1))
    state.apply_gate(H, 0)
    assert np.allclose(state.amplitudes, [1 / math.sqrt(2), 1 / math.sqrt(2)])


def test_rotation_matches_three_four_five():
    theta = math.acos(0.6)
    state = init_state(simple_layout(1))
    state.apply_gate(rotation(theta), 0)
    assert np.allclose(state.amplitudes, [0.6, 0.8])


def test_cnot_truth_table():
    # X controlled on (q0 = 1) applied to |10> (q1=1, q0=0) leaves it alone;
    # applied to q0=1 states it flips q1.
    layout = simple_layout(2)
    state = init_state(layout)
    state.apply_gate(X, 0)  # |01> -> index 1
    state.apply_gate(X, 1, controls=[(0, 1)])
    assert np.argmax(np.abs(state.amplitudes)) == 3
    state = init_state(layout)
    state.apply_gate(X, 1)  # index 2
    state.apply_gate(X, 1, controls=[(0, 1)])  # control fails
    assert np.argmax(np.abs(state.amplitudes)) == 2


def test_overlapping_target_and_control_rejected():
    state = init_state(simple_layout(2))
    with pytest.raises(RegisterError, match="both target and control"):
        state.apply_gate(X, 0, controls=[(0, 1)])


def test_gate_must_be_unitary():
    state = init_state(simple_layout(1))
    with pytest.raises(RegisterError, match="unitary"):
        state.apply_gate(np.array([[1, 0], [0, 2.0]]), 0)


def test_two_qubit_swap_gate():
    layout = simple_layout(3)
    state = init_state(layout)
    state.apply_gate(X, 0)
    Circuit().swap(0, 2).apply(state)
    assert np.argmax(np.abs(state.amplitudes)) == 4
    # controlled swap: control not met leaves state alone
    state = init_state(layout)
    state.apply_gate(X, 0)
    Circuit().swap(0, 1, controls=[(2, 1)]).apply(state)
    assert np.argmax(np.abs(state.amplitudes)) == 1


def test_register_probability_uniform_and_basis():
    layout = simple_layout(2)
    state = init_state(layout)
    state.apply_gate(H, 0)
    state.apply_gate(H, 1)
    assert state.register_probability("r", 3) == pytest.approx(0.25)
    state = init_state(layout)
    assert state.register_probability("r", 0) == pytest.approx(1.0)
    with pytest.raises(RegisterError):
        state.register_probability("r", 4)


def test_sample_deterministic_and_concentrated():
    layout = simple_layout(1)
    state = init_state(layout)
    state.apply_gate(X, 0)
    assert state.sample("r", 100, rng_seed=5) == {1: 100}

    state = init_state(layout)
    state.apply_gate(H, 0)
    hist = state.sample("r", 10 ** 6, rng_seed=7)
    sigma = math.sqrt(10 ** 6 * 0.25)
    assert abs(hist[0] - 5 * 10 ** 5) < 5 * sigma
    assert hist == state.sample("r", 10 ** 6, rng_seed=7)
    with pytest.raises(RegisterError):
        state.sample("r", 0, rng_seed=1)


def random_circuit(layout, rng, depth=20):
    circ = Circuit()
    n = layout.num_qubits
    for _ in range(depth):
        kind = rng.integers(0, 3)
        target = int(rng.integers(0, n))
        others = [q for q in range(n) if q != target]
        controls = ()
        if rng.random() < 0.5 and others:
            q = int(rng.choice(others))
            controls = ((q, int(rng.integers(0, 2))),)
        if kind == 0:
            circ.h(target, controls)
        elif kind == 1:
            circ.x(target, controls)
        else:
            circ.ry(rng.uniform(0, math.pi), target, controls)
    return circ


def test_norm_preserved_and_roundtrip_identity():
    rng = np.random.default_rng(11)
    layout = simple_layout(5)
    for _ in range(10):
        circ = random_circuit(layout, rng)
        state = init_state(layout)
        circ.apply(state)
        assert state.norm_error() < 1e-10
        circ.inverse().apply(state)
        fidelity = state.assert_disentangled(["r"], 0)
        assert fidelity >= 1 - 1e-9


def test_skipping_one_inverse_gate_breaks_fidelity():
    layout = simple_layout(3)
    circ = Circuit().h(0).ry(0.7, 1, ((0, 1),)).x(2, ((1, 1),))
    state = init_state(layout)
    circ.apply(state)
    broken = Circuit()
    broken.ops = circ.inverse().ops[:-1]  # drop the final inverse gate
    broken.apply(state)
    assert state.assert_disentangled(["r"], 0) < 1 - 1e-6


def test_controlled_gate_leaves_other_subspace_untouched():
    rng = np.random.default_rng(3)
    layout = simple_layout(4)
    state = init_state(layout)
    for q in range(4):
        state.apply_gate(H, q)
    random_circuit(layout, rng).apply(state)
    before = state.amplitudes.copy()
    state.apply_gate(rotation(0.4), 2, controls=[(0, 1), (1, 0)])
    idx = np.arange(16)
    untouched = ((idx >> 0) & 1 == 0) | ((idx >> 1) & 1 == 1)
    assert np.array_equal(state.amplitudes[untouched], before[untouched])
    assert not np.allclose(state.amplitudes[~untouched], before[~untouched])


def test_gate_application_is_linear():
    rng = np.random.default_rng(9)
    layout = simple_layout(4)
    v = rng.normal(size=16) + 1j * rng.normal(size=16)
    w = rng.normal(size=16) + 1j * rng.normal(size=16)
    v /= np.linalg.norm(v)
    w /= np.linalg.norm(w)
    alpha, beta = 0.3 + 0.1j, 0.2 - 0.7j

    def run(vec):
        state = init_state(layout)
        state.amplitudes[:] = vec
        state.apply_gate(rotation(1.1), 1, controls=[(3, 1)])
        state.apply_gate(H, 0)
        return state.amplitudes.copy()

    combined = run(alpha * v + beta * w)
    assert np.allclose(combined, alpha * run(v) + beta * run(w), atol=1e-10)


def test_phase_flip_and_scale_subspace():
    layout = simple_layout(2)
    state = init_state(layout)
    state.apply_gate(H, 0)
    state.phase_flip([(0, 0)])
    assert state.amplitudes[0] == pytest.approx(-1 / math.sqrt(2))
    assert state.amplitudes[1] == pytest.approx(1 / math.sqrt(2))
    state.scale_subspace([(0, 1)], 1j)
    assert state.amplitudes[1] == pytest.approx(1j / math.sqrt(2))


def test_assert_disentangled_multi_register_order():
    layout = RegisterLayout([("lo", 2), ("hi", 2)])
    state = init_state(layout)
    state.apply_gate(X, 1)  # lo = 2
    state.apply_gate(X, 2)  # hi = 1
    # expected value spans lo (low bits) then hi
    assert state.assert_disentangled(["lo", "hi"], 2 + (1 << 2)) == pytest.approx(1.0)
    assert state.assert_disentangled(["lo"], 2) == pytest.approx(1.0)
    assert state.assert_disentangled(["lo", "hi"], 0) == pytest.approx(0.0)


@pytest.mark.parametrize("count,width", [(1, 2), (2, 2), (3, 2), (4, 2),
                                         (3, 3), (5, 3), (6, 3), (7, 3), (8, 3)])
def test_build_uniform_exact_superposition(count, width):
    layout = simple_layout(width)
    state = init_state(layout)
    build_uniform(layout.qubits("r"), count).apply(state)
    dist = state.register_distribution("r")
    expected = np.zeros(1 << width)
    expected[:count] = 1.0 / count
    assert np.allclose(dist, expected, atol=1e-12)
    # amplitudes are real positive and equal
    amps = state.amplitudes[:count]
    assert np.allclose(amps, 1 / math.sqrt(count), atol=1e-12)


def test_build_uniform_overflow_rejected():
    layout = simple_layout(2)
    with pytest.raises(RegisterError):
        build_uniform(layout.qubits("r"), 5)
