"""Amplitude estimation by phase estimation on the Grover iterate.

Given a state preparation circuit A with A|0...0> = sin(theta)|good> +
cos(theta)|bad>, the iterate Q = -A S1 A^dag S0 rotates the invariant plane
spanned by the good and bad components by 2*theta; its eigenphases are
+-2*theta. A t-qubit phase register driven by controlled powers Q^(2^j) and
an inverse quantum Fourier transform yields a t-bit estimate of theta/pi.

Two execution paths produce identical statistics:

* ``gates``   - the literal circuit on base qubits plus the phase register.
* ``reduced`` - the phase-register evolution computed inside the invariant
  two-dimensional subspace (the kicked phases are known exactly once theta
  is read from the prepared state). This is the fast path for pipelines
  whose full circuit would exceed the qubit or time budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .statevector import (
    Circuit,
    RegisterLayout,
    Statevector,
    init_state,
    phase_shift,
)

PHASE_REGISTER = "phase"

# Mass that lands within one grid step of the true phase, per the standard
# phase-estimation guarantee: 8 / pi^2.
MIN_CONFIDENCE = 8.0 / math.pi ** 2


@dataclass
class QaeResult:
    """Outcome of one amplitude estimation run.

    theta_tilde is the folded t-bit estimate of theta/pi in [0, 1/2].
    Outcomes y and 2^t - y encode the +-theta eigenbranches and carry equal
    probability, so the register distribution is mirror-symmetric;
    raw_outcome reports the canonical representative y = theta_tilde * 2^t.
    confidence is the folded probability mass within one grid step (2^-t)
    of theta_tilde.
    """

    theta_tilde: float
    raw_outcome: int
    confidence: float
    precision_bits: int
    distribution: np.ndarray
    folded_distribution: np.ndarray

    def amplitude_squared(self) -> float:
        return math.sin(math.pi * self.theta_tilde) ** 2


def grover_circuit(prep: Circuit, good_conditions, zero_qubits) -> Circuit:
    """Q = -A S1 A^dag S0 with S0 flipping the good subspace and S1 the
    all-zero initial state over ``zero_qubits``."""
    circ = Circuit()
    circ.reflect(tuple(good_conditions))
    circ.extend(prep.inverse())
    circ.reflect(tuple((q, 0) for q in zero_qubits))
    circ.extend(prep)
    circ.phase(-1.0)
    return circ


def qft_circuit(qubits) -> Circuit:
    """Quantum Fourier transform on the given qubits (value LSB first)."""
    qubits = list(qubits)
    t = len(qubits)
    circ = Circuit()
    for j in range(t - 1, -1, -1):
        circ.h(qubits[j])
        for m in range(j - 1, -1, -1):
            circ.gate(phase_shift(math.pi / (1 << (j - m))), qubits[j],
                      ((qubits[m], 1),))
    for i in range(t // 2):
        circ.swap(qubits[i], qubits[t - 1 - i])
    return circ


def phase_estimation_distribution(theta: float, t: int) -> np.ndarray:
    """Exact outcome distribution of t-bit phase estimation on eigenphases
    +-2*theta mixed with equal weight (the two Grover eigenbranches)."""
    dim = 1 << t
    z = np.arange(dim)

    def kernel(phi):
        delta = phi - 2.0 * np.pi * z / dim
        half = delta / 2.0
        s = np.sin(half)
        on_grid = np.abs(s) < 1e-12
        safe = np.where(on_grid, 1.0, s)
        values = np.sin(dim * half) ** 2 / (dim ** 2 * safe ** 2)
        return np.where(on_grid, 1.0, values)

    return 0.5 * (kernel(2.0 * theta) + kernel(-2.0 * theta))


def fold_distribution(distribution: np.ndarray) -> np.ndarray:
    """Map outcomes y and 2^t - y onto one estimate; bins 0..2^(t-1)."""
    dim = len(distribution)
    half = dim // 2
    folded = np.zeros(half + 1)
    folded[0] = distribution[0]
    folded[half] = distribution[half]
    for z in range(1, half):
        folded[z] = distribution[z] + distribution[dim - z]
    return folded


def result_from_distribution(distribution: np.ndarray, t: int) -> QaeResult:
    folded = fold_distribution(distribution)
    modal = int(np.argmax(folded))
    lo = max(modal - 1, 0)
    hi = min(modal + 1, len(folded) - 1)
    confidence = float(folded[lo:hi + 1].sum())
    return QaeResult(
        theta_tilde=modal / (1 << t),
        raw_outcome=modal,
        confidence=confidence,
        precision_bits=t,
        distribution=distribution,
        folded_distribution=folded,
    )


def qae_estimate(prep: Circuit, layout: RegisterLayout, good_conditions, t: int,
                 *, zero_qubits=None, method: str = "reduced",
                 shots: int | None = None, seed: int = 0,
                 max_qubits: int | None = None,
                 requested_by: str | None = None) -> QaeResult:
    """Estimate the amplitude angle of ``prep``'s good component.

    ``good_conditions`` are (qubit, bit) pairs marking the good subspace.
    ``zero_qubits`` defaults to every qubit of the layout (the all-zero
    initial state); coherent callers restrict it to the non-index qubits.
    With ``shots`` set, the returned statistics come from a seeded
    multinomial draw instead of the exact distribution.
    """
    if t < 1:
        raise ValueError(f"precision bits must be >= 1, got {t}")
    if method == "reduced":
        state = _prepared_state(prep, layout, max_qubits, requested_by)
        p_good = state.probability(good_conditions)
        theta = math.asin(math.sqrt(min(max(p_good, 0.0), 1.0)))
        distribution = phase_estimation_distribution(theta, t)
    elif method == "gates":
        state = phase_estimation_state(prep, layout, good_conditions, t,
                                       zero_qubits=zero_qubits,
                                       max_qubits=max_qubits,
                                       requested_by=requested_by)
        distribution = state.register_distribution(PHASE_REGISTER)
    else:
        raise ValueError(f"unknown qae method {method!r}")

    if shots is not None:
        rng = np.random.default_rng(seed)
        counts = rng.multinomial(shots, distribution / distribution.sum())
        distribution = counts / shots
    return result_from_distribution(np.asarray(distribution, dtype=float), t)


def phase_estimation_state(prep: Circuit, layout: RegisterLayout,
                           good_conditions, t: int, *, zero_qubits=None,
                           max_qubits: int | None = None,
                           requested_by: str | None = None) -> Statevector:
    """Run the literal phase-estimation circuit and return the joint state.

    The phase register is appended above the layout's qubits, so base gate
    indices are unchanged. Coherent callers read per-branch conditional
    distributions from the returned state.
    """
    ext = layout.extended(PHASE_REGISTER, t)
    kwargs = {"requested_by": requested_by or "amplitude estimation"}
    if max_qubits is not None:
        kwargs["max_qubits"] = max_qubits
    state = init_state(ext, **kwargs)
    prep.apply(state)
    if zero_qubits is None:
        zero_qubits = range(layout.num_qubits)
    iterate = grover_circuit(prep, good_conditions, zero_qubits)
    phase_qubits = ext.qubits(PHASE_REGISTER)
    for pq in phase_qubits:
        state.apply_gate(np.array([[1, 1], [1, -1]]) / math.sqrt(2), pq)
    for j, pq in enumerate(phase_qubits):
        for _ in range(1 << j):
            iterate.apply(state, extra_controls=((pq, 1),))
    qft_circuit(phase_qubits).inverse().apply(state)
    return state


def _prepared_state(prep, layout, max_qubits, requested_by):
    kwargs = {"requested_by": requested_by or "amplitude estimation"}
    if max_qubits is not None:
        kwargs["max_qubits"] = max_qubits
    state = init_state(layout, **kwargs)
    prep.apply(state)
    return state
