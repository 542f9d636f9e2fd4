"""Dense statevector simulation over named qubit registers.

Basis convention: qubit ``q`` is bit ``q`` of the basis index, so a register
at offset ``o`` with width ``w`` holds the unsigned integer
``(index >> o) & (2**w - 1)`` (least significant bit first).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Default ceiling on simulated qubits; 26 qubits of complex doubles is 1 GiB.
DEFAULT_QUBIT_CAP = 26

ATOL_AMPLITUDE = 1e-10
ATOL_PROBABILITY = 1e-9
ATOL_UNITARY = 1e-12


class QubitBudgetError(RuntimeError):
    """A register layout asked for more qubits than the configured cap."""


class RegisterError(ValueError):
    """Unknown register, out-of-range value, or bad qubit arguments."""


# ---------------------------------------------------------------------------
# Registers


@dataclass(frozen=True)
class Register:
    """A named, contiguous block of qubits holding an unsigned integer."""

    name: str
    offset: int
    width: int

    def qubits(self) -> tuple[int, ...]:
        return tuple(range(self.offset, self.offset + self.width))

    def max_value(self) -> int:
        return (1 << self.width) - 1

    def conditions(self, value: int) -> tuple[tuple[int, int], ...]:
        """Qubit/bit pairs pinning this register to ``value``."""
        if value < 0 or value > self.max_value():
            raise RegisterError(
                f"value {value} does not fit in register {self.name!r} "
                f"of width {self.width}"
            )
        return tuple(
            (self.offset + b, (value >> b) & 1) for b in range(self.width)
        )

    def extract(self, index: int) -> int:
        return (index >> self.offset) & self.max_value()


class RegisterLayout:
    """Ordered, disjoint register map over one statevector."""

    def __init__(self, specs):
        """``specs`` is a sequence of (name, width) pairs packed from qubit 0."""
        self._registers: dict[str, Register] = {}
        offset = 0
        for name, width in specs:
            if width < 0:
                raise RegisterError(f"register {name!r} has negative width")
            if name in self._registers:
                raise RegisterError(f"duplicate register name {name!r}")
            self._registers[name] = Register(name, offset, width)
            offset += width
        self.num_qubits = offset

    def __contains__(self, name) -> bool:
        return name in self._registers

    def __iter__(self):
        return iter(self._registers.values())

    def register(self, name: str) -> Register:
        try:
            return self._registers[name]
        except KeyError:
            raise RegisterError(f"unknown register {name!r}") from None

    def qubits(self, name: str) -> tuple[int, ...]:
        return self.register(name).qubits()

    def names(self) -> list[str]:
        return list(self._registers)

    def conditions(self, assignments: dict[str, int]) -> tuple[tuple[int, int], ...]:
        conds: list[tuple[int, int]] = []
        for name, value in assignments.items():
            conds.extend(self.register(name).conditions(value))
        return tuple(conds)

    def extended(self, name: str, width: int) -> "RegisterLayout":
        """New layout with an extra register appended above the current qubits."""
        specs = [(reg.name, reg.width) for reg in self] + [(name, width)]
        return RegisterLayout(specs)


# ---------------------------------------------------------------------------
# Gate matrices

H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


def rotation(theta: float) -> np.ndarray:
    """Real rotation with R(theta)|0> = cos(theta)|0> + sin(theta)|1>."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def phase_shift(phi: float) -> np.ndarray:
    return np.array([[1, 0], [0, complex(math.cos(phi), math.sin(phi))]])


def check_unitary(gate: np.ndarray) -> None:
    dim = gate.shape[0]
    if gate.shape != (dim, dim) or dim not in (2, 4):
        raise RegisterError(f"gate must be 2x2 or 4x4, got shape {gate.shape}")
    err = np.abs(gate.conj().T @ gate - np.eye(dim)).max()
    if err > ATOL_UNITARY * 100:
        raise RegisterError(f"gate is not unitary (deviation {err:.3e})")


_ARANGE_CACHE: dict[int, np.ndarray] = {}


def _arange(n: int) -> np.ndarray:
    arr = _ARANGE_CACHE.get(n)
    if arr is None:
        arr = np.arange(n, dtype=np.int64)
        if n <= 1 << 22:
            _ARANGE_CACHE[n] = arr
    return arr


# ---------------------------------------------------------------------------
# Statevector


class Statevector:
    """Dense complex amplitude vector over the qubits of a layout.

    Single-writer: every operation mutates the amplitudes in place.
    """

    def __init__(self, layout: RegisterLayout, *, max_qubits: int = DEFAULT_QUBIT_CAP,
                 requested_by: str | None = None):
        if layout.num_qubits > max_qubits:
            who = f" (requested by {requested_by})" if requested_by else ""
            raise QubitBudgetError(
                f"layout needs {layout.num_qubits} qubits, cap is {max_qubits}{who}"
            )
        self.layout = layout
        self.amplitudes = np.zeros(1 << layout.num_qubits, dtype=complex)
        self.amplitudes[0] = 1.0

    @property
    def num_qubits(self) -> int:
        return self.layout.num_qubits

    # -- gate application ---------------------------------------------------

    def _check_qubits(self, targets, controls):
        seen = set()
        for q in targets:
            if not 0 <= q < self.num_qubits:
                raise RegisterError(f"target qubit {q} out of range")
            if q in seen:
                raise RegisterError(f"repeated target qubit {q}")
            seen.add(q)
        for q, b in controls:
            if not 0 <= q < self.num_qubits:
                raise RegisterError(f"control qubit {q} out of range")
            if q in seen:
                raise RegisterError(f"qubit {q} is both target and control")
            if b not in (0, 1):
                raise RegisterError(f"control bit must be 0 or 1, got {b}")

    def apply_gate(self, gate, target, controls=()) -> "Statevector":
        """Apply a 2x2 gate (int target) or 4x4 gate (pair of targets).

        ``controls`` is a sequence of (qubit, required_bit); the gate acts
        only on the subspace where every control matches.
        """
        gate = np.asarray(gate, dtype=complex)
        check_unitary(gate)
        if gate.shape == (2, 2):
            self._apply_single(gate, int(target), tuple(controls))
        else:
            t0, t1 = target
            self._apply_pair(gate, int(t0), int(t1), tuple(controls))
        return self

    def _control_filter(self, indices, controls):
        for q, b in controls:
            indices = indices[((indices >> q) & 1) == b]
        return indices

    def _apply_single(self, gate, target, controls):
        self._check_qubits((target,), controls)
        amp = self.amplitudes
        half = _arange(len(amp) >> 1)
        low_mask = (1 << target) - 1
        i0 = ((half >> target) << (target + 1)) | (half & low_mask)
        i0 = self._control_filter(i0, controls)
        i1 = i0 | (1 << target)
        a0 = amp[i0]
        a1 = amp[i1]
        amp[i0] = gate[0, 0] * a0 + gate[0, 1] * a1
        amp[i1] = gate[1, 0] * a0 + gate[1, 1] * a1

    def _apply_pair(self, gate, lo, hi, controls):
        """4x4 gate; gate basis index is bit(lo) + 2*bit(hi)."""
        self._check_qubits((lo, hi), controls)
        amp = self.amplitudes
        quarter = _arange(len(amp) >> 2)
        qa, qb = sorted((lo, hi))
        mask_a = (1 << qa) - 1
        mask_b = (1 << (qb - 1)) - 1
        spread = ((quarter >> (qb - 1)) << (qb + 1)) | (
            ((quarter & mask_b) >> qa) << (qa + 1)
        ) | (quarter & mask_a)
        base = self._control_filter(spread, controls)
        rows = [
            base,
            base | (1 << lo),
            base | (1 << hi),
            base | (1 << lo) | (1 << hi),
        ]
        olds = [amp[r] for r in rows]
        for i, r in enumerate(rows):
            amp[r] = sum(gate[i, j] * olds[j] for j in range(4))

    # -- diagonal operations --------------------------------------------------

    def _condition_mask(self, conditions) -> np.ndarray:
        idx = _arange(len(self.amplitudes))
        mask = np.ones(len(self.amplitudes), dtype=bool)
        for q, b in conditions:
            if not 0 <= q < self.num_qubits:
                raise RegisterError(f"condition qubit {q} out of range")
            mask &= ((idx >> q) & 1) == b
        return mask

    def phase_flip(self, conditions) -> "Statevector":
        """Multiply by -1 every amplitude whose qubits match all conditions."""
        self.amplitudes[self._condition_mask(conditions)] *= -1.0
        return self

    def scale_subspace(self, conditions, factor) -> "Statevector":
        if conditions:
            self.amplitudes[self._condition_mask(conditions)] *= factor
        else:
            self.amplitudes *= factor
        return self

    # -- measurement statistics ----------------------------------------------

    def probability(self, conditions) -> float:
        amp = self.amplitudes[self._condition_mask(conditions)]
        return float(np.real(amp.conj() @ amp))

    def register_probability(self, register: str, value: int) -> float:
        """Probability that measuring ``register`` yields ``value``."""
        return self.probability(self.layout.register(register).conditions(value))

    def register_distribution(self, register: str) -> np.ndarray:
        reg = self.layout.register(register)
        probs = np.abs(self.amplitudes) ** 2
        idx = _arange(len(probs))
        values = (idx >> reg.offset) & reg.max_value()
        return np.bincount(values, weights=probs, minlength=1 << reg.width)

    def sample(self, register: str, shots: int, rng_seed: int) -> dict[int, int]:
        """Multinomial histogram of register values; deterministic per seed."""
        if shots < 1:
            raise RegisterError(f"shots must be >= 1, got {shots}")
        probs = self.register_distribution(register)
        probs = probs / probs.sum()
        rng = np.random.default_rng(rng_seed)
        counts = rng.multinomial(shots, probs)
        return {int(v): int(c) for v, c in enumerate(counts) if c}

    def assert_disentangled(self, registers, expected_value: int = 0) -> float:
        """Probability mass on the given registers jointly equal to a value.

        ``expected_value`` spans the concatenated registers, first name
        holding the lowest-order bits. Callers check the result against
        their fidelity threshold.
        """
        conds: list[tuple[int, int]] = []
        shift = 0
        for name in registers:
            reg = self.layout.register(name)
            conds.extend(reg.conditions((expected_value >> shift) & reg.max_value()))
            shift += reg.width
        if expected_value >> shift:
            raise RegisterError("expected_value wider than the named registers")
        return self.probability(conds)

    def norm_error(self) -> float:
        return abs(float(np.real(self.amplitudes.conj() @ self.amplitudes)) - 1.0)


def init_state(layout: RegisterLayout, *, max_qubits: int = DEFAULT_QUBIT_CAP,
               requested_by: str | None = None) -> Statevector:
    """All-zeros state |0...0> over the layout, subject to the qubit cap."""
    return Statevector(layout, max_qubits=max_qubits, requested_by=requested_by)


def apply_gate(state: Statevector, gate, target, controls=()) -> Statevector:
    return state.apply_gate(gate, target, controls)


# ---------------------------------------------------------------------------
# Circuits: recorded gate sequences with exact inverses


@dataclass(frozen=True)
class GateOp:
    matrix: np.ndarray
    target: object  # int or (int, int)
    controls: tuple = ()


@dataclass(frozen=True)
class ReflectOp:
    """Sign flip (-1) on the subspace where all conditions hold."""

    conditions: tuple


@dataclass(frozen=True)
class PhaseOp:
    """Global phase factor; becomes a conditional phase under controls."""

    factor: complex


@dataclass
class Circuit:
    """A reversible sequence of gate, reflection, and phase operations."""

    ops: list = field(default_factory=list)

    def gate(self, matrix, target, controls=()) -> "Circuit":
        self.ops.append(GateOp(np.asarray(matrix, dtype=complex), target, tuple(controls)))
        return self

    def x(self, target, controls=()) -> "Circuit":
        return self.gate(X, target, controls)

    def h(self, target, controls=()) -> "Circuit":
        return self.gate(H, target, controls)

    def ry(self, theta, target, controls=()) -> "Circuit":
        return self.gate(rotation(theta), target, controls)

    def swap(self, q0, q1, controls=()) -> "Circuit":
        return self.gate(SWAP, (q0, q1), controls)

    def reflect(self, conditions) -> "Circuit":
        self.ops.append(ReflectOp(tuple(conditions)))
        return self

    def phase(self, factor) -> "Circuit":
        self.ops.append(PhaseOp(complex(factor)))
        return self

    def extend(self, other: "Circuit") -> "Circuit":
        self.ops.extend(other.ops)
        return self

    def inverse(self) -> "Circuit":
        inv = Circuit()
        for op in reversed(self.ops):
            if isinstance(op, GateOp):
                inv.ops.append(GateOp(op.matrix.conj().T, op.target, op.controls))
            elif isinstance(op, ReflectOp):
                inv.ops.append(op)
            else:
                inv.ops.append(PhaseOp(op.factor.conjugate()))
        return inv

    def apply(self, state: Statevector, extra_controls=()) -> Statevector:
        extra = tuple(extra_controls)
        for op in self.ops:
            if isinstance(op, GateOp):
                state.apply_gate(op.matrix, op.target, op.controls + extra)
            elif isinstance(op, ReflectOp):
                state.phase_flip(op.conditions + extra)
            else:
                state.scale_subspace(extra, op.factor)
        return state

    def __len__(self) -> int:
        return len(self.ops)


def build_uniform(qubits, count: int) -> Circuit:
    """Circuit mapping |0...0> to a uniform superposition of 0..count-1.

    Works for any count up to 2**len(qubits); reduces to Hadamards when
    count is a power of two. Qubits are listed least significant first.
    """
    qubits = list(qubits)
    capacity = 1 << len(qubits)
    if count < 1 or count > capacity:
        raise RegisterError(
            f"cannot spread {count} values over {len(qubits)} qubits"
        )
    circ = Circuit()
    _uniform_rec(circ, qubits, count, ())
    return circ


def _uniform_rec(circ, qubits, count, controls):
    if count <= 1 or not qubits:
        return
    top = qubits[-1]
    half = 1 << (len(qubits) - 1)
    if count <= half:
        _uniform_rec(circ, qubits[:-1], count, controls)
        return
    theta = math.acos(math.sqrt(half / count))
    circ.ry(theta, top, controls)
    zero_branch = controls + ((top, 0),)
    for q in qubits[:-1]:
        circ.h(q, zero_branch)
    _uniform_rec(circ, qubits[:-1], count - half, controls + ((top, 1),))
