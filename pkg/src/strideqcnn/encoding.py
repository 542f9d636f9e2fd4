"""Classical-to-quantum data path.

Pixel matrices are Frobenius-normalized, mapped to rotation angles via
arccos, truncated to L binary fraction bits of angle/pi, and loaded into
amplitudes by controlled rotations keyed on an index register. The QRAM
oracle is emulated by per-entry multi-controlled X networks: the simulator
verifies semantics, not hardware cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .statevector import Circuit, RegisterError, RegisterLayout, rotation


class DegenerateInputError(ValueError):
    """All-zero image or kernel cannot be normalized."""


# ---------------------------------------------------------------------------
# Fixed-point angles


@dataclass(frozen=True)
class FixedPointAngle:
    """An angle in [0, pi] stored as ``width`` binary fraction bits of angle/pi."""

    bits: int
    width: int

    @classmethod
    def from_value(cls, value: float, width: int) -> "FixedPointAngle":
        """Quantize arccos(value); truncation toward zero of angle/pi."""
        if not -1.0 <= value <= 1.0:
            raise ValueError(f"encodable values lie in [-1, 1], got {value}")
        if width < 1:
            raise ValueError(f"angle width must be >= 1, got {width}")
        fraction = math.acos(value) / math.pi
        bits = min(int(fraction * (1 << width)), (1 << width) - 1)
        return cls(bits, width)

    def reconstruct(self) -> float:
        return self.bits / (1 << self.width) * math.pi

    def bit(self, position: int) -> int:
        """The coefficient of 2**-position * pi, position in 1..width."""
        if not 1 <= position <= self.width:
            raise ValueError(f"bit position {position} outside 1..{self.width}")
        return (self.bits >> (self.width - position)) & 1

    def bitstring(self) -> str:
        return format(self.bits, f"0{self.width}b")


def angle_of(value: float, width: int) -> FixedPointAngle:
    return FixedPointAngle.from_value(value, width)


# ---------------------------------------------------------------------------
# Classical tensors


class ImageTensor:
    """Square matrix of raw pixel values with its Frobenius norm."""

    def __init__(self, pixels):
        pixels = np.asarray(pixels, dtype=float)
        if pixels.ndim != 2 or pixels.shape[0] != pixels.shape[1]:
            raise ValueError(f"image must be square, got shape {pixels.shape}")
        self.pixels = pixels
        self.side = pixels.shape[0]
        self.norm = float(np.sqrt((pixels ** 2).sum()))

    def normalized(self) -> np.ndarray:
        if self.norm == 0.0:
            raise DegenerateInputError("all-zero image has no Frobenius normalization")
        return self.pixels / self.norm


class KernelWeights:
    """Square filter matrix; normalized entries lie in [-1, 1]."""

    def __init__(self, weights):
        weights = np.asarray(weights, dtype=float)
        if weights.ndim != 2 or weights.shape[0] != weights.shape[1]:
            raise ValueError(f"kernel must be square, got shape {weights.shape}")
        self.weights = weights
        self.side = weights.shape[0]
        self.norm = float(np.sqrt((weights ** 2).sum()))

    def normalized(self) -> np.ndarray:
        if self.norm == 0.0:
            raise DegenerateInputError("all-zero kernel has no Frobenius normalization")
        return self.weights / self.norm


def normalize(image: ImageTensor) -> np.ndarray:
    """Frobenius-normalized pixel matrix; unit sum of squares."""
    return image.normalized()


# ---------------------------------------------------------------------------
# QRAM-backed angle tables


class QramTable:
    """Map from basis index to a fixed-point rotation angle.

    Emulates values pre-stored in quantum random access memory; immutable
    after construction and freely shareable between circuits.
    """

    def __init__(self, entries: dict[int, FixedPointAngle], width: int):
        for idx, ang in entries.items():
            if idx < 0:
                raise RegisterError(f"negative table index {idx}")
            if ang.width != width:
                raise ValueError(
                    f"entry {idx} has width {ang.width}, table width {width}"
                )
        self.entries = dict(entries)
        self.width = width

    @classmethod
    def from_values(cls, values: dict[int, float], width: int) -> "QramTable":
        return cls(
            {i: FixedPointAngle.from_value(v, width) for i, v in values.items()},
            width,
        )

    def angle(self, index: int) -> float:
        return self.entries[index].reconstruct()

    def max_index(self) -> int:
        return max(self.entries) if self.entries else 0

    def save(self, path) -> None:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(f"# width {self.width}\n")
            for idx in sorted(self.entries):
                fh.write(f"{idx}, {self.entries[idx].bitstring()}\n")

    @classmethod
    def load(cls, path) -> "QramTable":
        width = None
        entries: dict[int, FixedPointAngle] = {}
        with open(path, encoding="ascii") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    width = int(line.split()[-1])
                    continue
                idx_text, bits_text = (part.strip() for part in line.split(","))
                entries[int(idx_text)] = FixedPointAngle(
                    int(bits_text, 2), len(bits_text)
                )
        if width is None:
            width = next(iter(entries.values())).width
        return cls(entries, width)


def _index_conditions(layout: RegisterLayout, index_registers, index: int):
    """Conditions pinning concatenated registers (first = low bits) to ``index``."""
    conds = []
    shift = 0
    for name in index_registers:
        reg = layout.register(name)
        conds.extend(reg.conditions((index >> shift) & reg.max_value()))
        shift += reg.width
    if index >> shift:
        raise RegisterError(
            f"index {index} wider than registers {list(index_registers)}"
        )
    return tuple(conds)


def qram_oracle_circuit(layout: RegisterLayout, index_registers, target: str,
                        table: QramTable) -> Circuit:
    """Oracle XOR-ing table[index] into the target register on every branch.

    One multi-controlled X per set bit per entry; self-inverse. The target
    register width must equal the table width.
    """
    reg = layout.register(target)
    if reg.width != table.width:
        raise RegisterError(
            f"target {target!r} width {reg.width} != table width {table.width}"
        )
    total = sum(layout.register(n).width for n in index_registers)
    if table.max_index() >= (1 << total):
        raise RegisterError(
            f"table index {table.max_index()} outside the "
            f"{total}-qubit index range"
        )
    circ = Circuit()
    for index in sorted(table.entries):
        conds = _index_conditions(layout, index_registers, index)
        bits = table.entries[index].bits
        for b in range(reg.width):
            if (bits >> b) & 1:
                circ.x(reg.offset + b, conds)
    return circ


def loader_circuit(layout: RegisterLayout, index_registers, scratch: str,
                   data_qubit: int, table: QramTable, controls=()) -> Circuit:
    """Keyed amplitude loader: |m>|0>|0> -> |m>|0>(cos a_m|0> + sin a_m|1>).

    QRAM oracle into the scratch register, one rotation R(pi/2**l) per
    scratch bit l onto the data qubit, then the inverse oracle. The scratch
    returns to |0> on every branch; ``controls`` gate only the rotations
    (the oracle and its inverse cancel regardless).
    """
    scratch_reg = layout.register(scratch)
    oracle = qram_oracle_circuit(layout, index_registers, scratch, table)
    circ = Circuit()
    circ.extend(oracle)
    width = scratch_reg.width
    for position in range(1, width + 1):
        qubit = scratch_reg.offset + (width - position)
        circ.ry(math.pi / (1 << position), data_qubit,
                tuple(controls) + ((qubit, 1),))
    circ.extend(oracle.inverse())
    return circ


def fused_loader_circuit(layout: RegisterLayout, index_registers,
                         data_qubit: int, angles: dict[int, float],
                         controls=()) -> Circuit:
    """Loader with the scratch register folded away.

    Applies R(angle[m]) to the data qubit directly conditioned on the index
    value m. Identical action to :func:`loader_circuit` on the index and
    data qubits (the oracle is a basis permutation and the bitwise rotations
    commute), without allocating scratch qubits.
    """
    circ = Circuit()
    for index in sorted(angles):
        conds = _index_conditions(layout, index_registers, index)
        circ.ry(angles[index], data_qubit, tuple(controls) + conds)
    return circ


def loader_angles(table: QramTable) -> dict[int, float]:
    """Reconstructed (quantized) rotation angles of a table, keyed by index."""
    return {i: a.reconstruct() for i, a in table.entries.items()}
