"""Reversible arithmetic circuits on basis-encoded registers.

All builders return :class:`~strideqcnn.statevector.Circuit` objects made of
X/CNOT/Toffoli-style gates, so every circuit composes, controls, and inverts
exactly. Values are unsigned integers, least significant bit first.
"""

from __future__ import annotations

from .statevector import Circuit, RegisterError, RegisterLayout, Statevector


def build_constant_load(layout: RegisterLayout, register: str, value: int) -> Circuit:
    """X gates flipping a zeroed register to the binary pattern of ``value``."""
    reg = layout.register(register)
    if value < 0 or value > reg.max_value():
        raise RegisterError(
            f"value {value} does not fit register {register!r} (width {reg.width})"
        )
    circ = Circuit()
    for b in range(reg.width):
        if (value >> b) & 1:
            circ.x(reg.offset + b)
    return circ


def build_stride_load(layout: RegisterLayout, register: str, stride: int) -> Circuit:
    """Load a stride value into its register; strides must be positive."""
    if stride < 1:
        raise RegisterError(f"stride must be a positive integer, got {stride}")
    return build_constant_load(layout, register, stride)


def load_stride(state: Statevector, register: str, stride: int) -> Statevector:
    return build_stride_load(state.layout, register, stride).apply(state)


def _add_power(circ: Circuit, out_qubits, k: int, controls) -> None:
    """out += 2**k (mod 2**len(out_qubits)) via a multi-controlled X cascade."""
    w = len(out_qubits)
    for j in range(w - 1, k, -1):
        chain = tuple((out_qubits[i], 1) for i in range(k, j))
        circ.x(out_qubits[j], tuple(controls) + chain)
    circ.x(out_qubits[k], tuple(controls))


def build_adder(layout: RegisterLayout, a: str, b: str, carry_qubit: int) -> Circuit:
    """Ripple-carry adder: |a>|b> -> |a>|a+b mod 2**width(b)>.

    Cuccaro MAJ/UMA ladder with one explicit carry ancilla that is returned
    to |0>. ``b`` may be wider than ``a``; the carry then propagates into the
    high bits of ``b``. With width(b) >= width(a) + 1 the sum never wraps.
    """
    qa = layout.qubits(a)
    qb = layout.qubits(b)
    if len(qb) < len(qa):
        raise RegisterError(
            f"adder target {b!r} (width {len(qb)}) narrower than source {a!r} "
            f"(width {len(qa)})"
        )
    circ = Circuit()
    n = len(qa)
    if n == 0:
        return circ
    c = carry_qubit

    def maj(x, y, z):
        circ.x(y, ((z, 1),))
        circ.x(x, ((z, 1),))
        circ.x(z, ((x, 1), (y, 1)))

    def uma(x, y, z):
        circ.x(z, ((x, 1), (y, 1)))
        circ.x(x, ((z, 1),))
        circ.x(y, ((x, 1),))

    chain = [c] + list(qa)
    for i in range(n):
        maj(chain[i], qb[i], qa[i])
    if len(qb) > n:
        # carry-out sits on the top bit of a mid-ladder; ripple it upward
        _add_power(circ, list(qb[n:]), 0, ((qa[n - 1], 1),))
    for i in reversed(range(n)):
        uma(chain[i], qb[i], qa[i])
    return circ


def add_in_place(state: Statevector, a: str, b: str, carry: str = "carry") -> Statevector:
    """Apply the adder using the layout's carry register as the ancilla."""
    carry_qubit = state.layout.qubits(carry)[0]
    return build_adder(state.layout, a, b, carry_qubit).apply(state)


def build_multiplier(layout: RegisterLayout, a: str, b: str, out: str,
                     *, max_product: int | None = None) -> Circuit:
    """Shift-and-add multiplier: |a>|b>|0> -> |a>|b>|a*b>.

    Requires width(out) >= width(a) + width(b) unless ``max_product`` shows
    the declared operand ranges cannot overflow ``out``.
    """
    qa = layout.qubits(a)
    qb = layout.qubits(b)
    qo = list(layout.qubits(out))
    bound = max_product if max_product is not None else (
        layout.register(a).max_value() * layout.register(b).max_value()
    )
    if bound > (1 << len(qo)) - 1:
        raise RegisterError(
            f"product up to {bound} does not fit register {out!r} "
            f"(width {len(qo)})"
        )
    circ = Circuit()
    for i, qai in enumerate(qa):
        for j, qbj in enumerate(qb):
            if i + j < len(qo):
                _add_power(circ, qo, i + j, ((qai, 1), (qbj, 1)))
    return circ


def multiply(state: Statevector, a: str, b: str, out: str) -> Statevector:
    return build_multiplier(state.layout, a, b, out).apply(state)


def build_index_map(layout: RegisterLayout, coarse, offset, stride: str, out,
                    *, coarse_max: int, offset_max: int, stride_value: int,
                    carry: str = "carry") -> Circuit:
    """Receptive-field index recovery: out = coarse * stride + offset.

    ``coarse``, ``offset``, ``out`` are (x, y) register-name pairs mapped
    coordinate-wise; the stride register is shared. Output registers must
    start at |0>. Raises at build time if the largest reachable index
    (coarse_max * stride_value + offset_max) does not fit ``out``.
    """
    circ = Circuit()
    carry_qubit = layout.qubits(carry)[0]
    top = coarse_max * stride_value + offset_max
    for c_name, o_name, t_name in zip(coarse, offset, out):
        reg_out = layout.register(t_name)
        if top > reg_out.max_value():
            raise RegisterError(
                f"index up to {top} does not fit register {t_name!r} "
                f"(width {reg_out.width})"
            )
        circ.extend(build_multiplier(layout, c_name, stride, t_name,
                                     max_product=coarse_max * stride_value))
        circ.extend(build_adder(layout, o_name, t_name, carry_qubit))
    return circ


def index_map(state: Statevector, coarse, offset, stride: str, out,
              *, coarse_max: int, offset_max: int, stride_value: int,
              carry: str = "carry") -> Statevector:
    circuit = build_index_map(state.layout, coarse, offset, stride, out,
                              coarse_max=coarse_max, offset_max=offset_max,
                              stride_value=stride_value, carry=carry)
    return circuit.apply(state)


def build_comparator(qubits_a, qubits_b, flag: int) -> Circuit:
    """Equality test flipping ``flag`` exactly when the registers match.

    CNOT-compares ``a`` into ``b`` (X-conjugated so equal bits read 1),
    multi-controlled-flips the flag, then uncomputes; ``b`` is restored
    bit-identically on every branch. Zero ancilla qubits.
    """
    qubits_a = list(qubits_a)
    qubits_b = list(qubits_b)
    if len(qubits_a) != len(qubits_b):
        raise RegisterError(
            f"comparator operands differ in width: {len(qubits_a)} vs {len(qubits_b)}"
        )
    circ = Circuit()
    for qa, qb in zip(qubits_a, qubits_b):
        circ.x(qb, ((qa, 1),))
        circ.x(qb)
    circ.x(flag, tuple((qb, 1) for qb in qubits_b))
    for qa, qb in reversed(list(zip(qubits_a, qubits_b))):
        circ.x(qb)
        circ.x(qb, ((qa, 1),))
    return circ


def comparator_uc(state: Statevector, a: str, b: str, flag: str) -> Statevector:
    """Spec'd comparator between two equal-width registers and a flag qubit."""
    layout = state.layout
    flag_qubits = layout.qubits(flag)
    if len(flag_qubits) != 1:
        raise RegisterError(f"flag register {flag!r} must be a single qubit")
    circuit = build_comparator(layout.qubits(a), layout.qubits(b), flag_qubits[0])
    return circuit.apply(state)
