"""Qubit and memory cost formulas for the layer stack.

Reproduces the published cost ledger: per-step qubit requirements of the
convolution and pooling layers, the storage/working totals, comparison
rows for two related schemes and the classical counterpart, and the
symbolic runtime terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


def ceil_log2(x: int) -> int:
    """Ceiling of log2 with the convention ceil(log2(1)) = 0."""
    if x < 1:
        raise ValueError(f"argument must be >= 1, got {x}")
    return (x - 1).bit_length()


@dataclass
class StepRow:
    function: str
    steps: str
    required: int
    reusable: int


@dataclass
class ResourceBudget:
    storage_qubits: int
    working_qubits: int
    working_qubits_max: int
    reusable_qubits: int
    runtime_terms: dict[str, str]
    conv_steps: list[StepRow] = field(default_factory=list)
    pool_steps: list[StepRow] = field(default_factory=list)
    comparison: dict[str, dict[str, int]] = field(default_factory=dict)
    final_conv_qubits: int = 0
    final_pool_qubits: int = 0


RUNTIME_TERMS = {
    "conv": "O[(log(M'N) + polylog(M^2 N^2) + L) / eps]",
    "pool": "O[(log(M''N') + polylog(M') + log(1/eps) + T_in) / eps]",
    "fc": "O[K (polylog(Mbar K) + L + log(1/eps) + T_in)]",
    "total": "O[K (log(M'N) + polylog(M^2 N^2) + L + log(1/eps)) / eps^2]",
    "classical_conv": "O(M^2 N^2)",
    "classical_pool": "O(M'^2 N'^2)",
    "classical_fc": "O(Mbar K)",
}


def estimate_resources(m: int, n: int, m_out: int, n_pool: int,
                       angle_bits: int, eps: float,
                       *, stride: int = 1, pool_stride: int = 1) -> ResourceBudget:
    """Cost ledger for image side ``m``, kernel side ``n``, feature side
    ``m_out``, pooling window ``n_pool``, angle precision ``angle_bits``,
    and estimation error ``eps`` (phase register of log2(1/eps) qubits)."""
    for name, value in (("M", m), ("N", n), ("M'", m_out), ("N'", n_pool),
                        ("L", angle_bits)):
        if value < 1:
            raise ValueError(f"{name} must be >= 1, got {value}")
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    t_float = math.log2(1.0 / eps)
    t = int(round(t_float))
    if abs(t_float - t) > 1e-9:
        raise ValueError(f"eps must be a power of 1/2, got {eps}")

    lm = ceil_log2(m)
    ln = ceil_log2(n)
    lmo = ceil_log2(m_out)
    ls = ceil_log2(stride)
    lsp = ceil_log2(pool_stride)
    m_pool = max((m_out - n_pool) // pool_stride + 1, 1)
    lmp = ceil_log2(m_pool)

    storage = (m ** 2 * (2 * lm ** 2 + angle_bits)
               + n ** 2 * (2 * ln ** 2 + angle_bits))
    working = 4 * lm + 4 * lmo + 6 + 2 * t
    working_max = 6 * lm + 6 * lmo + 6 + 2 * t
    final_conv = 2 * lmo + t
    final_pool = 2 * lmp + t

    conv_steps = [
        StepRow("indexing state", "prep", 6 * lm + ls, ls),
        StepRow("loading information", "load", 6 * lm + angle_bits + 3, angle_bits),
        StepRow("extracting features", "extract",
                6 * lm + 3 + t, 4 * lm + 3 + 2 * (lm - lmo)),
        StepRow("final system", "final", final_conv, 0),
    ]
    pool_steps = [
        StepRow("indexing state", "prep", 6 * lmo + lsp, lsp),
        StepRow("loading information", "load", 6 * lmo + 1, 0),
        StepRow("extracting features", "extract",
                6 * lm + 6 * lmo + 6 + 2 * t,
                6 * lm + 4 * lmo + 6 + t + (lmo - lmp)),
        StepRow("final system", "final", final_pool, 0),
    ]

    lmon = ceil_log2(m_out * n)
    comparison = {
        "region-vector scheme": {
            "storage": (m_out ** 2 * n ** 2 * (4 * lmon ** 2 + angle_bits)
                        + n ** 2 * (4 * ln ** 2 + angle_bits)),
            "working": 2 * ceil_log2(m_out * n ** 2) + 2 + 2 * t,
        },
        "power-of-two-window scheme": {
            "storage": storage,
            "working": 2 * lm + 2 * lmo + 6 * angle_bits + 4 + 2 * t,
        },
        "this design": {"storage": storage, "working": working},
        "classical counterpart": {
            "storage": ((m ** 2 + n ** 2) * angle_bits
                        + (m_out ** 2 + n_pool ** 2) * angle_bits),
            "working": m ** 2 * n ** 2 + m_out ** 2 * n_pool ** 2,
        },
    }

    return ResourceBudget(
        storage_qubits=storage,
        working_qubits=working,
        working_qubits_max=working_max,
        reusable_qubits=working - final_conv,
        runtime_terms=dict(RUNTIME_TERMS),
        conv_steps=conv_steps,
        pool_steps=pool_steps,
        comparison=comparison,
        final_conv_qubits=final_conv,
        final_pool_qubits=final_pool,
    )


def format_budget(budget: ResourceBudget) -> str:
    """Plain-text rendering for reports and the CLI."""
    lines = ["resource budget"]
    lines.append(f"  storage_qubits = {budget.storage_qubits}")
    lines.append(f"  working_qubits = {budget.working_qubits}")
    lines.append(f"  working_qubits_max = {budget.working_qubits_max}")
    lines.append(f"  reusable_qubits = {budget.reusable_qubits}")
    lines.append("  convolution steps (required / reusable):")
    for row in budget.conv_steps:
        lines.append(f"    {row.function:22s} {row.required:4d} / {row.reusable}")
    lines.append("  pooling steps (required / recoverable):")
    for row in budget.pool_steps:
        lines.append(f"    {row.function:22s} {row.required:4d} / {row.reusable}")
    lines.append("  memory comparison (storage / working):")
    for label, row in budget.comparison.items():
        lines.append(f"    {label:28s} {row['storage']:6d} / {row['working']}")
    lines.append("  runtime:")
    for key, term in budget.runtime_terms.items():
        lines.append(f"    {key:15s} {term}")
    return "\n".join(lines) + "\n"
