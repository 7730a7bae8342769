"""Mixed-state entanglement quantifiers built on the PPT criterion.

The bipartite logarithmic negativity is log2 of the trace norm of the
partially transposed state. The partition-level quantifier aggregates it in
two stages: per multi-qubit part, the geometric mean over all bipartitions
of that part's reduced state; across parts, a geometric mean weighted by part
size over the number of entangled qubits. A zero anywhere collapses the
aggregate to zero, which is exactly the PPT flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import linalg
from .errors import InvalidArgumentError
from .partitions import SetPartition, bipartitions, entangled_qubit_count
from .states import DensityMatrix, reduced_state

# Log-negativities inside this band count as exactly zero, so float noise
# cannot flip a PPT label.
ZERO_BAND = 1e-9


@dataclass(frozen=True)
class NegativityReport:
    """Partition-level negativity: per-part values, the aggregate, the PPT flag."""

    partition: SetPartition
    per_part: dict
    total: float
    is_npt: bool

    def __post_init__(self):
        if self.total < 0.0:
            raise InvalidArgumentError(f"negativity aggregate must be non-negative, got {self.total}")
        if (self.total > 0.0) != self.is_npt:
            raise InvalidArgumentError("inconsistent report: total and is_npt disagree")


def log_negativity(rho: DensityMatrix, party) -> float:
    """log2 of the trace norm of the partial transpose w.r.t. ``party``.

    Zero for every PPT state, positive only for NPT (hence entangled) states;
    symmetric under swapping the party with its complement.
    """
    n = rho.n_qubits
    party = tuple(sorted(int(q) for q in party))
    if not party or len(party) >= n:
        raise InvalidArgumentError(f"party {party} must be a nonempty strict subset of {n} qubits")
    pt = linalg.partial_transpose(rho.matrix, party, n)
    value = math.log2(linalg.trace_norm_hermitian(pt))
    if value < -ZERO_BAND:
        raise InvalidArgumentError(f"trace norm below 1 beyond tolerance: log2 = {value}")
    return 0.0 if abs(value) < ZERO_BAND else value


def part_tilde_negativity(rho_part: DensityMatrix) -> float:
    """Geometric mean of log-negativities over all bipartitions of one part.

    Computed in log space with an early exit: one PPT bipartition forces the
    whole mean to zero.
    """
    m = rho_part.n_qubits
    if m < 2:
        raise InvalidArgumentError(f"part must have at least 2 qubits, got {m}")
    splits = bipartitions(range(m))
    log_sum = 0.0
    for side_a, _ in splits:
        value = log_negativity(rho_part, side_a)
        if value == 0.0:
            return 0.0
        log_sum += math.log(value)
    return math.exp(log_sum / len(splits))


def partition_log_negativity(rho: DensityMatrix, p: SetPartition) -> NegativityReport:
    """Aggregate negativity of ``rho`` for a given entanglement partition.

    Product over multi-qubit parts of (per-part geometric mean)^(|part| / n_ent)
    with n_ent the number of entangled qubits. The fully separable partition
    has no multi-qubit part; its aggregate is defined as 0 here (the quantity
    is only ever used to flag entanglement).
    """
    if not p.covers_register(rho.n_qubits):
        raise InvalidArgumentError(f"partition {p} does not cover the {rho.n_qubits}-qubit register")
    n_ent = entangled_qubit_count(p)
    per_part: dict = {}
    if n_ent == 0:
        return NegativityReport(partition=p, per_part=per_part, total=0.0, is_npt=False)
    log_sum = 0.0
    zero_seen = False
    for part in p.parts:
        if len(part) < 2:
            continue
        tilde = part_tilde_negativity(reduced_state(rho, part))
        per_part[part] = tilde
        if tilde == 0.0:
            zero_seen = True
        elif not zero_seen:
            log_sum += (len(part) / n_ent) * math.log(tilde)
    total = 0.0 if zero_seen else math.exp(log_sum)
    return NegativityReport(partition=p, per_part=per_part, total=total, is_npt=total > 0.0)
