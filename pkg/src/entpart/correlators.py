"""Randomized-measurement correlators and their Monte-Carlo moment statistics.

For one measurement round, every register qubit is rotated by an independent
Haar-random 2x2 unitary and a Pauli-Z correlator is read out on each qubit
subset. The plain correlator of subset S is

    c_S = tr(rho * prod_{m in S} U_m' Z U_m),

and the connected correlator (joint cumulant) of S is the Moebius-weighted
sum over set partitions of S,

    C_S = sum_{P of S} (|P|-1)! (-1)^(|P|-1) prod_{B in P} c_B,

which vanishes whenever S straddles uncorrelated parts of the state. Feature
vectors collect the Monte-Carlo means of even powers of C_S over many
independent unitary draws.

Expectation values are exact traces per draw; shot noise is out of scope.
One draw of N single-qubit unitaries is shared by all subsets, which keeps
the marginal distribution of every subset's rotation Haar while cutting the
sampling cost.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb, factorial
from typing import Mapping, Sequence

import numpy as np

from . import linalg
from .errors import (
    ContractViolationError,
    IncompleteInputError,
    InvalidArgumentError,
)
from .partitions import partitions_of_set
from .states import DensityMatrix

CORRELATOR_REAL_ATOL = 1e-10
CORRELATOR_RANGE_ATOL = 1e-9


@dataclass(frozen=True)
class UnitaryDraw:
    """One measurement round: a 2x2 unitary per involved qubit."""

    unitaries: tuple[np.ndarray, ...]

    def __post_init__(self):
        mats = tuple(np.asarray(u, dtype=complex) for u in self.unitaries)
        for u in mats:
            if u.shape != (2, 2):
                raise InvalidArgumentError(f"draw entries must be 2x2, got {u.shape}")
            if np.max(np.abs(u @ u.conj().T - np.eye(2))) > linalg.UNITARY_ATOL:
                raise ContractViolationError("draw entry is not unitary within tolerance")
        object.__setattr__(self, "unitaries", mats)

    def restrict(self, positions: Sequence[int]) -> "UnitaryDraw":
        return UnitaryDraw(tuple(self.unitaries[p] for p in positions))


def sample_unitary_draw(n_qubits: int, rng: np.random.Generator) -> UnitaryDraw:
    batch = linalg.haar_unitary_batch(2, n_qubits, rng)
    return UnitaryDraw(tuple(batch))


@dataclass(frozen=True)
class MomentSpec:
    """Which statistics to extract: moment orders t, correlation orders k, draws."""

    t: tuple[int, ...]
    k: tuple[int, ...]
    n_unit: int

    def __post_init__(self):
        t = tuple(int(x) for x in self.t)
        k = tuple(int(x) for x in self.k)
        if not t or any(x <= 0 or x % 2 for x in t) or list(t) != sorted(set(t)):
            raise InvalidArgumentError(f"moment orders must be ascending even positives, got {t}")
        if not k or any(x < 1 for x in k) or list(k) != sorted(set(k)):
            raise InvalidArgumentError(f"correlation orders must be ascending >= 1, got {k}")
        if self.n_unit < 1:
            raise InvalidArgumentError(f"n_unit must be >= 1, got {self.n_unit}")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "k", k)

    def for_qubits(self, n: int) -> "MomentSpec":
        if max(self.k) > n:
            raise InvalidArgumentError(f"correlation order {max(self.k)} exceeds register size {n}")
        return self


def subsets_of_size(n: int, sizes: Sequence[int]) -> list[tuple[int, ...]]:
    """Qubit subsets in canonical order: size ascending, lexicographic within size."""
    out: list[tuple[int, ...]] = []
    for size in sorted(set(sizes)):
        out.extend(combinations(range(n), size))
    return out


@dataclass(frozen=True)
class FeatureLayout:
    """Canonical feature ordering: t ascending, then subset size, then subsets."""

    n_qubits: int
    t: tuple[int, ...]
    k: tuple[int, ...]

    @property
    def subsets(self) -> list[tuple[int, ...]]:
        return subsets_of_size(self.n_qubits, self.k)

    @property
    def dimension(self) -> int:
        return len(self.t) * sum(comb(self.n_qubits, kk) for kk in self.k)

    def column_names(self) -> list[str]:
        names = []
        for t in self.t:
            for sub in self.subsets:
                names.append(f"M{t}_" + "-".join(str(q + 1) for q in sub))
        return names

    def column_indices(self, t_sel: Sequence[int], k_sel: Sequence[int]) -> list[int]:
        """Positions of the sub-vector for the selected moment and correlation orders."""
        t_sel = set(t_sel)
        k_sel = set(k_sel)
        if not t_sel <= set(self.t) or not k_sel <= set(self.k):
            raise InvalidArgumentError("selected orders are not contained in this layout")
        subs = self.subsets
        idx = []
        for ti, t in enumerate(self.t):
            for si, sub in enumerate(subs):
                if t in t_sel and len(sub) in k_sel:
                    idx.append(ti * len(subs) + si)
        return idx

    def sliced(self, t_sel: Sequence[int], k_sel: Sequence[int]) -> "FeatureLayout":
        return FeatureLayout(self.n_qubits, tuple(sorted(set(t_sel))), tuple(sorted(set(k_sel))))


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    layout: FeatureLayout

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.layout.dimension,):
            raise ContractViolationError(
                f"feature vector length {v.shape} does not match layout dimension {self.layout.dimension}"
            )
        if not np.all(np.isfinite(v)):
            raise ContractViolationError("feature vector contains non-finite entries")
        object.__setattr__(self, "values", v)


def feature_dimension(n: int, spec: MomentSpec) -> int:
    """len(t) * sum_k C(n, k); for k = 1..n and t = 2,4,...,t0 this is (t0/2)(2^n - 1)."""
    return len(spec.t) * sum(comb(n, kk) for kk in spec.k)


def plain_correlator(rho_reduced: DensityMatrix, draw: UnitaryDraw) -> float:
    """Exact rotated-Z correlator on a reduced state, one value per draw.

    The draw must carry exactly one unitary per qubit of the reduced state,
    in the subset's ascending-qubit order.
    """
    if len(draw.unitaries) != rho_reduced.n_qubits:
        raise ContractViolationError(
            f"draw has {len(draw.unitaries)} unitaries for a {rho_reduced.n_qubits}-qubit state"
        )
    if rho_reduced.n_qubits == 0:
        raise InvalidArgumentError("correlator subset must be non-empty")
    obs = linalg.kron_all([u.conj().T @ linalg.PAULI_Z @ u for u in draw.unitaries])
    val = complex(np.einsum("ij,ji->", rho_reduced.matrix, obs))
    if abs(val.imag) > CORRELATOR_REAL_ATOL:
        raise ContractViolationError(f"correlator has imaginary part {val.imag:.3e}")
    if abs(val.real) > 1.0 + CORRELATOR_RANGE_ATOL:
        raise ContractViolationError(f"correlator {val.real} outside [-1, 1]")
    return float(val.real)


@lru_cache(maxsize=None)
def _moebius_partitions(size: int) -> tuple[tuple[float, tuple[tuple[int, ...], ...]], ...]:
    """Set partitions of {0..size-1} with cumulant weights (|P|-1)! (-1)^(|P|-1)."""
    out = []
    for p in partitions_of_set(range(size)):
        w = float(factorial(p.n_parts - 1)) * (-1.0) ** (p.n_parts - 1)
        out.append((w, p.parts))
    return tuple(out)


def connected_correlator(subset: Sequence[int], plain_values: Mapping[tuple[int, ...], float]) -> float:
    """Joint cumulant of a subset from the plain correlators of all its subsets."""
    sub = tuple(sorted(int(q) for q in subset))
    if not sub:
        raise InvalidArgumentError("connected correlator needs a non-empty subset")
    total = 0.0
    for weight, blocks in _moebius_partitions(len(sub)):
        prod = weight
        for block in blocks:
            key = tuple(sub[i] for i in block)
            if key not in plain_values:
                raise IncompleteInputError(f"missing plain correlator for subset {key}")
            prod *= plain_values[key]
        total += prod
    return total


def _bloch_axes(unitaries: np.ndarray) -> np.ndarray:
    """Rotated measurement axes a with U' Z U = a . sigma, for a (d, q, 2, 2) batch."""
    rotated = np.einsum("dqji,jk,dqkl->dqil", unitaries.conj(), linalg.PAULI_Z, unitaries)
    axes = 0.5 * np.einsum("dqil,pli->dqp", rotated, linalg.PAULI_STACK[1:])
    if np.max(np.abs(axes.imag)) > 1e-10:
        raise ContractViolationError("rotated Z axis came out complex")
    return axes.real


@dataclass(frozen=True)
class CorrelatorSamples:
    """Per-draw plain and connected correlators for every subset up to a size cap."""

    n_qubits: int
    subsets: tuple[tuple[int, ...], ...]
    plain: dict
    connected: dict


def correlator_samples(
    rho: DensityMatrix,
    k_max: int,
    n_unit: int,
    rng: np.random.Generator,
    unitaries: np.ndarray | None = None,
) -> CorrelatorSamples:
    """Sample n_unit measurement rounds and evaluate every subset of size <= k_max.

    The per-draw plain correlators are evaluated through the state's Pauli
    expectation tensor contracted with each draw's rotated measurement axes,
    which is algebraically identical to the trace formula of
    :func:`plain_correlator`. ``unitaries`` may inject a fixed (n_unit, n, 2, 2)
    batch of rotations instead of sampling.
    """
    n = rho.n_qubits
    if not 1 <= k_max <= n:
        raise InvalidArgumentError(f"k_max must be in 1..{n}, got {k_max}")
    if unitaries is None:
        unitaries = linalg.haar_unitary_batch(2, n_unit * n, rng).reshape(n_unit, n, 2, 2)
    elif unitaries.shape != (n_unit, n, 2, 2):
        raise ContractViolationError(f"unitary batch has shape {unitaries.shape}")
    axes = _bloch_axes(unitaries)

    pauli_tensor = linalg.pauli_expectation_tensor(rho.matrix, n)
    subsets = tuple(subsets_of_size(n, range(1, k_max + 1)))

    plain: dict[tuple[int, ...], np.ndarray] = {}
    for sub in subsets:
        block = pauli_tensor[tuple(slice(1, 4) if q in sub else 0 for q in range(n))]
        operands = [block, list(range(len(sub)))]
        for pos, q in enumerate(sub):
            operands.extend([axes[:, q, :], [len(sub), pos]])
        operands.append([len(sub)])
        plain[sub] = np.einsum(*operands)

    connected: dict[tuple[int, ...], np.ndarray] = {}
    for sub in subsets:
        if len(sub) == 1:
            connected[sub] = plain[sub]
            continue
        acc = np.zeros(n_unit)
        for weight, blocks in _moebius_partitions(len(sub)):
            prod = None
            for block in blocks:
                key = tuple(sub[i] for i in block)
                prod = plain[key].copy() if prod is None else prod * plain[key]
            acc += weight * prod
        connected[sub] = acc

    return CorrelatorSamples(n_qubits=n, subsets=subsets, plain=plain, connected=connected)


def estimate_moments(rho: DensityMatrix, spec: MomentSpec, rng: np.random.Generator) -> FeatureVector:
    """Monte-Carlo means of even powers of the connected correlators.

    Returns the canonical feature layout: moment order ascending, then subset
    size ascending, then subsets lexicographic.
    """
    spec = spec.for_qubits(rho.n_qubits)
    samples = correlator_samples(rho, max(spec.k), spec.n_unit, rng)
    layout = FeatureLayout(rho.n_qubits, spec.t, spec.k)
    emitted = layout.subsets
    values = np.empty(layout.dimension)
    pos = 0
    for t in spec.t:
        for sub in emitted:
            values[pos] = float(np.mean(samples.connected[sub] ** t))
            pos += 1
    return FeatureVector(values, layout)
