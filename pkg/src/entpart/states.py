"""Random pure and mixed states with a prescribed entanglement partition.

Pure states factor across the parts of a partition, with each factor drawn
from the Haar measure on its part's subspace. Mixed states are convex
combinations of such pure states, with weights drawn uniform(0,1) and
renormalized to sum to one. A depolarizing interpolation connects any pure
state to the maximally mixed state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import ContractViolationError, InvalidArgumentError, InvalidDimensionError
from .partitions import SetPartition

STATE_HERMITIAN_ATOL = 1e-10
STATE_TRACE_ATOL = 1e-10
STATE_EIGEN_FLOOR = -1e-9
PURE_PURITY_ATOL = 1e-8


@dataclass(frozen=True)
class DensityMatrix:
    """Dense density matrix with its register size; validated on construction."""

    matrix: np.ndarray
    n_qubits: int = field(default=-1)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidDimensionError(f"density matrix must be square, got shape {m.shape}")
        n = linalg.n_qubits_of(m.shape[0])
        if self.n_qubits != -1 and self.n_qubits != n:
            raise InvalidDimensionError(f"matrix of dim {m.shape[0]} is not {self.n_qubits} qubits")
        if not linalg.is_hermitian(m, atol=STATE_HERMITIAN_ATOL):
            raise ContractViolationError("density matrix is not Hermitian within tolerance")
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > STATE_TRACE_ATOL:
            raise ContractViolationError(f"density matrix trace {tr} is not 1 within tolerance")
        if float(np.min(np.linalg.eigvalsh(m))) < STATE_EIGEN_FLOOR:
            raise ContractViolationError("density matrix has a significantly negative eigenvalue")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "n_qubits", n)

    @property
    def dim(self) -> int:
        return 2**self.n_qubits


@dataclass(frozen=True)
class LabeledState:
    """A state sample plus the metadata a dataset row carries."""

    state: DensityMatrix
    partition: SetPartition
    lam: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.partition.covers_register(self.state.n_qubits):
            raise InvalidArgumentError(
                f"partition {self.partition} does not cover a {self.state.n_qubits}-qubit register"
            )


def derived_rng(master_seed: int, *key: int) -> np.random.Generator:
    """Independent stream for (master seed, counter key); reproducible and splittable.

    The spawn key is the plain integer tuple, so any worker can rebuild the
    exact stream of any state from the master seed and the state's indices.
    """
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), *map(int, key)]))


def dm_from_vector(psi: np.ndarray) -> DensityMatrix:
    psi = np.asarray(psi, dtype=complex)
    return DensityMatrix(np.outer(psi, psi.conj()))


def maximally_mixed(n_qubits: int) -> DensityMatrix:
    d = 2**n_qubits
    return DensityMatrix(np.eye(d, dtype=complex) / d)


def _pure_partitioned_vector(p: SetPartition, rng: np.random.Generator) -> np.ndarray:
    """State vector factoring across the parts of p, Haar-random per part."""
    support = p.support
    n = len(support)
    if support != tuple(range(n)):
        raise InvalidArgumentError(f"partition {p} must cover a contiguous register 0..{n-1}")
    psi = None
    flat_order: list[int] = []
    for part in p.parts:
        factor = linalg.haar_state_vector(2 ** len(part), rng)
        psi = factor if psi is None else np.kron(psi, factor)
        flat_order.extend(part)
    # kron built the register in flattened-part order; permute axes back to 0..n-1.
    tensor = psi.reshape((2,) * n)
    perm = [flat_order.index(q) for q in range(n)]
    return tensor.transpose(perm).reshape(-1)


def random_pure_partitioned(p: SetPartition, rng: np.random.Generator) -> DensityMatrix:
    """Haar-random pure state that is a tensor product across the parts of p."""
    return dm_from_vector(_pure_partitioned_vector(p, rng))


def random_mixed_partitioned(p: SetPartition, n_mixed: int, rng: np.random.Generator) -> DensityMatrix:
    """Convex mix of n_mixed independent pure states of the same partition.

    Weights are uniform(0,1) renormalized to sum one; they are drawn before
    the states so the stream layout is part of the reproducibility contract.
    """
    if n_mixed < 1:
        raise InvalidArgumentError(f"n_mixed must be >= 1, got {n_mixed}")
    weights = rng.uniform(0.0, 1.0, size=n_mixed)
    weights = weights / weights.sum()
    rho = None
    for c in weights:
        psi = _pure_partitioned_vector(p, rng)
        term = c * np.outer(psi, psi.conj())
        rho = term if rho is None else rho + term
    return DensityMatrix(rho)


def depolarize_interpolate(psi_pure: DensityMatrix, lam: float) -> DensityMatrix:
    """(1 - lam) * pure state + lam * identity/d."""
    if not 0.0 <= lam <= 1.0:
        raise InvalidArgumentError(f"mixing weight must be in [0, 1], got {lam}")
    if abs(purity(psi_pure) - 1.0) > PURE_PURITY_ATOL:
        raise ContractViolationError("depolarize_interpolate expects a pure input state")
    d = psi_pure.dim
    m = (1.0 - lam) * psi_pure.matrix + lam * np.eye(d, dtype=complex) / d
    return DensityMatrix(m)


def purity(rho: DensityMatrix) -> float:
    """tr(rho^2), between 1/d (maximally mixed) and 1 (pure)."""
    m = rho.matrix
    return float(np.einsum("ij,ji->", m, m).real)


def reduced_state(rho: DensityMatrix, keep) -> DensityMatrix:
    """Reduced density matrix on the kept qubits (ascending order)."""
    return DensityMatrix(linalg.partial_trace(rho.matrix, keep, rho.n_qubits))
