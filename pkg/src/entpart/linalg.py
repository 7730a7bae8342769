"""Dense complex linear algebra for small qubit registers.

All matrices are plain ``numpy`` complex arrays in row-major order. The
qubit-index convention used throughout the package: qubit 0 is the most
significant bit of the computational-basis index, so for an ``n``-qubit
register the basis state ``|b_0 b_1 ... b_{n-1}>`` has index
``sum(b_q << (n - 1 - q))``. Tensor products built with :func:`kron` in
qubit order are consistent with this convention.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import ContractViolationError, InvalidDimensionError, InvalidIndexError

# Default tolerances; every operation takes an explicit override.
HERMITIAN_ATOL = 1e-12
UNITARY_ATOL = 1e-10
TRACE_ATOL = 1e-10

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

# Stack ordered (I, X, Y, Z); index 0 acts as "no operator" in Pauli tensors.
PAULI_STACK = np.stack([PAULI_I, PAULI_X, PAULI_Y, PAULI_Z])


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def n_qubits_of(dim: int) -> int:
    """Number of qubits for a Hilbert-space dimension; rejects non powers of two."""
    if not _is_power_of_two(dim):
        raise InvalidDimensionError(f"dimension {dim} is not a power of two")
    return int(dim).bit_length() - 1


def is_hermitian(a: np.ndarray, atol: float = HERMITIAN_ATOL) -> bool:
    return bool(np.max(np.abs(a - a.conj().T)) <= atol)


def check_qubit_indices(indices: Sequence[int], n_qubits: int) -> tuple[int, ...]:
    """Validate and return a strictly increasing tuple of in-range qubit indices."""
    idx = tuple(int(i) for i in indices)
    if any(i < 0 or i >= n_qubits for i in idx):
        raise InvalidIndexError(f"qubit indices {idx} out of range for {n_qubits} qubits")
    if any(b <= a for a, b in zip(idx, idx[1:])):
        raise InvalidIndexError(f"qubit indices {idx} must be strictly increasing")
    return idx


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Sample one Haar-distributed unitary of the given power-of-two dimension.

    Ginibre matrix -> QR -> fix the QR gauge by making the R diagonal
    real-positive, which yields the Haar measure exactly.
    """
    return haar_unitary_batch(dim, 1, rng)[0]


def haar_unitary_batch(dim: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Sample ``count`` independent Haar unitaries as an array (count, dim, dim)."""
    if dim < 2 or not _is_power_of_two(dim):
        raise InvalidDimensionError(f"Haar sampling needs a power-of-two dim >= 2, got {dim}")
    z = rng.standard_normal((count, dim, dim)) + 1j * rng.standard_normal((count, dim, dim))
    q, r = np.linalg.qr(z / np.sqrt(2.0))
    d = np.einsum("...ii->...i", r)
    phase = d / np.abs(d)
    return q * phase[:, None, :]


def haar_state_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random pure state: normalized complex-Gaussian vector (a Haar column)."""
    if dim < 1 or not _is_power_of_two(dim):
        raise InvalidDimensionError(f"state dimension must be a power of two, got {dim}")
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; the first factor is the most significant subsystem."""
    return np.kron(a, b)


def kron_all(mats: Iterable[np.ndarray]) -> np.ndarray:
    out = None
    for m in mats:
        out = np.asarray(m) if out is None else np.kron(out, m)
    if out is None:
        raise ContractViolationError("kron_all needs at least one factor")
    return out


def hermitian_eigenvalues(a: np.ndarray, atol: float = 1e-10) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, ascending.

    Rejects inputs whose anti-Hermitian part exceeds ``atol``.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ContractViolationError(f"expected a square matrix, got shape {a.shape}")
    if not is_hermitian(a, atol=atol):
        dev = float(np.max(np.abs(a - a.conj().T)))
        raise ContractViolationError(f"matrix is not Hermitian (deviation {dev:.3e} > {atol:.1e})")
    return np.linalg.eigvalsh(a)


def trace_norm_hermitian(a: np.ndarray, atol: float = 1e-10) -> float:
    """Trace norm of a Hermitian matrix as the sum of absolute eigenvalues."""
    return float(np.sum(np.abs(hermitian_eigenvalues(a, atol=atol))))


def partial_trace(rho: np.ndarray, keep: Sequence[int], n_qubits: int) -> np.ndarray:
    """Reduced matrix on the ``keep`` qubits (ascending order kept).

    ``keep`` may be empty, in which case the 1x1 matrix ``[[tr(rho)]]`` is
    returned, and may be the full register, in which case a copy of ``rho``
    comes back.
    """
    keep = check_qubit_indices(sorted(keep), n_qubits)
    dim = 2**n_qubits
    rho = np.asarray(rho)
    if rho.shape != (dim, dim):
        raise ContractViolationError(f"expected a {dim}x{dim} matrix, got shape {rho.shape}")
    traced = tuple(q for q in range(n_qubits) if q not in keep)
    if not traced:
        return rho.copy()
    t = rho.reshape((2,) * (2 * n_qubits))
    axes = (
        [q for q in keep]
        + [q for q in traced]
        + [n_qubits + q for q in keep]
        + [n_qubits + q for q in traced]
    )
    dk = 2 ** len(keep)
    dt = 2 ** len(traced)
    t = t.transpose(axes).reshape(dk, dt, dk, dt)
    return np.einsum("atbt->ab", t)


def partial_transpose(rho: np.ndarray, party: Sequence[int], n_qubits: int) -> np.ndarray:
    """Transpose the row/column indices of the ``party`` qubits only."""
    party = check_qubit_indices(sorted(party), n_qubits)
    dim = 2**n_qubits
    rho = np.asarray(rho)
    if rho.shape != (dim, dim):
        raise ContractViolationError(f"expected a {dim}x{dim} matrix, got shape {rho.shape}")
    axes = list(range(2 * n_qubits))
    for q in party:
        axes[q], axes[n_qubits + q] = axes[n_qubits + q], axes[q]
    return rho.reshape((2,) * (2 * n_qubits)).transpose(axes).reshape(dim, dim)


def pauli_expectation_tensor(rho: np.ndarray, n_qubits: int) -> np.ndarray:
    """All Pauli-string expectation values of ``rho`` as a real (4,)*n tensor.

    Entry ``T[p_0, ..., p_{n-1}] = tr(rho * s_{p_0} x ... x s_{p_{n-1}})`` with
    the stack order (I, X, Y, Z). Index 0 therefore marginalizes a qubit out,
    so the tensor contains every reduced correlation at once.
    """
    dim = 2**n_qubits
    rho = np.asarray(rho)
    if rho.shape != (dim, dim):
        raise ContractViolationError(f"expected a {dim}x{dim} matrix, got shape {rho.shape}")
    # Interleave row/column axes per qubit: (r0, c0, r1, c1, ...).
    t = rho.reshape((2,) * (2 * n_qubits))
    order = []
    for q in range(n_qubits):
        order.extend([q, n_qubits + q])
    t = t.transpose(order)
    # Contract one qubit at a time: tr_q(rho A) consumes (r_q, c_q) against A[c, r].
    for _ in range(n_qubits):
        t = np.tensordot(t, PAULI_STACK, axes=([0, 1], [2, 1]))
    out = t
    if np.max(np.abs(out.imag)) > 1e-9:
        raise ContractViolationError("Pauli expectations came out complex; input not Hermitian?")
    return out.real
