"""Tests for logarithmic negativity and the partition-level aggregate."""

import numpy as np
import pytest

from entpart import linalg
from entpart.errors import InvalidArgumentError
from entpart.negativity import log_negativity, part_tilde_negativity, partition_log_negativity
from entpart.partitions import SetPartition, bipartitions
from entpart.states import (
    DensityMatrix,
    depolarize_interpolate,
    dm_from_vector,
    maximally_mixed,
    random_pure_partitioned,
)

BELL_VEC = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0)
GHZ3_VEC = np.zeros(8)
GHZ3_VEC[0] = GHZ3_VEC[7] = 1 / np.sqrt(2.0)


def random_density(dim, rng):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def permute_qubits(rho, perm, n):
    """Relabel qubits of a density matrix: new qubit q is old qubit perm[q]."""
    axes = list(perm) + [n + p for p in perm]
    return rho.reshape((2,) * (2 * n)).transpose(axes).reshape(2**n, 2**n)


class TestLogNegativity:
    def test_product_state_is_zero(self):
        rng = np.random.default_rng(0)
        rho = DensityMatrix(np.kron(random_density(2, rng), random_density(4, rng)))
        assert log_negativity(rho, [0]) == 0.0

    def test_bell_is_one(self):
        # Oracle: PT spectrum (-1/2, 1/2, 1/2, 1/2) gives trace norm 2.
        bell = dm_from_vector(BELL_VEC)
        pt = linalg.partial_transpose(bell.matrix, [0], 2)
        assert np.allclose(np.linalg.eigvalsh(pt), [-0.5, 0.5, 0.5, 0.5], atol=1e-12)
        assert log_negativity(bell, [0]) == pytest.approx(1.0, abs=1e-12)

    def test_werner_threshold(self):
        # Closed form: min PT eigenvalue (1-lam)(-1/2) + lam/4 crosses 0 at 2/3.
        bell = dm_from_vector(BELL_VEC)
        for lam in (0.0, 0.3, 0.5):
            assert log_negativity(depolarize_interpolate(bell, lam), [0]) > 0.05
        for lam in (2 / 3, 0.67, 0.8, 1.0):
            assert log_negativity(depolarize_interpolate(bell, lam), [0]) == 0.0

    def test_symmetry_under_complement(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            rho = DensityMatrix(random_density(8, rng))
            a = log_negativity(rho, [0])
            b = log_negativity(rho, [1, 2])
            assert a == pytest.approx(b, abs=1e-9)

    def test_monotone_along_depolarization(self):
        rng = np.random.default_rng(2)
        psi = random_pure_partitioned(SetPartition.of([0, 1, 2]), rng)
        values = [
            log_negativity(depolarize_interpolate(psi, lam), [0])
            for lam in np.linspace(0.0, 1.0, 11)
        ]
        assert all(a >= b - 1e-9 for a, b in zip(values, values[1:]))

    def test_trivial_bipartition_rejected(self):
        bell = dm_from_vector(BELL_VEC)
        with pytest.raises(InvalidArgumentError):
            log_negativity(bell, [])
        with pytest.raises(InvalidArgumentError):
            log_negativity(bell, [0, 1])


class TestPartTildeNegativity:
    def test_two_qubit_part_equals_single_split(self):
        bell = dm_from_vector(BELL_VEC)
        assert part_tilde_negativity(bell) == pytest.approx(log_negativity(bell, [0]), abs=1e-12)

    def test_ghz_three_qubits(self):
        ghz = dm_from_vector(GHZ3_VEC)
        splits = bipartitions(range(3))
        values = [log_negativity(ghz, a) for a, _ in splits]
        assert np.allclose(values, 1.0, atol=1e-10)
        assert part_tilde_negativity(ghz) == pytest.approx(1.0, abs=1e-10)

    def test_one_ppt_split_collapses_mean(self):
        # Bell pair next to a bare maximally mixed qubit: the split isolating
        # the third qubit is PPT, so the geometric mean is zero.
        bell = dm_from_vector(BELL_VEC)
        rho = DensityMatrix(np.kron(bell.matrix, np.eye(2) / 2))
        assert log_negativity(rho, [0, 1]) == 0.0
        assert part_tilde_negativity(rho) == 0.0

    def test_single_qubit_rejected(self):
        with pytest.raises(InvalidArgumentError):
            part_tilde_negativity(maximally_mixed(1))


class TestPartitionLogNegativity:
    def test_maximally_mixed_is_ppt(self):
        report = partition_log_negativity(maximally_mixed(3), SetPartition.of([0], [1, 2]))
        assert report.total == 0.0
        assert not report.is_npt

    def test_bell_triple_product(self):
        bell = np.outer(BELL_VEC, BELL_VEC)
        rho = DensityMatrix(np.kron(np.kron(bell, bell), bell))
        p = SetPartition.of([0, 1], [2, 3], [4, 5])
        report = partition_log_negativity(rho, p)
        for part, value in report.per_part.items():
            assert value == pytest.approx(1.0, abs=1e-9)
        assert report.total == pytest.approx(1.0, abs=1e-9)
        assert report.is_npt

    def test_random_pure_mostly_npt(self):
        # Haar pure states on a 5-qubit part are NPT with overwhelming probability.
        rng = np.random.default_rng(3)
        p = SetPartition.of([0], [1, 2, 3, 4, 5])
        hits = 0
        for _ in range(100):
            rho = random_pure_partitioned(p, rng)
            if partition_log_negativity(rho, p).total > 0:
                hits += 1
        assert hits >= 95

    def test_fully_separable_convention(self):
        rng = np.random.default_rng(4)
        p = SetPartition.of([0], [1], [2])
        rho = random_pure_partitioned(p, rng)
        report = partition_log_negativity(rho, p)
        assert report.total == 0.0
        assert not report.is_npt
        assert report.per_part == {}

    def test_npt_implies_all_splits_negative(self):
        rng = np.random.default_rng(5)
        p = SetPartition.of([0, 1], [2, 3])
        rho = random_pure_partitioned(p, rng)
        report = partition_log_negativity(rho, p)
        if report.is_npt:
            for part in report.per_part:
                red = DensityMatrix(linalg.partial_trace(rho.matrix, part, 4))
                for side_a, _ in bipartitions(range(len(part))):
                    assert log_negativity(red, side_a) > 0

    def test_permutation_invariance(self):
        rng = np.random.default_rng(6)
        p = SetPartition.of([0, 1], [2], [3])
        for _ in range(5):
            rho = random_pure_partitioned(p, rng)
            perm = list(rng.permutation(4))
            permuted_matrix = permute_qubits(rho.matrix, perm, 4)
            # new label q holds old qubit perm[q]; map parts accordingly
            inverse = {old: new for new, old in enumerate(perm)}
            p_permuted = SetPartition(tuple(tuple(sorted(inverse[q] for q in part)) for part in p.parts))
            a = partition_log_negativity(rho, p)
            b = partition_log_negativity(DensityMatrix(permuted_matrix), p_permuted)
            assert a.total == pytest.approx(b.total, abs=1e-9)

    def test_register_mismatch_rejected(self):
        with pytest.raises(InvalidArgumentError):
            partition_log_negativity(maximally_mixed(3), SetPartition.of([0], [1]))
