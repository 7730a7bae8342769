"""Tests for partitioned state sampling and depolarizing interpolation."""

import numpy as np
import pytest

from entpart import linalg
from entpart.errors import ContractViolationError, InvalidArgumentError
from entpart.partitions import SetPartition
from entpart.states import (
    DensityMatrix,
    LabeledState,
    depolarize_interpolate,
    derived_rng,
    dm_from_vector,
    maximally_mixed,
    purity,
    random_mixed_partitioned,
    random_pure_partitioned,
    reduced_state,
)


def analytic_depolarized_purity(lam, d):
    return (1 - lam) ** 2 + 2 * lam * (1 - lam) / d + lam**2 / d


class TestDensityMatrix:
    def test_valid_construction(self):
        dm = maximally_mixed(2)
        assert dm.n_qubits == 2 and dm.dim == 4

    def test_rejects_non_hermitian(self):
        with pytest.raises(ContractViolationError):
            DensityMatrix(np.array([[0.5, 0.1], [0.0, 0.5]], dtype=complex))

    def test_rejects_wrong_trace(self):
        with pytest.raises(ContractViolationError):
            DensityMatrix(np.eye(2, dtype=complex))

    def test_rejects_negative_spectrum(self):
        with pytest.raises(ContractViolationError):
            DensityMatrix(np.diag([1.5, -0.5]).astype(complex))


class TestRandomPurePartitioned:
    def test_fully_separable_marginals_pure(self):
        rng = np.random.default_rng(1)
        p = SetPartition.of([0], [1], [2])
        dm = random_pure_partitioned(p, rng)
        assert purity(dm) == pytest.approx(1.0, abs=1e-10)
        for q in range(3):
            assert purity(reduced_state(dm, [q])) == pytest.approx(1.0, abs=1e-9)

    def test_entangled_pair_marginals_mixed(self):
        # Haar-random two-qubit pure states have almost surely mixed marginals.
        rng = np.random.default_rng(2)
        p = SetPartition.of([0, 1])
        failures = 0
        for _ in range(100):
            dm = random_pure_partitioned(p, rng)
            assert purity(dm) == pytest.approx(1.0, abs=1e-10)
            if purity(reduced_state(dm, [0])) >= 0.999:
                failures += 1
        assert failures <= 2

    def test_cross_part_factorization(self):
        # Reduced state on a union of parts equals the product of the parts' marginals.
        rng = np.random.default_rng(3)
        p = SetPartition.of([0, 2], [1, 4], [3])
        dm = random_pure_partitioned(p, rng)
        joint = reduced_state(dm, [0, 2, 3]).matrix
        factored = np.kron(
            reduced_state(dm, [0, 2]).matrix, reduced_state(dm, [3]).matrix
        )
        assert np.max(np.abs(joint - factored)) <= 1e-9

    def test_interleaved_parts_consistency(self):
        # Permuting which qubits belong to which part must still give each
        # part a Haar-pure factor: check part marginals are pure.
        rng = np.random.default_rng(4)
        p = SetPartition.of([0, 3], [1, 2])
        dm = random_pure_partitioned(p, rng)
        assert purity(reduced_state(dm, [0, 3])) == pytest.approx(1.0, abs=1e-9)
        assert purity(reduced_state(dm, [1, 2])) == pytest.approx(1.0, abs=1e-9)


class TestRandomMixedPartitioned:
    def test_single_term_is_pure(self):
        rng = np.random.default_rng(5)
        dm = random_mixed_partitioned(SetPartition.of([0, 1]), 1, rng)
        assert purity(dm) == pytest.approx(1.0, abs=1e-10)

    def test_ten_terms_are_mixed(self):
        rng = np.random.default_rng(6)
        p = SetPartition.of(range(6))
        dm = random_mixed_partitioned(p, 10, rng)
        assert purity(dm) < 0.999

    def test_weights_normalized(self):
        # The weight draw is the first thing consumed from the stream.
        seed = 99
        rng = np.random.default_rng(np.random.SeedSequence([seed]))
        w = rng.uniform(0.0, 1.0, size=10)
        w = w / w.sum()
        assert np.all(w > 0)
        assert w.sum() == pytest.approx(1.0, abs=1e-12)
        dm = random_mixed_partitioned(SetPartition.of([0, 1]), 10, derived_rng(seed))
        assert np.trace(dm.matrix).real == pytest.approx(1.0, abs=1e-12)

    def test_spectrum_nonnegative(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            dm = random_mixed_partitioned(SetPartition.of([0], [1, 2]), 10, rng)
            assert np.min(np.linalg.eigvalsh(dm.matrix)) >= -1e-9

    def test_zero_terms_rejected(self):
        with pytest.raises(InvalidArgumentError):
            random_mixed_partitioned(SetPartition.of([0]), 0, np.random.default_rng(0))


class TestDepolarizeInterpolate:
    def test_endpoints(self):
        rng = np.random.default_rng(8)
        psi = random_pure_partitioned(SetPartition.of([0, 1]), rng)
        assert np.allclose(depolarize_interpolate(psi, 0.0).matrix, psi.matrix)
        end = depolarize_interpolate(psi, 1.0)
        assert np.allclose(end.matrix, np.eye(4) / 4)
        assert purity(end) == pytest.approx(0.25, abs=1e-12)

    def test_purity_formula(self):
        rng = np.random.default_rng(9)
        for n in (1, 2, 3):
            psi = random_pure_partitioned(SetPartition.of(range(n)), rng)
            d = 2**n
            for lam in (0.1, 0.35, 0.5, 0.77, 0.9):
                got = purity(depolarize_interpolate(psi, lam))
                assert got == pytest.approx(analytic_depolarized_purity(lam, d), abs=1e-12)

    def test_purity_strictly_decreasing(self):
        rng = np.random.default_rng(10)
        psi = random_pure_partitioned(SetPartition.of([0, 1, 2]), rng)
        grid = np.linspace(0.0, 1.0, 11)
        values = [purity(depolarize_interpolate(psi, lam)) for lam in grid]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_lambda_range_guard(self):
        psi = maximally_mixed(1)  # not pure: also exercises the purity gate below
        with pytest.raises(InvalidArgumentError):
            depolarize_interpolate(dm_from_vector(np.array([1.0, 0.0])), -0.1)
        with pytest.raises(InvalidArgumentError):
            depolarize_interpolate(dm_from_vector(np.array([1.0, 0.0])), 1.1)
        with pytest.raises(ContractViolationError):
            depolarize_interpolate(psi, 0.5)


class TestPurity:
    def test_known_values(self):
        assert purity(maximally_mixed(6)) == pytest.approx(1 / 64, abs=1e-12)
        psi = dm_from_vector(np.array([1.0, 0.0, 0.0, 0.0]))
        assert purity(psi) == pytest.approx(1.0, abs=1e-12)

    def test_half_depolarized_two_qubits(self):
        psi = dm_from_vector(np.array([1.0, 0.0, 0.0, 0.0]))
        assert purity(depolarize_interpolate(psi, 0.5)) == pytest.approx(0.4375, abs=1e-12)


class TestLabeledState:
    def test_partition_must_cover(self):
        dm = maximally_mixed(2)
        LabeledState(dm, SetPartition.of([0], [1]))
        with pytest.raises(InvalidArgumentError):
            LabeledState(dm, SetPartition.of([0], [1], [2]))


class TestDerivedRng:
    def test_reproducible_and_distinct(self):
        a = derived_rng(42, 0, 3).standard_normal(4)
        b = derived_rng(42, 0, 3).standard_normal(4)
        c = derived_rng(42, 0, 4).standard_normal(4)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)
