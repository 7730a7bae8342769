#!/usr/bin/env python3
"""Randomized-measurement correlators and their moment statistics.

Every register qubit is rotated by an independent Haar-random unitary before
a Pauli-Z readout. Plain correlators of qubit subsets combine into connected
correlators (joint cumulants), whose even Monte-Carlo moments form the
feature vector of a state. Two analytic benchmarks close the loop.
"""

import numpy as np

from entpart import (
    MomentSpec,
    SetPartition,
    correlator_samples,
    dm_from_vector,
    estimate_moments,
    feature_dimension,
    maximally_mixed,
    random_pure_partitioned,
)

rng = np.random.default_rng(1)

# ---------------------------------------------------------------------------
# A single pure qubit: the squared correlator Haar-averages to 1/3
# ---------------------------------------------------------------------------
psi = dm_from_vector(np.array([1.0, 0.0]))
spec = MomentSpec(t=(2,), k=(1,), n_unit=4000)
fv = estimate_moments(psi, spec, rng)
print(f"single qubit M^2 = {fv.values[0]:.4f}  (Haar average of cos^2 is 1/3)")

# ---------------------------------------------------------------------------
# Bell pair: vanishing one-point signals, connected two-point moment 1/3
# ---------------------------------------------------------------------------
bell = dm_from_vector(np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2))
fv = estimate_moments(bell, MomentSpec(t=(2,), k=(1, 2), n_unit=4000), rng)
print("Bell pair features:", {n: round(v, 4) for n, v in zip(fv.layout.column_names(), fv.values)})

# ---------------------------------------------------------------------------
# The maximally mixed register carries no signal at all
# ---------------------------------------------------------------------------
fv = estimate_moments(maximally_mixed(3), MomentSpec(t=(2, 4), k=(1, 2, 3), n_unit=200), rng)
print(f"maximally mixed: max |feature| = {np.max(np.abs(fv.values))}")

# ---------------------------------------------------------------------------
# Cross-part cumulants vanish draw by draw for product states
# ---------------------------------------------------------------------------
p = SetPartition.of([0, 1], [2])
rho = random_pure_partitioned(p, rng)
samples = correlator_samples(rho, k_max=3, n_unit=3, rng=rng)
for sub in ((0, 2), (1, 2), (0, 1, 2)):
    print(f"connected correlator {sub} per draw:", np.round(samples.connected[sub], 12))
print("subset (0,1) stays inside one part:", np.round(samples.connected[(0, 1)], 4))

# ---------------------------------------------------------------------------
# Feature dimension grows as (t0/2)(2^N - 1) for the full spec
# ---------------------------------------------------------------------------
full = MomentSpec(t=(2, 4, 6, 8, 10), k=(1, 2, 3, 4, 5, 6), n_unit=1)
print(f"feature dimension for N=6, t<=10, all orders: {feature_dimension(6, full)}")
