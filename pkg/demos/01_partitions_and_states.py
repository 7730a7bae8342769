#!/usr/bin/env python3
"""Entanglement partitions and random partitioned states.

Walks through the combinatorial layer (set partitions of the qubit register)
and the state sampler built on top of it: Haar-random pure states that factor
across a partition, and their uniform-weight convex mixtures.
"""

import numpy as np

from entpart import (
    SetPartition,
    all_partitions,
    bipartitions,
    entangled_qubit_count,
    ordered_partitions,
    purity,
    random_mixed_partitioned,
    random_pure_partitioned,
    reduced_state,
)

rng = np.random.default_rng(0)

# ---------------------------------------------------------------------------
# The label space: set partitions of {1..N}
# ---------------------------------------------------------------------------
print("All partitions of a 3-qubit register:")
for p in all_partitions(3):
    print("  ", p, " shape:", p.shape, " entangled qubits:", entangled_qubit_count(p))

print("\nOrdered partitions (one per shape) for N = 6:")
for p in ordered_partitions(6):
    print("  ", p)

part = (0, 1, 2, 3)
print(f"\nBipartitions of a 4-qubit part: {len(bipartitions(part))} (= 2^3 - 1)")

# ---------------------------------------------------------------------------
# Pure states factor across parts; marginals of entangled parts are mixed
# ---------------------------------------------------------------------------
p = SetPartition.of([0], [1, 2])
psi = random_pure_partitioned(p, rng)
print(f"\nPure state of partition {p}: purity = {purity(psi):.6f}")
print(f"  marginal on qubit 1 (separable): purity = {purity(reduced_state(psi, [0])):.6f}")
print(f"  marginal on qubit 2 (inside an entangled pair): purity = {purity(reduced_state(psi, [1])):.6f}")

# ---------------------------------------------------------------------------
# Mixtures of ten such pure states model the noisy preparation circuit
# ---------------------------------------------------------------------------
rho = random_mixed_partitioned(p, 10, rng)
print(f"\nMixture of 10 pure states: purity = {purity(rho):.4f} (pure would be 1)")
eigs = np.linalg.eigvalsh(rho.matrix)
print(f"  spectrum in [{eigs.min():.2e}, {eigs.max():.4f}], trace = {eigs.sum():.6f}")
