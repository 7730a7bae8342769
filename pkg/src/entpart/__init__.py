"""entpart: entanglement-partition classification from randomized correlator data.

The package samples mixed multi-qubit states with a prescribed entanglement
partition, turns randomized-measurement correlator statistics into feature
vectors, learns a 2-D manifold embedding plus decision-tree classifier over
the partitions, and quantifies entanglement along the crossover to the
maximally mixed state.
"""

from .correlators import (
    FeatureLayout,
    FeatureVector,
    MomentSpec,
    UnitaryDraw,
    connected_correlator,
    correlator_samples,
    estimate_moments,
    feature_dimension,
    plain_correlator,
    sample_unitary_draw,
)
from .negativity import NegativityReport, log_negativity, part_tilde_negativity, partition_log_negativity
from .partitions import (
    SetPartition,
    all_partitions,
    bipartitions,
    entangled_qubit_count,
    format_partition,
    ordered_partitions,
    parse_partition,
    partitions_of_set,
)
from .states import (
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

__version__ = "0.1.0"

__all__ = [
    "DensityMatrix",
    "FeatureLayout",
    "FeatureVector",
    "LabeledState",
    "MomentSpec",
    "NegativityReport",
    "SetPartition",
    "UnitaryDraw",
    "all_partitions",
    "bipartitions",
    "connected_correlator",
    "correlator_samples",
    "depolarize_interpolate",
    "derived_rng",
    "dm_from_vector",
    "entangled_qubit_count",
    "estimate_moments",
    "feature_dimension",
    "format_partition",
    "log_negativity",
    "maximally_mixed",
    "ordered_partitions",
    "parse_partition",
    "part_tilde_negativity",
    "partition_log_negativity",
    "partitions_of_set",
    "plain_correlator",
    "purity",
    "random_mixed_partitioned",
    "random_pure_partitioned",
    "reduced_state",
    "sample_unitary_draw",
]
