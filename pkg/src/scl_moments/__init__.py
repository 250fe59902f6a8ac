"""Limiting spectral moments of weighted random matrices with dependent entries.

Theory side: non-crossing pair partitions, adopted trees and alpha**2 tree
integrals. Simulation side: seeded ensembles, trace moments and eigenvalue
statistics. The two meet in the CLI and the acceptance suite.
"""
from .ensembles import EnsembleSpec, MatrixSample, parse_ensemble, sample_matrix
from .partitions import (
    AdoptedGraph,
    AdoptedSequence,
    PairPartition,
    adopted_graph,
    build_adopted_sequence,
    catalan,
    enumerate_nc_pair_partitions,
    find_leaf_block,
    is_noncrossing,
    verify_adopted,
)
from .relations import (
    ConditionReport,
    EquivalenceRelation,
    block_relation,
    condition_counts,
    growth_report,
    wigner_relation,
)
from .spectra import (
    empirical_moments,
    eigenvalues,
    histogram,
    ks_distance,
    semicircle_cdf,
    semicircle_density,
    trace_power_moment,
    variance_decay,
)
from .tree_integrals import j_alpha, j_alpha_bruteforce, scl_verdict, theoretical_moment
from .weights import WeightFn, band, constant, is_phi_constant, periodic_band, phi, phi0

__version__ = "0.1.0"
