"""Certified lower bounds on uniform expansion exponents of 1D maps.

Interval arithmetic with directed rounding, weighted-digraph map
representations, Karp's minimum cycle mean with cycle extraction,
selective partition refinement, and interval-Newton periodic-orbit
proofs providing matching upper bounds.
"""

__version__ = "0.1.0"

from .errors import (
    DivisionByZeroInterval,
    DomainError,
    EmptyPartition,
    ExplodedEnclosure,
    IntervalRangeError,
    InvalidDelta,
    LoopPresent,
    NegativeReducedCycle,
    NotStronglyConnected,
    TooFewIntervals,
)
from .intervals import (
    Interval,
    abs_outer,
    arith,
    hull,
    intersect,
    intersects,
    ln_outer,
    point,
    split_at_representable_midpoint,
    sqrt_outer,
    subset_of_interior,
)
from .maps import CriticalNeighbourhood, MapFamily, QuadraticFamily, make_family
from .partition import (
    AdmissiblePartition,
    derivative_scaled_partition,
    split_elements,
    uniform_partition,
    validate,
)
from .graph import (
    Cycle,
    WeightedDigraph,
    build_representation,
    compute_C,
    karp_min_cycle_mean,
    min_cycle_mean_full,
    min_loop,
    remove_loops,
    scc_decompose,
)
from .expansion import (
    ExpansionCertificate,
    RefinementConfig,
    expansion_lower_bound,
    expansion_static,
    expansion_uniform_baseline,
    refine_partition,
)
from .orbit import OrbitCertificate, OrbitFailure, iterate_enclosure, prove_periodic_orbit
from .sweep import SweepSpec, bifurcation_data, grid_points, run_sweep

__all__ = [name for name in dir() if not name.startswith("_")]
