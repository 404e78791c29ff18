"""Outage probability and transmission capacity of spatial-multiplexing
MMSE links in Poisson ad hoc networks, with Monte Carlo validation."""

__version__ = "0.1.0"

from .analytic import (
    CapacityResult,
    LinkConfig,
    NetworkParams,
    contention_density,
    max_cancelable,
    omega,
    outage_probability,
    theta,
    transmission_capacity_asymptotic,
    transmission_capacity_exact,
    xi,
)
from .errors import (
    BracketError,
    ConsistencyError,
    DomainError,
    InfeasibleEpsilonError,
    NumericalError,
)
from .montecarlo import (
    OutageEstimate,
    PppRealization,
    SinrSample,
    conditional_outage,
    mmse_sinr,
    sample_ppp,
    simulate_outage,
    simulate_outage_semianalytic,
    truncation_radius,
)
from .partitions import (
    MultiplicityProfile,
    Partition,
    enumerate_partitions,
    multiplicity_profile,
    partition_count,
    partitions_with_length,
)
