"""k-out random subgraphs of the hypercube: samplers, structure and connectivity analyses."""

from .connectivity import (
    active_set,
    degree_census,
    is_connected,
    k0,
    k1,
    minimal_disconnected_sets,
    plant_subcube_component,
    subcube_component_scan,
    vertex_connectivity,
)
from .errors import BudgetError
from .experiments import ExperimentConfig, TrialRecord, run, summarize, threshold_sweep
from .hypercube import SubcubeSpec, boundary_size, edge_count, iso_lower_bound
from .sampler import (
    FunctionalMap,
    KOutSample,
    extend_half,
    read_sample,
    sample_kout,
    sample_one_out,
    staged_sample,
    write_sample,
)
from .seeding import Seed
from .structure import components, count_connected_sets, cycle_census, pair_statistic, trajectory
from .walk import WalkParams, exact_distribution, simulate_walks

__version__ = "0.1.0"
