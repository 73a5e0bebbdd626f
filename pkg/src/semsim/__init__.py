"""Deterministic agent-based simulation of collective creativity on
shared semantic networks.

A population of agents shares one ring-lattice concept substrate; each agent
rewires it with its own Watts-Strogatz probability p, which tunes the
modularity of its semantic memory. Ideation is a fixed random walk; agents
exchange walk traces, and dyadic stimulation and shared-source redundancy
emerge from the exchange. The experiments module reproduces the four
headline results with full seed-level determinism.
"""

from .errors import (
    DegenerateInputError,
    NoIdentificationError,
    ParameterError,
    SingularDesignError,
)
from .experiments import (
    AgentPopulation,
    ExperimentConfig,
    ExperimentResult,
    build_population,
    experiment1_modularity_vs_p,
    experiment2_breadth_vs_modularity,
    experiment3_stimulation,
    experiment4_redundancy,
    run_all,
    run_sweep,
)
from .graphs import (
    AgentSpec,
    CommunityPartition,
    ConceptGraph,
    SubstrateSpec,
    agent_modularity,
    connected_components,
    detect_communities,
    generate_substrate,
    load_edge_list,
    modularity,
    rewire,
    save_edge_list,
)
from .ideation import (
    BreadthEstimate,
    IdeationTrace,
    breadth,
    expected_breadth,
    random_walk,
)
from .social import (
    ExposureRecord,
    RedundancyInstance,
    incorporate_trace,
    jaccard,
    run_exposure,
    run_redundancy_instance,
)
from .stats import (
    CorrelationResult,
    PanelObservation,
    RegressionResult,
    bootstrap_ci,
    clustered_mean_test,
    cohens_dz,
    kendall,
    ols,
    pearson,
    quantile_bin_partial,
    spearman,
    theil_sen,
    two_way_fe,
)
from .streams import derive_stream

__version__ = "0.1.0"
