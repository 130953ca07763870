"""Influence-driven worker recruitment simulator.

Three stages over a directed follower graph: influencer group selection,
independent cascade diffusion, and QoS-based worker recruitment with
substitution, plus an experiment harness comparing recruitment modes.
"""

from .config import ConfigError, ExperimentConfig, load_config
from .diffusion import (
    DiffusionConfig,
    DiffusionOutcome,
    estimate_influence,
    interested_influence,
    simulate_ic,
)
from .expharness import (
    RESULT_HEADER,
    ResultRow,
    RoundReport,
    rows_to_csv_text,
    run_full_comparison,
    run_im_comparison,
    run_interest_comparison,
    run_recruitment_round,
    write_rows,
)
from .geo import haversine_km
from .groupmetrics import (
    AoiPartition,
    InfluencerGroup,
    Task,
    TaskPortfolio,
    distribution_score,
    group_feasible,
    group_rank,
    interest_score,
    score_group,
)
from .influencemax import (
    CombinationCapError,
    GaConfig,
    NoFeasibleGroupError,
    exhaustive_select,
    ga_select,
    greedy_select,
)
from .mcspool import (
    AttributeModel,
    AttributeTable,
    SubareaGeometry,
    Worker,
    WorkerPool,
    constant_sampler,
    empirical_sampler,
    load_attribute_table,
    register,
    uniform_sampler,
)
from .recruitment import (
    DYNAMIC_MODES,
    MODES,
    FilledSlot,
    RecruitConfig,
    RecruitmentResult,
    build_mode_pool,
    eligible,
    interest_level,
    qos,
    recruit_dynamic,
    travel_time,
    travel_time_factor,
)
from .seeding import derive_seed
from .socialgraph import (
    DanglingEdgeError,
    DuplicateNodeError,
    GraphError,
    GraphParseError,
    SocialGraph,
    SocialNode,
    SynthConfig,
    UnknownNodeError,
    filter_candidates,
    generate_interest_split,
    generate_synthetic,
    load_graph,
    load_graph_from_text,
    save_graph,
    unique_followers,
)

__version__ = "0.1.0"
