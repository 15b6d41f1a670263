"""Multi-deadline DAG scheduling toolkit: callback-graph decomposition,
deterministic multicore scheduling simulation, and acceptance-ratio
experiments."""

from .taskmodel import (
    Callback,
    CallbackGraph,
    DagTask,
    GraphEdge,
    ModelError,
    RadBaseTable,
    TaskSet,
    Vertex,
    assign_deadlines,
    critical_path_length,
    decompose,
    descendant_sinks,
    hyper_period,
    rad_base_table,
    total_utilization,
)
from .simulator import (
    NON_PREEMPTIVE,
    PREEMPTIVE,
    Policy,
    SimResult,
    detect_miss,
    get_policy,
    rad,
    run,
)
from .workload import (
    ExecTimeSampler,
    GenConfig,
    build_default_template,
    default_sampler,
    generate,
    realized_normalized_utilization,
)
from .experiment import CampaignConfig, CampaignSummary, run_campaign, write_csv

__version__ = "0.1.0"
