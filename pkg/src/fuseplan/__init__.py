"""Exhaustive fusion-setup analysis for serverless task DAGs."""

from .analysis import (
    AlphaGrid,
    OptimizationStep,
    SweepReport,
    alpha_sweep,
    baseline_comparison,
    greedy_optimize_path,
    normalize_metrics,
    pareto_front,
    score,
    sync_fuse_heuristic,
)
from .app import (
    AppGraph,
    AppValidationError,
    CallEdge,
    CallMode,
    Task,
    builtin_app,
    parse_app,
    serialize_app,
    sync_skeleton,
)
from .fusion import (
    DEFAULT_LEVELS,
    FusionPartition,
    FusionSetup,
    ResourceConfig,
    canonical_name,
    count_setups_tree,
    enumerate_partitions,
    enumerate_setups,
    parse_setup_name,
    singleton_setup,
)
from .pricing import (
    InstanceBasedPricing,
    PricingModel,
    SetupMetrics,
    TraditionalPricing,
    cost_of,
    metrics_for,
)
from .runner import RunRow, metrics_from_rows, run_all, write_results_csv
from .sim import (
    ColdPolicy,
    InvocationRecord,
    PlatformModel,
    SimResult,
    simulate,
    task_duration,
)
from .workload import CalibrationResult, calibrate_workload, ingest_trace, lucas_lehmer

__version__ = "0.1.0"

__all__ = [
    "AlphaGrid",
    "AppGraph",
    "AppValidationError",
    "CalibrationResult",
    "CallEdge",
    "CallMode",
    "ColdPolicy",
    "DEFAULT_LEVELS",
    "FusionPartition",
    "FusionSetup",
    "InstanceBasedPricing",
    "InvocationRecord",
    "OptimizationStep",
    "PlatformModel",
    "PricingModel",
    "ResourceConfig",
    "RunRow",
    "SetupMetrics",
    "SimResult",
    "SweepReport",
    "Task",
    "TraditionalPricing",
    "alpha_sweep",
    "baseline_comparison",
    "builtin_app",
    "calibrate_workload",
    "canonical_name",
    "cost_of",
    "count_setups_tree",
    "enumerate_partitions",
    "enumerate_setups",
    "greedy_optimize_path",
    "ingest_trace",
    "lucas_lehmer",
    "metrics_for",
    "metrics_from_rows",
    "normalize_metrics",
    "pareto_front",
    "parse_app",
    "parse_setup_name",
    "run_all",
    "score",
    "serialize_app",
    "simulate",
    "singleton_setup",
    "sync_fuse_heuristic",
    "sync_skeleton",
    "task_duration",
    "write_results_csv",
]
