"""Benchmarking toolkit for context-aware point-of-interest recommendation."""

from .datasets import (
    DatasetBundle,
    UserGroups,
    compute_active_users,
    dataset_stats,
    load_dataset,
    write_dataset,
)
from .errors import (
    ColdUserError,
    ConfigurationError,
    ContextUnavailableError,
    DatasetError,
    PlanningError,
    PoibenchError,
)
from .evaluation import MetricsReport, evaluate_run
from .fusion import (
    FusionWeights,
    RankedList,
    fuse,
    product_rule,
    rank_candidates,
    sum_rule,
    tune_weighted_sum,
)
from .runner import RunConfig, RunKey, execute, parse_config, plan_runs, run_from_config
from .scores import ContextScores

__version__ = "0.1.0"

__all__ = [
    "ColdUserError",
    "ConfigurationError",
    "ContextScores",
    "ContextUnavailableError",
    "DatasetBundle",
    "DatasetError",
    "FusionWeights",
    "MetricsReport",
    "PlanningError",
    "PoibenchError",
    "RankedList",
    "RunConfig",
    "RunKey",
    "UserGroups",
    "compute_active_users",
    "dataset_stats",
    "evaluate_run",
    "execute",
    "fuse",
    "load_dataset",
    "parse_config",
    "plan_runs",
    "product_rule",
    "rank_candidates",
    "run_from_config",
    "sum_rule",
    "tune_weighted_sum",
    "write_dataset",
]
