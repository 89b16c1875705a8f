"""Config-driven experiment orchestration.

Parses a flat key=value configuration, plans the model x dataset x fusion
matrix, executes runs (skipping any whose output files already exist) and
persists ranked lists plus metric reports atomically.
"""

import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import baselines, geosoca, lore, usg
from .datasets import compute_active_users, load_dataset
from .errors import ConfigurationError, PlanningError
from .evaluation import ALL_METRICS, evaluate_run
from .fusion import (
    RankedList,
    product_rule,
    rank_candidates,
    rank_vector,
    sum_rule,
    tune_weighted_sum,
)

DEFAULT_SEED = 42

CONTEXTUAL_MODELS = {
    "GeoSoCa": geosoca.GeoSoCaScorer,
    "LORE": lore.LoreScorer,
    "USG": usg.UsgScorer,
}
BASELINE_MODELS = ("MostPop", "MF")
MODEL_NAMES = tuple(CONTEXTUAL_MODELS) + BASELINE_MODELS
FUSION_NAMES = ("product", "sum", "weighted")

# contexts beyond coordinates (always required) that each model needs
MODEL_REQUIRED_CONTEXTS = {
    "GeoSoCa": ("social", "categorical"),
    "LORE": ("social",),
    "USG": ("social",),
    "MostPop": (),
    "MF": (),
}

CONFIG_KEYS = (
    "dataDirectory",
    "outputsDir",
    "topK",
    "limitUsers",
    "listLimit",
    "activeUsersPercentage",
    "models",
    "datasets",
    "fusions",
    "evaluationMetrics",
)


@dataclass
class RunConfig:
    data_directory: str
    outputs_dir: str = "Outputs"
    top_k: int = 10
    limit_users: int = -1
    list_limit: int = 10
    active_users_percentage: float = 0.2
    models: tuple = ()
    datasets: tuple = ()
    fusions: tuple = ()
    evaluation_metrics: tuple = ()


@dataclass(frozen=True)
class RunKey:
    model: str
    dataset: str
    fusion: str
    list_limit: int
    limit_users: int

    @property
    def basename(self):
        return (
            f"{self.model}_{self.dataset}_{self.fusion}"
            f"_L{self.list_limit}_U{self.limit_users}"
        )

    def lists_path(self, outputs_dir):
        return os.path.join(outputs_dir, self.basename + ".lists")

    def metrics_path(self, outputs_dir):
        return os.path.join(outputs_dir, self.basename + ".metrics")


@dataclass
class RunSummary:
    executed: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    failed: list = field(default_factory=list)  # (RunKey, message)

    @property
    def ok(self):
        return not self.failed


# ---------------------------------------------------------------------------
# configuration


def _parse_list(value):
    return tuple(item.strip() for item in value.split(",") if item.strip())


def parse_config(path):
    """Read a flat key = value config file; unknown keys are rejected."""
    if not os.path.exists(path):
        raise ConfigurationError(f"config file not found: {path}")
    raw = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigurationError(f"{path}:{lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in CONFIG_KEYS:
                raise ConfigurationError(
                    f"{path}:{lineno}: unknown key {key!r}; valid keys: {list(CONFIG_KEYS)}"
                )
            if key in raw:
                raise ConfigurationError(f"{path}:{lineno}: duplicate key {key!r}")
            raw[key] = value

    def integer(key, default):
        try:
            return int(raw.get(key, default))
        except ValueError:
            raise ConfigurationError(f"config key {key!r} must be an integer") from None

    for required in ("dataDirectory", "models", "datasets", "fusions", "evaluationMetrics"):
        if required not in raw:
            raise ConfigurationError(f"config key {required!r} is required")

    try:
        percentage = float(raw.get("activeUsersPercentage", 0.2))
    except ValueError:
        raise ConfigurationError("activeUsersPercentage must be a number") from None

    config = RunConfig(
        data_directory=raw["dataDirectory"],
        outputs_dir=raw.get("outputsDir", "Outputs"),
        top_k=integer("topK", 10),
        limit_users=integer("limitUsers", -1),
        list_limit=integer("listLimit", 10),
        active_users_percentage=percentage,
        models=_parse_list(raw["models"]),
        datasets=_parse_list(raw["datasets"]),
        fusions=_parse_list(raw["fusions"]),
        evaluation_metrics=_parse_list(raw["evaluationMetrics"]),
    )
    validate_config(config)
    return config


def validate_config(config):
    if config.top_k < 1 or config.list_limit < 1:
        raise ConfigurationError("topK and listLimit must be >= 1")
    if config.top_k > config.list_limit:
        raise ConfigurationError(
            f"topK ({config.top_k}) must not exceed listLimit ({config.list_limit})"
        )
    if config.limit_users != -1 and config.limit_users <= 0:
        raise ConfigurationError("limitUsers must be -1 or positive")
    if not 0.0 < config.active_users_percentage < 1.0:
        raise ConfigurationError("activeUsersPercentage must lie in (0, 1)")
    for model in config.models:
        if model not in MODEL_NAMES:
            raise ConfigurationError(
                f"unknown model {model!r}; valid models: {list(MODEL_NAMES)}"
            )
    for fusion in config.fusions:
        if fusion not in FUSION_NAMES:
            raise ConfigurationError(
                f"unknown fusion {fusion!r}; valid fusions: {list(FUSION_NAMES)}"
            )
    for metric in config.evaluation_metrics:
        if metric not in ALL_METRICS:
            raise ConfigurationError(
                f"unknown metric {metric!r}; valid metrics: {list(ALL_METRICS)}"
            )
    if not (config.models and config.datasets and config.fusions):
        raise ConfigurationError("models, datasets and fusions must be non-empty")
    return config


# ---------------------------------------------------------------------------
# planning


def dataset_contexts(data_directory, name):
    """Which optional contexts a dataset directory provides."""
    base = os.path.join(data_directory, name)
    if not os.path.exists(os.path.join(base, f"{name}_data_size.txt")):
        raise PlanningError(f"dataset {name!r} not found under {data_directory!r}")
    available = set()
    if os.path.exists(os.path.join(base, f"{name}_social_relations.txt")):
        available.add("social")
    if os.path.exists(os.path.join(base, f"{name}_poi_categories.txt")):
        available.add("categorical")
    return available


def plan_runs(config):
    """Cartesian product of models x datasets x fusions, in declaration order.

    Baselines ignore the fusion list (one run per dataset, fusion "none").
    A model requiring a context its dataset lacks fails planning outright.
    """
    plan = []
    for model in config.models:
        for dataset in config.datasets:
            available = dataset_contexts(config.data_directory, dataset)
            missing = [
                ctx for ctx in MODEL_REQUIRED_CONTEXTS[model] if ctx not in available
            ]
            if missing:
                raise PlanningError(
                    f"model {model!r} needs the {missing[0]!r} context, "
                    f"which dataset {dataset!r} does not provide"
                )
            if model in BASELINE_MODELS:
                plan.append(
                    RunKey(model, dataset, "none", config.list_limit, config.limit_users)
                )
            else:
                for fusion in config.fusions:
                    plan.append(
                        RunKey(model, dataset, fusion, config.list_limit, config.limit_users)
                    )
    if not plan:
        raise PlanningError("empty experiment plan")
    return plan


# ---------------------------------------------------------------------------
# output files


def _format_header(run, seed):
    return (
        f"# model={run.model} dataset={run.dataset} fusion={run.fusion} "
        f"listLimit={run.list_limit} limitUsers={run.limit_users} seed={seed}\n"
    )


def _atomic_write(path, text):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path) or ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_lists_file(path, run, lists, seed):
    chunks = [_format_header(run, seed)]
    for rl in lists:
        for poi, score in zip(rl.pois, rl.scores):
            chunks.append(f"{rl.user}\t{poi}\t{float(score)!r}\n")
    _atomic_write(path, "".join(chunks))


def write_metrics_file(path, run, report, seed):
    chunks = [_format_header(run, seed)]
    for key in sorted(report.values):
        chunks.append(f"{key}\t{float(report.values[key])!r}\n")
    for group, key in sorted(report.group_values):
        chunks.append(f"group:{group}:{key}\t{float(report.group_values[(group, key)])!r}\n")
    _atomic_write(path, "".join(chunks))


def read_lists_file(path):
    """Parse a lists file back into header metadata and RankedList objects."""
    header = {}
    per_user = {}
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                for token in line.lstrip("# ").split():
                    key, _, value = token.partition("=")
                    header[key] = value
                continue
            user, poi, score = line.split("\t")
            per_user.setdefault(int(user), []).append((int(poi), float(score)))
    lists = [
        RankedList(
            user=user,
            pois=np.asarray([p for p, _ in items], dtype=np.int64),
            scores=np.asarray([s for _, s in items]),
        )
        for user, items in sorted(per_user.items())
    ]
    return header, lists


# ---------------------------------------------------------------------------
# execution


def make_scorer(model, bundle, seed=DEFAULT_SEED):
    if model in CONTEXTUAL_MODELS:
        return CONTEXTUAL_MODELS[model](bundle)
    if model == "MostPop":
        return baselines.MostPopScorer(bundle)
    if model == "MF":
        return baselines.MfScorer(bundle, baselines.MfHyperParams(seed=seed))
    raise ConfigurationError(f"unknown model {model!r}")


def fusion_weights(name, scorer, bundle, config, workers=1):
    if name == "product":
        return product_rule()
    if name == "sum":
        return sum_rule()
    if name == "weighted":
        tune_truth = {u: bundle.tune_truth(u) for u in range(bundle.n_users)}
        users = [u for u in range(bundle.n_users) if tune_truth[u]]
        scores = _map_users(scorer.score_user, users, workers)
        return tune_weighted_sum(scores, tune_truth, config.top_k)
    raise ConfigurationError(f"unknown fusion {name!r}")


def _map_users(fn, users, workers):
    if workers <= 1:
        return (fn(u) for u in users)
    pool = ThreadPoolExecutor(max_workers=workers)
    # results come back in user order, keeping downstream output deterministic
    return pool.map(fn, users)


def _run_lists(run, scorer, bundle, config, workers):
    users = list(range(bundle.n_users))
    if run.model in BASELINE_MODELS:
        def one(user):
            candidates, raw = scorer.score_user(user)
            return rank_vector(user, candidates, raw, config.list_limit)
        return list(_map_users(one, users, workers))
    weights = fusion_weights(run.fusion, scorer, bundle, config, workers)
    def one(user):
        return rank_candidates(scorer.score_user(user), weights, config.list_limit)
    return list(_map_users(one, users, workers))


def execute(plan, config, workers=1, force=False, seed=DEFAULT_SEED):
    """Run every planned experiment, skipping those with existing outputs.

    Lists are written before metrics so a crash can never leave a metrics
    file without its lists. Individual failures are recorded and do not
    abort the rest of the plan.
    """
    summary = RunSummary()
    bundles = {}
    groups_cache = {}
    for run in plan:
        lists_path = run.lists_path(config.outputs_dir)
        metrics_path = run.metrics_path(config.outputs_dir)
        if not force and os.path.exists(lists_path) and os.path.exists(metrics_path):
            summary.skipped.append(run)
            continue
        try:
            if run.dataset not in bundles:
                bundles[run.dataset] = load_dataset(
                    config.data_directory, run.dataset, config.limit_users
                )
                groups_cache[run.dataset] = compute_active_users(
                    bundles[run.dataset], config.active_users_percentage
                )
            bundle = bundles[run.dataset]
            scorer = make_scorer(run.model, bundle, seed=seed)
            lists = _run_lists(run, scorer, bundle, config, workers)
            write_lists_file(lists_path, run, lists, seed)
            report = evaluate_run(
                lists,
                bundle,
                groups_cache[run.dataset],
                config.evaluation_metrics,
                config.top_k,
                config.list_limit,
                metadata={
                    "model": run.model,
                    "dataset": run.dataset,
                    "fusion": run.fusion,
                    "listLimit": run.list_limit,
                    "topK": config.top_k,
                },
                seed=seed,
            )
            write_metrics_file(metrics_path, run, report, seed)
            summary.executed.append(run)
        except Exception as exc:  # noqa: BLE001 - keep the plan going
            summary.failed.append((run, f"{type(exc).__name__}: {exc}"))
    return summary


def run_from_config(config_path, workers=1, force=False, seed=DEFAULT_SEED):
    config = parse_config(config_path)
    plan = plan_runs(config)
    return execute(plan, config, workers=workers, force=force, seed=seed)
