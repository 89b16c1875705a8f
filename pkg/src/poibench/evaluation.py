"""Accuracy, beyond-accuracy and fairness metrics over ranked lists.

Accuracy metrics are averaged over users with a nonempty test-split truth
set; beyond-accuracy metrics include every produced list.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

ACCURACY_METRICS = ("Precision", "Recall", "mAP", "nDCG")
BEYOND_ACCURACY_METRICS = ("Coverage", "Novelty", "Diversity", "Personalization")
FAIRNESS_METRICS = ("MADr", "GCE")
ALL_METRICS = ACCURACY_METRICS + BEYOND_ACCURACY_METRICS + FAIRNESS_METRICS

PAIR_SAMPLE_LIMIT = 1_000_000
GCE_PROB_FLOOR = 1e-12


@dataclass
class MetricsReport:
    """Flat metric values plus per-group sub-values and run metadata."""

    metadata: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)
    group_values: dict = field(default_factory=dict)  # (group, key) -> value


# ---------------------------------------------------------------------------
# accuracy


def precision_at_k(ranked_pois, truth, k):
    hits = len(set(np.asarray(ranked_pois)[:k].tolist()) & set(truth))
    return hits / k


def recall_at_k(ranked_pois, truth, k):
    if not truth:
        raise ValueError("recall undefined for empty truth")
    hits = len(set(np.asarray(ranked_pois)[:k].tolist()) & set(truth))
    return hits / len(truth)


def average_precision_at_k(ranked_pois, truth, k):
    """AP = sum of precision@i at hit ranks i <= k, over min(|truth|, k)."""
    if not truth:
        raise ValueError("average precision undefined for empty truth")
    truth = set(truth)
    top = np.asarray(ranked_pois)[:k].tolist()
    hits = 0
    total = 0.0
    for i, poi in enumerate(top, start=1):
        if poi in truth:
            hits += 1
            total += hits / i
    return total / min(len(truth), k)


def map_at_k(lists, truths, k):
    """Mean average precision over users with nonempty truth."""
    aps = [
        average_precision_at_k(rl.pois, truths[rl.user], k)
        for rl in lists
        if truths.get(rl.user)
    ]
    return float(np.mean(aps)) if aps else 0.0


def ndcg_at_k(ranked_pois, truth, k):
    """Binary-gain nDCG: DCG over hit ranks, ideal DCG over min(|truth|, k)."""
    if not truth:
        raise ValueError("nDCG undefined for empty truth")
    truth = set(truth)
    top = np.asarray(ranked_pois)[:k].tolist()
    dcg = sum(1.0 / math.log2(i + 1) for i, poi in enumerate(top, start=1) if poi in truth)
    ideal = sum(1.0 / math.log2(i + 1) for i in range(1, min(len(truth), k) + 1))
    return dcg / ideal


# ---------------------------------------------------------------------------
# beyond-accuracy


def catalog_coverage(lists, poi_count):
    """Percentage of the POI catalog recommended to at least one user."""
    if poi_count == 0:
        return 0.0
    union = set()
    for rl in lists:
        union.update(rl.pois.tolist())
    return 100.0 * len(union) / poi_count


def novelty(lists, bundle):
    """Mean self-information of recommended items, popularity from train only.

    pop(p) = distinct train visitors of p / users, floored at 1/users so a
    never-visited item is as novel as a single-visitor one.
    """
    visitors = np.asarray((bundle.train.to_csr_binary() > 0).sum(axis=0)).ravel()
    n_users = max(bundle.n_users, 1)
    pop = np.maximum(visitors, 1.0) / n_users
    per_list = [
        float(np.mean(-np.log2(pop[rl.pois]))) for rl in lists if len(rl) > 0
    ]
    return float(np.mean(per_list)) if per_list else 0.0


def intra_list_diversity(lists, bundle):
    """1 - mean pairwise cosine similarity of items' train check-in vectors."""
    m = bundle.train.to_csr().tocsc()
    norms = np.sqrt(np.asarray(m.multiply(m).sum(axis=0)).ravel())
    per_list = []
    for rl in lists:
        n = len(rl)
        if n == 0:
            continue
        if n == 1:
            per_list.append(1.0)
            continue
        sub = m[:, rl.pois]
        gram = np.asarray((sub.T @ sub).todense())
        outer = np.outer(norms[rl.pois], norms[rl.pois])
        with np.errstate(divide="ignore", invalid="ignore"):
            sims = np.where(outer > 0, gram / outer, 0.0)
        iu = np.triu_indices(n, k=1)
        per_list.append(1.0 - float(sims[iu].mean()))
    return float(np.mean(per_list)) if per_list else 0.0


def personalization(lists, list_limit, seed=42):
    """1 - mean pairwise list overlap, sampling pairs past one million."""
    sets = [set(rl.pois.tolist()) for rl in lists]
    n = len(sets)
    if n < 2:
        return 0.0
    n_pairs = n * (n - 1) // 2
    if n_pairs <= PAIR_SAMPLE_LIMIT:
        pairs = ((i, j) for i in range(n) for j in range(i + 1, n))
        total = sum(len(sets[i] & sets[j]) for i, j in pairs)
        count = n_pairs
    else:
        rng = np.random.default_rng(seed)
        total = 0
        count = PAIR_SAMPLE_LIMIT
        drawn = 0
        while drawn < count:
            block = count - drawn
            us = rng.integers(0, n, size=block)
            vs = rng.integers(0, n, size=block)
            for u, v in zip(us, vs):
                if u == v:
                    continue
                total += len(sets[u] & sets[v])
                drawn += 1
                if drawn == count:
                    break
    return 1.0 - total / (count * list_limit)


# ---------------------------------------------------------------------------
# fairness


def mad_r(per_user_values, groups):
    """Absolute difference of group means (recommendation-score parity)."""
    means = []
    for group in (groups.active, groups.inactive):
        vals = [v for u, v in per_user_values.items() if u in group]
        means.append(float(np.mean(vals)) if vals else 0.0)
    return abs(means[0] - means[1])


def gce(per_user_utilities, groups, beta=2.0):
    """Generalized cross entropy of group utility shares vs a uniform split.

    Returns None when total utility is zero (undefined). Shares are floored
    at 1e-12 to keep the beta = 2 form finite.
    """
    if beta in (0.0, 1.0):
        raise ConfigurationError("GCE beta must not be 0 or 1")
    sums = []
    for group in (groups.active, groups.inactive):
        sums.append(sum(v for u, v in per_user_utilities.items() if u in group))
    total = sum(sums)
    if total == 0:
        return None
    p = np.maximum(np.asarray(sums) / total, GCE_PROB_FLOOR)
    p_fair = np.full(len(sums), 1.0 / len(sums))
    return float(
        (1.0 / (beta * (1.0 - beta))) * (np.sum(p_fair**beta * p ** (1.0 - beta)) - 1.0)
    )


# ---------------------------------------------------------------------------
# orchestration


def evaluate_run(
    lists,
    bundle,
    groups,
    metrics,
    top_k,
    list_limit,
    metadata=None,
    fused_score_means=None,
    seed=42,
):
    """Compute the selected metrics over the given ranked lists.

    ``fused_score_means`` (user -> mean fused score of their recommended
    items) feeds MADr; per-user nDCG@top_k feeds GCE. Users without test
    truth are excluded from accuracy averages only.
    """
    unknown = [m for m in metrics if m not in ALL_METRICS]
    if unknown:
        raise ConfigurationError(
            f"unknown metrics {unknown}; valid names are {list(ALL_METRICS)}"
        )
    wants_fairness = any(m in FAIRNESS_METRICS for m in metrics)
    if wants_fairness and groups is None:
        raise ConfigurationError("fairness metrics require computed user groups")

    report = MetricsReport(metadata=dict(metadata or {}))
    truths = {rl.user: bundle.test_truth(rl.user) for rl in lists}
    evaluable = [rl for rl in lists if truths[rl.user]]

    def accuracy_values(subset):
        out = {}
        if not subset:
            return {m: 0.0 for m in ACCURACY_METRICS if m in metrics}
        if "Precision" in metrics:
            out["Precision"] = float(
                np.mean([precision_at_k(rl.pois, truths[rl.user], top_k) for rl in subset])
            )
        if "Recall" in metrics:
            out["Recall"] = float(
                np.mean([recall_at_k(rl.pois, truths[rl.user], top_k) for rl in subset])
            )
        if "mAP" in metrics:
            out["mAP"] = map_at_k(subset, truths, top_k)
        if "nDCG" in metrics:
            out["nDCG"] = float(
                np.mean([ndcg_at_k(rl.pois, truths[rl.user], top_k) for rl in subset])
            )
        return out

    for name, value in accuracy_values(evaluable).items():
        report.values[f"{name}@{top_k}"] = value

    if "Coverage" in metrics:
        report.values[f"Coverage@{list_limit}"] = catalog_coverage(lists, bundle.n_pois)
    if "Novelty" in metrics:
        report.values[f"Novelty@{list_limit}"] = novelty(lists, bundle)
    if "Diversity" in metrics:
        report.values[f"Diversity@{list_limit}"] = intra_list_diversity(lists, bundle)
    if "Personalization" in metrics:
        report.values[f"Personalization@{list_limit}"] = personalization(
            lists, list_limit, seed=seed
        )

    if wants_fairness:
        if "MADr" in metrics:
            if fused_score_means is None:
                fused_score_means = {
                    rl.user: float(rl.scores.mean()) if len(rl) else 0.0 for rl in lists
                }
            report.values[f"MADr@{list_limit}"] = mad_r(fused_score_means, groups)
        if "GCE" in metrics:
            utilities = {
                rl.user: ndcg_at_k(rl.pois, truths[rl.user], top_k) for rl in evaluable
            }
            value = gce(utilities, groups)
            if value is not None:
                report.values[f"GCE@{top_k}"] = value
        for group_name, members in (("active", groups.active), ("inactive", groups.inactive)):
            subset = [rl for rl in evaluable if rl.user in members]
            for name, value in accuracy_values(subset).items():
                report.group_values[(group_name, f"{name}@{top_k}")] = value

    return report
