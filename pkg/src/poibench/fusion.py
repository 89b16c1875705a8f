"""Polynomial fusion of three context channels and top-N ranking.

The fused preference is the full degree-3 polynomial

    l1*c1 + l2*c2 + l3*c3 + l12*c1*c2 + l13*c1*c3 + l23*c2*c3 + l123*c1*c2*c3

with the product rule activating only l123, the sum rule only the three
linear terms, and the weighted sum tuning the linear terms on the tune split.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .evaluation import ndcg_at_k


@dataclass(frozen=True)
class FusionWeights:
    l1: float = 0.0
    l2: float = 0.0
    l3: float = 0.0
    l12: float = 0.0
    l13: float = 0.0
    l23: float = 0.0
    l123: float = 0.0


@dataclass
class RankedList:
    """One user's top-N recommendation: poi ids with non-increasing scores."""

    user: int
    pois: np.ndarray
    scores: np.ndarray

    def __len__(self):
        return int(self.pois.size)


def fuse(weights, c):
    """Evaluate the fusion polynomial on a (c1, c2, c3) triple."""
    c1, c2, c3 = c
    return (
        weights.l1 * c1
        + weights.l2 * c2
        + weights.l3 * c3
        + weights.l12 * c1 * c2
        + weights.l13 * c1 * c3
        + weights.l23 * c2 * c3
        + weights.l123 * c1 * c2 * c3
    )


def fuse_many(weights, values):
    """Vectorized fuse over an (n, 3) channel matrix."""
    c1, c2, c3 = values[:, 0], values[:, 1], values[:, 2]
    return fuse(weights, (c1, c2, c3))


def product_rule():
    return FusionWeights(l123=1.0)


def sum_rule():
    return FusionWeights(l1=1.0, l2=1.0, l3=1.0)


def weighted_sum_rule(l1, l2, l3):
    return FusionWeights(l1=l1, l2=l2, l3=l3)


def simplex_grid(step=0.1):
    """All (l1, l2, l3) with entries in {0, step, ...} summing to 1, in
    ascending lexicographic order."""
    n = round(1.0 / step)
    grid = []
    for i in range(n + 1):
        for j in range(n + 1 - i):
            k = n - i - j
            grid.append((i * step, j * step, k * step))
    return grid


def rank_vector(user, candidates, scores, list_limit):
    """Top ``list_limit`` candidates by score, ties to the lower poi id."""
    scores = np.asarray(scores, dtype=float)
    order = np.lexsort((candidates, -scores))[:list_limit]
    return RankedList(user=int(user), pois=candidates[order], scores=scores[order])


def rank_candidates(context_scores, weights, list_limit):
    """Fuse a user's channels and return their top-N ranked list."""
    if list_limit < 1:
        raise ConfigurationError(f"listLimit must be >= 1, got {list_limit}")
    fused = fuse_many(weights, context_scores.values)
    return rank_vector(context_scores.user, context_scores.candidates, fused, list_limit)


def tune_weighted_sum(scores, tune_truth, k):
    """Pick linear weights on the 0.1-step unit simplex maximizing mean
    nDCG@k on the tune split.

    ``scores`` is an iterable of per-user ContextScores (streamed, so it
    may be a generator); ``tune_truth`` maps user id to their tune-split
    POI set. Ties keep the lexicographically smallest (l1, l2, l3).
    """
    grid = simplex_grid()
    weights = [weighted_sum_rule(*point) for point in grid]
    totals = np.zeros(len(grid))
    n_users = 0
    for s in scores:
        truth = tune_truth.get(s.user)
        if not truth:
            continue
        n_users += 1
        for idx, w in enumerate(weights):
            ranked = rank_candidates(s, w, k)
            totals[idx] += ndcg_at_k(ranked.pois, truth, k)
    if n_users == 0:
        raise ConfigurationError("tune split is empty; cannot fit weighted-sum fusion")
    # grid is in ascending lexicographic order and argmax keeps the first
    # maximum, which realizes the smallest-(l1, l2, l3) tie-break.
    return weights[int(np.argmax(totals))]
