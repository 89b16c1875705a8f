"""Sequential / geographical / social relevance channels (LORE-style).

The sequential channel is an additive first-order Markov chain: transition
probabilities learned from consecutive train check-ins, combined with
exponentially decaying recency weights (most recent visit weighs 1).
"""

import numpy as np
from scipy import sparse

from .errors import ContextUnavailableError
from .geosoca import fit_geo_kde, fit_social_transform, score_geo_many, social_raw
from .scores import assemble, candidate_pois


class TransitionModel:
    """Row-stochastic POI-to-POI transition matrix with raw counts kept."""

    def __init__(self, counts):
        self.counts = counts.tocsr()
        probs = self.counts.astype(float)
        row_sums = np.asarray(probs.sum(axis=1)).ravel()
        scale = np.divide(1.0, row_sums, out=np.zeros_like(row_sums), where=row_sums > 0)
        self.probabilities = sparse.diags(scale) @ probs

    @property
    def n_pois(self):
        return self.counts.shape[0]


def build_transition_model(bundle):
    """Count consecutive-pair transitions per user and row-normalize."""
    rows, cols = [], []
    for user in range(bundle.n_users):
        seq = bundle.train.user_sequence(user)
        if seq.size >= 2:
            rows.append(seq[:-1])
            cols.append(seq[1:])
    if rows:
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        counts = sparse.csr_matrix(
            (np.ones(rows.size, dtype=np.int64), (rows, cols)),
            shape=(bundle.n_pois, bundle.n_pois),
        )
    else:
        counts = sparse.csr_matrix((bundle.n_pois, bundle.n_pois), dtype=np.int64)
    return TransitionModel(counts)


def score_sequential(model, history):
    """Additive-chain score: sum_i 2^-(n-i) * T(l_i, p) over the ordered history."""
    history = np.asarray(history, dtype=np.int64)
    n = history.size
    if n == 0:
        return np.zeros(model.n_pois)
    weights = np.power(2.0, -(n - 1 - np.arange(n, dtype=float)))
    weighted = sparse.csr_matrix(
        (weights, (np.zeros(n, dtype=np.int64), history)), shape=(1, model.n_pois)
    )
    return np.asarray((weighted @ model.probabilities).todense()).ravel()


class LoreScorer:
    """Per-user (geo, sequential, social) channels over candidate POIs."""

    channels = ("geo", "sequential", "social")
    required_contexts = ("geo", "sequential", "social")

    def __init__(self, bundle):
        if bundle.social.empty:
            raise ContextUnavailableError(
                f"dataset {bundle.name!r} lacks the social context"
            )
        self.bundle = bundle
        self.transition = build_transition_model(bundle)
        self.social_transform = fit_social_transform(bundle)

    def score_user(self, user):
        candidates = candidate_pois(self.bundle, user)
        train_pois = self.bundle.train.user_pois(user)
        if train_pois.size == 0:
            cols = [np.zeros(candidates.size)] * 3
        else:
            kde = fit_geo_kde(
                np.column_stack(
                    (self.bundle.geo.lat[train_pois], self.bundle.geo.lon[train_pois])
                )
            )
            geo = score_geo_many(
                kde, self.bundle.geo.lat[candidates], self.bundle.geo.lon[candidates]
            )
            seq = score_sequential(self.transition, self.bundle.train.user_sequence(user))
            cols = [
                geo,
                seq[candidates],
                self.social_transform.transform(social_raw(self.bundle, user, candidates)),
            ]
        return assemble(user, self.channels, candidates, cols)


def lore_scores(bundle, user):
    """One-shot convenience wrapper; prefer the scorer class for many users."""
    return LoreScorer(bundle).score_user(user)
