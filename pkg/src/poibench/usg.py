"""User-interest / social / geographical relevance channels (USG-style).

Interest is user-based collaborative filtering over binary train vectors;
social uses Jaccard similarity of friend sets; geography multiplies a
fitted distance power law over the user's visited POIs (in log space).
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import ContextUnavailableError
from .geo import haversine_km, pairwise_haversine_km
from .scores import assemble, candidate_pois

MIN_DISTANCE_KM = 0.01
N_DISTANCE_BINS = 20
LOG_SCORE_FLOOR = -700.0


@dataclass
class GeoPowerLaw:
    """Distance-probability law w(d) = a * d^b with a minimum-distance clamp."""

    a: float
    b: float
    d_min: float = MIN_DISTANCE_KM

    def log_w(self, d):
        d = np.maximum(np.asarray(d, dtype=float), self.d_min)
        return np.log(self.a) + self.b * np.log(d)


def _user_distance_pairs(bundle):
    """Pairwise distances within each user's train POI set, concatenated."""
    out = []
    for user in range(bundle.n_users):
        pois = bundle.train.user_pois(user)
        if pois.size < 2:
            continue
        d = pairwise_haversine_km(bundle.geo.lat[pois], bundle.geo.lon[pois])
        iu = np.triu_indices(pois.size, k=1)
        out.append(d[iu])
    if not out:
        return np.empty(0)
    return np.concatenate(out)


def fit_geo_power_law(bundle):
    """Least-squares log-log fit of distance probabilities over log-spaced bins."""
    return fit_geo_power_law_from_distances(_user_distance_pairs(bundle))


def fit_geo_power_law_from_distances(dists):
    dists = np.asarray(dists, dtype=float)
    dists = dists[dists > 0]
    fallback = GeoPowerLaw(a=1.0, b=-1.0)
    if dists.size < 2:
        warnings.warn("not enough distance pairs; using fallback power law")
        return fallback
    edges = np.geomspace(max(MIN_DISTANCE_KM, dists.min()), dists.max(), N_DISTANCE_BINS + 1)
    counts, edges = np.histogram(dists, bins=edges)
    centers = np.sqrt(edges[:-1] * edges[1:])
    mask = counts > 0
    if mask.sum() < 2:
        warnings.warn("distance histogram degenerate; using fallback power law")
        return fallback
    probs = counts[mask] / counts.sum()
    coef = np.polyfit(np.log(centers[mask]), np.log(probs), 1)
    return GeoPowerLaw(a=float(np.exp(coef[1])), b=float(coef[0]))


def geo_scores(model, bundle, user, candidates=None):
    """Product over visited POIs of w(distance), computed and clamped in log space."""
    if candidates is None:
        candidates = candidate_pois(bundle, user)
    pois = bundle.train.user_pois(user)
    if pois.size == 0:
        return np.zeros(candidates.size)
    d = haversine_km(
        bundle.geo.lat[pois][:, None],
        bundle.geo.lon[pois][:, None],
        bundle.geo.lat[candidates][None, :],
        bundle.geo.lon[candidates][None, :],
    )
    log_score = model.log_w(d).sum(axis=0)
    return np.exp(np.maximum(log_score, LOG_SCORE_FLOOR))


def user_interest_scores(bundle, user, candidates=None):
    """Cosine-weighted collaborative filtering over binary train vectors."""
    if candidates is None:
        candidates = candidate_pois(bundle, user)
    r = bundle.train.to_csr_binary()
    row = r.getrow(user)
    if row.nnz == 0:
        return np.zeros(candidates.size)
    norms = np.sqrt(np.asarray(r.multiply(r).sum(axis=1)).ravel())
    overlap = np.asarray((r @ row.T).todense()).ravel()
    with np.errstate(divide="ignore", invalid="ignore"):
        sims = np.where(norms > 0, overlap / (norms * norms[user]), 0.0)
    sims[user] = 0.0
    denom = sims.sum()
    if denom == 0.0:
        return np.zeros(candidates.size)
    weighted = sparse.csr_matrix(sims) @ r
    return np.asarray(weighted.todense()).ravel()[candidates] / denom


def social_similarity(graph, u, v):
    """Jaccard similarity of the two users' friend sets (0 when both are empty)."""
    fu = set(graph.friends(u).tolist())
    fv = set(graph.friends(v).tolist())
    union = fu | fv
    if not union:
        return 0.0
    return len(fu & fv) / len(union)


def social_interest_scores(bundle, user, candidates=None):
    """Friend check-ins weighted by friend-set Jaccard similarity."""
    if bundle.social.empty:
        raise ContextUnavailableError(
            f"dataset {bundle.name!r} has no social relations"
        )
    if candidates is None:
        candidates = candidate_pois(bundle, user)
    friends = bundle.social.friends(user)
    if friends.size == 0:
        return np.zeros(candidates.size)
    sims = np.array([social_similarity(bundle.social, user, int(f)) for f in friends])
    denom = sims.sum()
    if denom == 0.0:
        return np.zeros(candidates.size)
    rows = bundle.train.to_csr_binary()[friends]
    weighted = sparse.csr_matrix(sims) @ rows
    return np.asarray(weighted.todense()).ravel()[candidates] / denom


class UsgScorer:
    """Per-user (interest, social, geo) channels over candidate POIs."""

    channels = ("interest", "social", "geo")
    required_contexts = ("geo", "social")

    def __init__(self, bundle):
        if bundle.social.empty:
            raise ContextUnavailableError(
                f"dataset {bundle.name!r} lacks the social context"
            )
        self.bundle = bundle
        self.geo_model = fit_geo_power_law(bundle)

    def score_user(self, user):
        candidates = candidate_pois(self.bundle, user)
        if self.bundle.train.user_pois(user).size == 0:
            cols = [np.zeros(candidates.size)] * 3
        else:
            cols = [
                user_interest_scores(self.bundle, user, candidates),
                social_interest_scores(self.bundle, user, candidates),
                geo_scores(self.geo_model, self.bundle, user, candidates),
            ]
        return assemble(user, self.channels, candidates, cols)


def usg_scores(bundle, user):
    """One-shot convenience wrapper; prefer the scorer class for many users."""
    return UsgScorer(bundle).score_user(user)
