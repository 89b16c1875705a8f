"""Geographical / social / categorical relevance channels (GeoSoCa-style).

Geography uses an adaptive-bandwidth Gaussian KDE over the user's visited
coordinates; social and categorical raw frequencies go through a power-law
CDF transform fitted on the training data.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ColdUserError, ContextUnavailableError
from .geo import haversine_km, pairwise_haversine_km, project_km
from .scores import assemble, candidate_pois

UNDERFLOW_CLAMP = 1e-300
FALLBACK_BANDWIDTH_KM = 1.0


@dataclass
class AdaptiveKdeModel:
    """Per-user 2D KDE with pilot bandwidth h and per-point bandwidths h_i (km)."""

    lats: np.ndarray
    lons: np.ndarray
    pilot_bandwidth: float
    local_bandwidths: np.ndarray


def _kernel_2d(dist_km, bandwidth):
    """Radially symmetric bivariate normal density at distance d."""
    z = np.exp(-0.5 * (dist_km / bandwidth) ** 2) / (2.0 * math.pi * bandwidth**2)
    return np.where(z < UNDERFLOW_CLAMP, 0.0, z)


def fit_geo_kde(coords):
    """Fit the adaptive KDE on an (n, 2) array of (lat, lon) degrees.

    Pilot bandwidth is Silverman's rule h = 1.06 * sigma * n^(-1/5) with
    sigma the mean of the per-axis standard deviations in km; local
    bandwidths are h * (pilot_density_i / geometric_mean)^(-1/2).
    Degenerate users (single point, zero variance) get h = 1 km.
    """
    coords = np.asarray(coords, dtype=float).reshape(-1, 2)
    n = coords.shape[0]
    if n == 0:
        raise ColdUserError("no visited coordinates to fit a KDE on")
    lats, lons = coords[:, 0], coords[:, 1]
    x, y = project_km(lats, lons)
    sigma = 0.5 * (x.std() + y.std())
    if n < 2 or sigma == 0.0:
        h = FALLBACK_BANDWIDTH_KM
        return AdaptiveKdeModel(lats, lons, h, np.full(n, h))
    h = 1.06 * sigma * n ** (-0.2)
    dists = pairwise_haversine_km(lats, lons)
    pilot = _kernel_2d(dists, h).mean(axis=1)
    pilot = np.maximum(pilot, UNDERFLOW_CLAMP)
    log_g = np.log(pilot).mean()
    local = h * np.exp(-0.5 * (np.log(pilot) - log_g))
    return AdaptiveKdeModel(lats, lons, h, local)


def score_geo(model, candidate):
    """Density at one (lat, lon) candidate."""
    return float(score_geo_many(model, np.asarray([candidate[0]]), np.asarray([candidate[1]]))[0])


def score_geo_many(model, cand_lats, cand_lons):
    """Density at many candidates: mean of per-visit kernels with local bandwidths."""
    d = haversine_km(
        model.lats[:, None], model.lons[:, None], cand_lats[None, :], cand_lons[None, :]
    )
    terms = _kernel_2d(d, model.local_bandwidths[:, None])
    return terms.mean(axis=0)


@dataclass
class PowerLawCdf:
    """CDF of a continuous power law with x_min = 1: F(x) = 1 - x^(1 - alpha)."""

    alpha: float

    def transform(self, x):
        x = np.asarray(x, dtype=float)
        safe = np.maximum(x, 1.0)  # avoid 0**negative warnings; masked out below
        out = np.where(x >= 1.0, 1.0 - safe ** (1.0 - self.alpha), 0.0)
        if out.ndim == 0:
            return float(out)
        return out


def _alpha_from_moments(n, sum_log):
    if n < 10:
        return 2.0
    if sum_log <= 0.0:
        return 10.0
    return 1.0 + n / sum_log


def fit_power_law(samples):
    """Continuous MLE of the exponent over samples >= 1 (x_min fixed at 1)."""
    samples = np.asarray(samples, dtype=float)
    samples = samples[samples >= 1.0]
    return PowerLawCdf(_alpha_from_moments(samples.size, float(np.log(samples).sum())))


# ---------------------------------------------------------------------------
# channel computations


def social_raw(bundle, user, candidates):
    """Sum of friends' train frequencies per candidate POI."""
    friends = bundle.social.friends(user)
    if friends.size == 0:
        return np.zeros(candidates.size)
    sums = np.asarray(bundle.train.to_csr()[friends].sum(axis=0)).ravel()
    return sums[candidates]


def fit_social_transform(bundle):
    """Power-law transform fitted on all positive friend-sum frequencies."""
    if bundle.social.empty:
        raise ContextUnavailableError(
            f"dataset {bundle.name!r} has no social relations"
        )
    raw = bundle.social.adjacency_csr() @ bundle.train.to_csr()
    return fit_power_law(raw.data)


def score_social(bundle, transform, user, candidates=None):
    if bundle.social.empty:
        raise ContextUnavailableError(
            f"dataset {bundle.name!r} has no social relations"
        )
    if candidates is None:
        candidates = candidate_pois(bundle, user)
    return transform.transform(social_raw(bundle, user, candidates))


def _category_bias(bundle, user):
    """User's train-frequency share per category; zero vector for cold users."""
    row = bundle.train.to_csr().getrow(user)
    n_cats = max(bundle.cats.n_categories, 1)
    bias = np.zeros(n_cats)
    total = row.data.sum()
    if total == 0:
        return bias
    for poi, freq in zip(row.indices, row.data):
        for cat in bundle.cats.categories(int(poi)):
            bias[cat] += freq
    return bias / total


def categorical_raw(bundle, user, candidates, poi_popularity=None):
    """POI popularity weighted by the user's category bias, per candidate."""
    if poi_popularity is None:
        poi_popularity = np.asarray(bundle.train.to_csr().sum(axis=0)).ravel()
    bias = _category_bias(bundle, user)
    affinity = bundle.cats.poi_category_csr() @ bias
    return (poi_popularity * affinity)[candidates]


def fit_categorical_transform(bundle):
    """Power-law transform fitted on all users' positive categorical raw scores.

    Only the sample count and sum of logs are needed for the MLE, so raw
    vectors are streamed per user instead of materialized.
    """
    if bundle.cats.empty:
        raise ContextUnavailableError(f"dataset {bundle.name!r} has no categories")
    poi_pop = np.asarray(bundle.train.to_csr().sum(axis=0)).ravel()
    all_pois = np.arange(bundle.n_pois, dtype=np.int64)
    n, sum_log = 0, 0.0
    for user in range(bundle.n_users):
        raw = categorical_raw(bundle, user, all_pois, poi_popularity=poi_pop)
        raw = raw[raw >= 1.0]
        n += raw.size
        sum_log += float(np.log(raw).sum())
    return PowerLawCdf(_alpha_from_moments(n, sum_log))


def score_categorical(bundle, transform, user, candidates=None):
    if bundle.cats.empty:
        raise ContextUnavailableError(f"dataset {bundle.name!r} has no categories")
    if candidates is None:
        candidates = candidate_pois(bundle, user)
    return transform.transform(categorical_raw(bundle, user, candidates))


class GeoSoCaScorer:
    """Per-user (geo, social, categorical) channels over candidate POIs."""

    channels = ("geo", "social", "categorical")
    required_contexts = ("geo", "social", "categorical")

    def __init__(self, bundle):
        if bundle.social.empty:
            raise ContextUnavailableError(
                f"dataset {bundle.name!r} lacks the social context"
            )
        if bundle.cats.empty:
            raise ContextUnavailableError(
                f"dataset {bundle.name!r} lacks the categorical context"
            )
        self.bundle = bundle
        self.social_transform = fit_social_transform(bundle)
        self.categorical_transform = fit_categorical_transform(bundle)
        self._poi_pop = np.asarray(bundle.train.to_csr().sum(axis=0)).ravel()

    def geo_channel(self, user, candidates):
        train_pois = self.bundle.train.user_pois(user)
        if train_pois.size == 0:
            return np.zeros(candidates.size)
        kde = fit_geo_kde(
            np.column_stack(
                (self.bundle.geo.lat[train_pois], self.bundle.geo.lon[train_pois])
            )
        )
        return score_geo_many(
            kde, self.bundle.geo.lat[candidates], self.bundle.geo.lon[candidates]
        )

    def score_user(self, user):
        candidates = candidate_pois(self.bundle, user)
        if self.bundle.train.user_pois(user).size == 0:
            cols = [np.zeros(candidates.size)] * 3
        else:
            cols = [
                self.geo_channel(user, candidates),
                self.social_transform.transform(social_raw(self.bundle, user, candidates)),
                self.categorical_transform.transform(
                    categorical_raw(self.bundle, user, candidates, self._poi_pop)
                ),
            ]
        return assemble(user, self.channels, candidates, cols)


def geosoca_scores(bundle, user):
    """One-shot convenience wrapper; prefer the scorer class for many users."""
    return GeoSoCaScorer(bundle).score_user(user)
