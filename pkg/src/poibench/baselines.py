"""Context-free baselines: most-popular and matrix factorization."""

from dataclasses import dataclass, field

import numpy as np

from .errors import PoibenchError
from .scores import candidate_pois


@dataclass
class MfHyperParams:
    factors: int = 50
    learning_rate: float = 0.01
    regularization: float = 0.02
    epochs: int = 30
    negatives_per_positive: int = 4
    seed: int = 42


@dataclass
class MfModel:
    user_factors: np.ndarray
    item_factors: np.ndarray
    params: MfHyperParams
    losses: list = field(default_factory=list)


def most_pop_scores(bundle, user, candidates=None):
    """Global train popularity per candidate POI."""
    if candidates is None:
        candidates = candidate_pois(bundle, user)
    pop = np.asarray(bundle.train.to_csr().sum(axis=0)).ravel()
    return pop[candidates]


def train_mf(bundle, params=None):
    """SGD matrix factorization on binarized targets with sampled negatives.

    Positives (observed train entries) have target 1; per epoch each
    positive is paired with uniformly sampled unobserved negatives with
    target 0. Update order is fixed, so results are seed-deterministic.
    """
    if params is None:
        params = MfHyperParams()
    if bundle.train.entry_count == 0:
        raise PoibenchError("cannot train MF on an empty train matrix")
    rng = np.random.default_rng(params.seed)
    n_users, n_pois = bundle.n_users, bundle.n_pois
    u_f = rng.uniform(-0.01, 0.01, size=(n_users, params.factors))
    i_f = rng.uniform(-0.01, 0.01, size=(n_pois, params.factors))
    pos_u = bundle.train.user_ids
    pos_p = bundle.train.poi_ids
    observed = set(zip(pos_u.tolist(), pos_p.tolist()))
    lr, reg = params.learning_rate, params.regularization

    losses = []
    for _ in range(params.epochs):
        samples_u = []
        samples_p = []
        targets = []
        for u, p in zip(pos_u, pos_p):
            samples_u.append(u)
            samples_p.append(p)
            targets.append(1.0)
            for _ in range(params.negatives_per_positive):
                np_p = int(rng.integers(n_pois))
                tries = 0
                while (int(u), np_p) in observed and tries < 10:
                    np_p = int(rng.integers(n_pois))
                    tries += 1
                samples_u.append(u)
                samples_p.append(np_p)
                targets.append(0.0)
        epoch_loss = 0.0
        for u, p, t in zip(samples_u, samples_p, targets):
            uf = u_f[u]
            pf = i_f[p]
            err = t - float(uf @ pf)
            epoch_loss += err * err
            u_f[u] = uf + lr * (err * pf - reg * uf)
            i_f[p] = pf + lr * (err * uf - reg * pf)
        if not np.isfinite(epoch_loss):
            raise PoibenchError(
                f"MF training diverged (non-finite loss) with {params}"
            )
        losses.append(epoch_loss / len(targets))
    return MfModel(user_factors=u_f, item_factors=i_f, params=params, losses=losses)


def mf_scores(model, user, candidates):
    """Dot-product scores for one user over the given candidate POIs."""
    if not 0 <= user < model.user_factors.shape[0]:
        raise PoibenchError(f"unknown user id {user}")
    candidates = np.asarray(candidates, dtype=np.int64)
    if candidates.size and candidates.max() >= model.item_factors.shape[0]:
        raise PoibenchError("candidate poi id outside the trained model")
    return model.item_factors[candidates] @ model.user_factors[user]


class MostPopScorer:
    """Baseline scorer interface: single raw score vector per user."""

    channels = None
    required_contexts = ()

    def __init__(self, bundle):
        self.bundle = bundle
        self._pop = np.asarray(bundle.train.to_csr().sum(axis=0)).ravel()

    def score_user(self, user):
        candidates = candidate_pois(self.bundle, user)
        return candidates, self._pop[candidates]


class MfScorer:
    """Baseline scorer backed by a trained factor model."""

    channels = None
    required_contexts = ()

    def __init__(self, bundle, params=None):
        self.bundle = bundle
        self.model = train_mf(bundle, params)

    def score_user(self, user):
        candidates = candidate_pois(self.bundle, user)
        return candidates, mf_scores(self.model, user, candidates)
