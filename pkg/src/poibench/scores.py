"""Per-user context score containers shared by all scorers."""

from dataclasses import dataclass

import numpy as np


@dataclass
class ContextScores:
    """Three normalized context channels over one user's candidate POIs.

    ``candidates`` holds ascending poi ids (all POIs minus the user's
    train-visited ones); ``values`` is (n_candidates, 3), each column
    max-normalized to [0, 1].
    """

    user: int
    channels: tuple
    candidates: np.ndarray
    values: np.ndarray

    def channel(self, name):
        return self.values[:, self.channels.index(name)]


def max_normalize(values):
    """Scale so the maximum is 1; an all-zero (or negative-max) vector stays zero."""
    values = np.asarray(values, dtype=float)
    top = values.max() if values.size else 0.0
    if top > 0.0:
        return values / top
    return np.zeros_like(values)


def candidate_pois(bundle, user):
    """All POIs the user has not visited in the train split, ascending."""
    mask = np.ones(bundle.n_pois, dtype=bool)
    mask[bundle.train.user_pois(user)] = False
    return np.flatnonzero(mask).astype(np.int64)


def assemble(user, channels, candidates, columns):
    """Stack raw channel vectors and max-normalize each one."""
    values = np.column_stack([max_normalize(col) for col in columns])
    return ContextScores(
        user=int(user), channels=tuple(channels), candidates=candidates, values=values
    )
