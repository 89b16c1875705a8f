import os

import numpy as np
import pytest

from poibench.datasets import load_dataset


def build_dataset_files(
    root,
    name,
    n_users=8,
    n_pois=12,
    seed=0,
    with_social=True,
    with_cats=True,
    with_timestamps=True,
    n_cats=4,
):
    """Write a small synthetic dataset in the standard file layout."""
    rng = np.random.default_rng(seed)
    directory = os.path.join(str(root), name)
    os.makedirs(directory, exist_ok=True)

    def path(suffix):
        return os.path.join(directory, f"{name}_{suffix}.txt")

    with open(path("data_size"), "w") as fh:
        fh.write(f"{n_users} {n_pois}\n")

    lats = 40.0 + rng.normal(0.0, 0.05, n_pois)
    lons = -75.0 + rng.normal(0.0, 0.05, n_pois)
    with open(path("poi_coos"), "w") as fh:
        for p in range(n_pois):
            fh.write(f"{p} {lats[p]:.6f} {lons[p]:.6f}\n")

    train, test, tune = [], [], []
    ts = 1_500_000_000
    for u in range(n_users):
        size = min(n_pois, 4 + int(rng.integers(0, 4)))
        pois = rng.choice(n_pois, size=size, replace=False)
        n_train = size - 2
        for p in pois[:n_train]:
            train.append((u, int(p), 1 + int(rng.integers(0, 5)), ts))
            ts += 3600
        test.append((u, int(pois[n_train]), 1 + int(rng.integers(0, 3)), ts))
        ts += 3600
        tune.append((u, int(pois[n_train + 1]), 1, ts))
        ts += 3600

    for split, rows in (("train", train), ("test", test), ("tune", tune)):
        with open(path(split), "w") as fh:
            for u, p, f, t in rows:
                if with_timestamps:
                    fh.write(f"{u} {p} {f} {t}\n")
                else:
                    fh.write(f"{u} {p} {f}\n")

    if with_social:
        edges = set()
        while len(edges) < max(n_users, 4):
            u, v = int(rng.integers(0, n_users)), int(rng.integers(0, n_users))
            if u != v:
                edges.add((min(u, v), max(u, v)))
        with open(path("social_relations"), "w") as fh:
            for u, v in sorted(edges):
                fh.write(f"{u} {v}\n")

    if with_cats:
        with open(path("poi_categories"), "w") as fh:
            for p in range(n_pois):
                for c in sorted(set(rng.integers(0, n_cats, size=2).tolist())):
                    fh.write(f"{p} {c}\n")
    return directory


def make_bundle(
    n_users,
    n_pois,
    train,
    test=(),
    tune=(),
    edges=(),
    coords=None,
    cats=(),
    timestamps=None,
    name="InMem",
):
    """Construct a validated in-memory bundle from explicit entry lists.

    ``train``/``test``/``tune`` are (user, poi, freq) triples; ``coords``
    maps poi -> (lat, lon), defaulting to a line of points 1.11 km apart.
    """
    from poibench.datasets import (
        CategoryIndex,
        CheckInMatrix,
        DatasetBundle,
        GeoIndex,
        SocialGraph,
    )

    if coords is None:
        coords = {p: (40.0 + 0.01 * p, -75.0) for p in range(n_pois)}

    def matrix(rows, ts=None):
        return CheckInMatrix(
            n_users,
            n_pois,
            [r[0] for r in rows],
            [r[1] for r in rows],
            [r[2] for r in rows],
            timestamps=ts,
        )

    bundle = DatasetBundle(
        name=name,
        train=matrix(list(train), timestamps),
        test=matrix(list(test)),
        tune=matrix(list(tune)),
        social=SocialGraph(n_users, list(edges)),
        geo=GeoIndex(n_pois, coords),
        cats=CategoryIndex(n_pois, list(cats)),
    )
    return bundle.validate()


@pytest.fixture(scope="session")
def micro_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("data")
    build_dataset_files(root, "Micro", n_users=8, n_pois=12, seed=0)
    return str(root)


@pytest.fixture(scope="session")
def micro_bundle(micro_dir):
    return load_dataset(micro_dir, "Micro")
