"""Shared synthetic dataset generator for the demo scripts.

Writes a small check-in dataset in the on-disk layout the loader expects:
one directory per dataset holding <name>_data_size.txt, <name>_train.txt,
<name>_tune.txt, <name>_test.txt, <name>_poi_coos.txt and the optional
<name>_social_relations.txt / <name>_poi_categories.txt context files.
"""

import os

import numpy as np


def write_demo_dataset(root, name="Demo", n_users=20, n_pois=40, seed=0, n_cats=5):
    rng = np.random.default_rng(seed)
    directory = os.path.join(str(root), name)
    os.makedirs(directory, exist_ok=True)

    def path(suffix):
        return os.path.join(directory, f"{name}_{suffix}.txt")

    with open(path("data_size"), "w") as fh:
        fh.write(f"{n_users} {n_pois}\n")

    # POIs scattered around a city center, a few degrees apart at most
    lats = 40.0 + rng.normal(0.0, 0.08, n_pois)
    lons = -75.0 + rng.normal(0.0, 0.08, n_pois)
    with open(path("poi_coos"), "w") as fh:
        for p in range(n_pois):
            fh.write(f"{p} {lats[p]:.6f} {lons[p]:.6f}\n")

    train, test, tune = [], [], []
    ts = 1_600_000_000
    for u in range(n_users):
        size = min(n_pois, 5 + int(rng.integers(0, 6)))
        pois = rng.choice(n_pois, size=size, replace=False)
        for p in pois[: size - 2]:
            train.append((u, int(p), 1 + int(rng.integers(0, 5)), ts))
            ts += 3600
        test.append((u, int(pois[size - 2]), 1 + int(rng.integers(0, 3)), ts))
        ts += 3600
        tune.append((u, int(pois[size - 1]), 1, ts))
        ts += 3600

    for split, rows in (("train", train), ("test", test), ("tune", tune)):
        with open(path(split), "w") as fh:
            for u, p, f, t in rows:
                fh.write(f"{u} {p} {f} {t}\n")

    edges = set()
    while len(edges) < 2 * n_users:
        u, v = int(rng.integers(0, n_users)), int(rng.integers(0, n_users))
        if u != v:
            edges.add((min(u, v), max(u, v)))
    with open(path("social_relations"), "w") as fh:
        for u, v in sorted(edges):
            fh.write(f"{u} {v}\n")

    with open(path("poi_categories"), "w") as fh:
        for p in range(n_pois):
            for c in sorted(set(rng.integers(0, n_cats, size=2).tolist())):
                fh.write(f"{p} {c}\n")
    return directory
