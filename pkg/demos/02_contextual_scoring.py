"""Score candidate POIs with the three contextual models.

Each model produces three per-candidate score channels, max-normalized to
[0, 1], that the fusion step later combines:

  geographical / social / categorical  -- KDE over visited coordinates,
    friends' check-ins through a power-law CDF, category affinity
  geographical / sequential / social   -- the same KDE plus a first-order
    transition model over the user's timestamp-ordered visit sequence
  interest / social / geographical     -- user-based collaborative
    filtering, Jaccard-weighted friend check-ins, a distance power law
"""

import tempfile

import numpy as np

from demo_data import write_demo_dataset
from poibench import load_dataset
from poibench.geosoca import GeoSoCaScorer
from poibench.lore import LoreScorer
from poibench.usg import UsgScorer


def show(scores, top=5):
    order = np.argsort(-scores.values.sum(axis=1))[:top]
    header = "  ".join(f"{c:>12}" for c in scores.channels)
    print(f"  {'POI':>5}  {header}")
    for i in order:
        row = "  ".join(f"{v:12.4f}" for v in scores.values[i])
        print(f"  {scores.candidates[i]:>5}  {row}")


def main():
    with tempfile.TemporaryDirectory() as root:
        write_demo_dataset(root, "Demo")
        bundle = load_dataset(root, "Demo")
        user = 3

        for scorer_cls in (GeoSoCaScorer, LoreScorer, UsgScorer):
            scorer = scorer_cls(bundle)
            scores = scorer.score_user(user)
            print(f"{scorer_cls.__name__} channels for user {user} "
                  f"({scores.candidates.size} candidates, top 5 by channel sum):")
            show(scores)
            print()


if __name__ == "__main__":
    main()
