"""Combine score channels into a single ranking.

The fusion polynomial

  score = l1*c1 + l2*c2 + l3*c3 + l12*c1*c2 + l13*c1*c3 + l23*c2*c3
          + l123*c1*c2*c3

covers three named rules: "product" keeps only the l123 term, "sum" keeps
the three linear terms, and "weighted" searches a 0.1-step simplex grid of
(l1, l2, l3) for the combination with the best mean nDCG on the tune split.
"""

import tempfile

from demo_data import write_demo_dataset
from poibench import load_dataset, product_rule, rank_candidates, sum_rule, tune_weighted_sum
from poibench.geosoca import GeoSoCaScorer


def main():
    with tempfile.TemporaryDirectory() as root:
        write_demo_dataset(root, "Demo")
        bundle = load_dataset(root, "Demo")
        scorer = GeoSoCaScorer(bundle)
        user = 3
        scores = scorer.score_user(user)

        for name, weights in (("product", product_rule()), ("sum", sum_rule())):
            ranked = rank_candidates(scores, weights, 5)
            print(f"{name:8} top-5 for user {user}: {ranked.pois.tolist()}")

        # the weighted rule is tuned once per model/dataset on the tune split
        tune_truth = {u: bundle.tune_truth(u) for u in range(bundle.n_users)}
        users = [u for u in range(bundle.n_users) if tune_truth[u]]
        weights = tune_weighted_sum(
            (scorer.score_user(u) for u in users), tune_truth, k=5
        )
        print(f"\ntuned channel weights: l1={weights.l1} l2={weights.l2} l3={weights.l3}")
        ranked = rank_candidates(scores, weights, 5)
        print(f"weighted top-5 for user {user}: {ranked.pois.tolist()}")
        print(f"fused scores: {[round(s, 4) for s in ranked.scores.tolist()]}")


if __name__ == "__main__":
    main()
