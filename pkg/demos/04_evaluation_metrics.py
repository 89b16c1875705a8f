"""Evaluate recommendation lists along three dimensions.

Accuracy (Precision, Recall, mAP, nDCG) measures agreement with the held
out test split; beyond-accuracy (Coverage, Novelty, Diversity,
Personalization) measures list quality independent of relevance; fairness
(MADr, GCE) compares how the system treats active versus inactive users.
"""

import tempfile

from demo_data import write_demo_dataset
from poibench import (
    compute_active_users,
    evaluate_run,
    load_dataset,
    rank_candidates,
    sum_rule,
)
from poibench.lore import LoreScorer


def main():
    with tempfile.TemporaryDirectory() as root:
        write_demo_dataset(root, "Demo")
        bundle = load_dataset(root, "Demo")
        scorer = LoreScorer(bundle)
        weights = sum_rule()
        lists = [
            rank_candidates(scorer.score_user(u), weights, 10)
            for u in range(bundle.n_users)
        ]
        groups = compute_active_users(bundle, 0.2)
        report = evaluate_run(
            lists,
            bundle,
            groups,
            metrics=(
                "Precision", "Recall", "mAP", "nDCG",
                "Coverage", "Novelty", "Diversity", "Personalization",
                "MADr", "GCE",
            ),
            top_k=5,
            list_limit=10,
        )

        print("overall metrics:")
        for key in sorted(report.values):
            print(f"  {key:22} {report.values[key]:.4f}")
        print("\nper-group accuracy:")
        for (group, key) in sorted(report.group_values):
            print(f"  {group:8} {key:12} {report.group_values[(group, key)]:.4f}")


if __name__ == "__main__":
    main()
