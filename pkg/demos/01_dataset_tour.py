"""Load a check-in dataset and look around.

Generates a small synthetic dataset on disk, loads it into a validated
bundle and prints its statistics, one user's visit history, and the
active/inactive split used by the fairness metrics.
"""

import tempfile

from demo_data import write_demo_dataset
from poibench import compute_active_users, dataset_stats, load_dataset


def main():
    with tempfile.TemporaryDirectory() as root:
        write_demo_dataset(root, "Demo")
        bundle = load_dataset(root, "Demo")

        stats = dataset_stats(bundle)
        print("dataset statistics")
        print(f"  users        {stats.users}")
        print(f"  POIs         {stats.pois}")
        print(f"  check-ins    {stats.checkins}")
        print(f"  social edges {stats.social_edges}")
        print(f"  categories   {stats.categories}")
        print(f"  density      {stats.density:.4f}")

        user = 0
        pois = bundle.train.user_pois(user)
        print(f"\nuser {user} visited {pois.size} POIs in the train split: {pois.tolist()}")
        print(f"user {user} ordered visit sequence: {bundle.train.user_sequence(user).tolist()}")
        print(f"user {user} friends: {bundle.social.friends(user).tolist()}")
        print(f"test truth for user {user}: {sorted(bundle.test_truth(user))}")

        groups = compute_active_users(bundle, 0.2)
        print(f"\nactive users (top 20% by train volume): {sorted(groups.active)}")
        print(f"inactive users: {sorted(groups.inactive)}")


if __name__ == "__main__":
    main()
