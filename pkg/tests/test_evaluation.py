import itertools
import math

import numpy as np
import pytest

from conftest import make_bundle
from poibench.datasets import UserGroups
from poibench.errors import ConfigurationError
from poibench.evaluation import (
    average_precision_at_k,
    catalog_coverage,
    evaluate_run,
    gce,
    intra_list_diversity,
    map_at_k,
    mad_r,
    ndcg_at_k,
    novelty,
    personalization,
    precision_at_k,
    recall_at_k,
)
from poibench.fusion import RankedList


def make_list(user, pois, scores=None):
    pois = np.asarray(pois, dtype=np.int64)
    if scores is None:
        scores = np.linspace(1.0, 0.5, pois.size)
    return RankedList(user=user, pois=pois, scores=np.asarray(scores, dtype=float))


class TestPrecisionRecall:
    def test_half_hits(self):
        truth = {0, 1, 2, 3, 4}
        ranked = make_list(0, [0, 1, 2, 3, 4, 10, 11, 12, 13, 14])
        assert precision_at_k(ranked.pois, truth, 10) == pytest.approx(0.5)

    def test_recall_quarter(self):
        truth = {1, 2, 3, 4}
        ranked = make_list(0, [1, 9, 8])
        assert recall_at_k(ranked.pois, truth, 3) == pytest.approx(0.25)

    def test_binary_gain_identity(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            pois = rng.permutation(50)[:10]
            truth = set(rng.permutation(50)[:6].tolist())
            k = int(rng.integers(1, 11))
            hits = len(set(pois[:k].tolist()) & truth)
            assert precision_at_k(pois, truth, k) * k == pytest.approx(hits)
            assert recall_at_k(pois, truth, k) * len(truth) == pytest.approx(hits)

    def test_matches_set_oracle(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            pois = rng.permutation(40)[:15]
            truth = set(rng.permutation(40)[: int(rng.integers(1, 8))].tolist())
            k = int(rng.integers(1, 15))
            inter = len([p for p in pois[:k] if p in truth])
            assert precision_at_k(pois, truth, k) == pytest.approx(inter / k, abs=1e-12)
            assert recall_at_k(pois, truth, k) == pytest.approx(
                inter / len(truth), abs=1e-12
            )


class TestMap:
    def test_relevant_at_rank_one(self):
        assert average_precision_at_k([7, 1, 2], {7}, 3) == pytest.approx(1.0)

    def test_relevant_at_rank_two(self):
        assert average_precision_at_k([5, 7], {7}, 2) == pytest.approx(0.5)

    def test_matches_brute_force_enumeration(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            pois = rng.permutation(30)[:10]
            truth = set(rng.permutation(30)[: int(rng.integers(1, 6))].tolist())
            k = int(rng.integers(1, 11))
            hits = 0
            total = 0.0
            for i, p in enumerate(pois[:k], start=1):
                if p in truth:
                    hits += 1
                    total += hits / i
            expected = total / min(len(truth), k)
            assert average_precision_at_k(pois, truth, k) == pytest.approx(
                expected, abs=1e-12
            )

    def test_mean_excludes_users_without_truth(self):
        lists = [make_list(0, [1, 2]), make_list(1, [3, 4])]
        truths = {0: {1}, 1: set()}
        assert map_at_k(lists, truths, 2) == pytest.approx(1.0)


class TestNdcg:
    def test_ideal_list(self):
        assert ndcg_at_k([1, 2, 3], {1, 2, 3}, 3) == pytest.approx(1.0)

    def test_single_hit_at_rank_two(self):
        assert ndcg_at_k([9, 4], {4}, 2) == pytest.approx(1.0 / math.log2(3))

    def test_no_hits(self):
        assert ndcg_at_k([1, 2, 3], {9}, 3) == 0.0

    def test_invariant_to_tail_permutations(self):
        truth = {3}
        a = ndcg_at_k([1, 3, 5, 6, 7], truth, 5)
        b = ndcg_at_k([1, 3, 7, 6, 5], truth, 5)
        assert a == pytest.approx(b)


class TestCoverage:
    def test_full_catalog(self):
        lists = [make_list(0, [0, 1]), make_list(1, [2, 3])]
        assert catalog_coverage(lists, 4) == pytest.approx(100.0)

    def test_shared_identical_lists(self):
        lists = [make_list(u, list(range(20))) for u in range(50)]
        assert catalog_coverage(lists, 15_575) == pytest.approx(100.0 * 20 / 15_575)

    def test_matches_union_oracle(self):
        rng = np.random.default_rng(3)
        lists = [make_list(u, rng.permutation(60)[:10]) for u in range(12)]
        union = set()
        for rl in lists:
            union |= set(rl.pois.tolist())
        assert catalog_coverage(lists, 60) == pytest.approx(100 * len(union) / 60)

    def test_monotone_in_lists(self):
        rng = np.random.default_rng(4)
        lists = [make_list(u, rng.permutation(40)[:5]) for u in range(8)]
        values = [catalog_coverage(lists[:i], 40) for i in range(1, 9)]
        assert all(b >= a for a, b in zip(values, values[1:]))


class TestNovelty:
    def test_universally_visited_items(self):
        train = [(u, p, 1) for u in range(4) for p in range(2)]
        bundle = make_bundle(4, 3, train)
        lists = [make_list(u, [0, 1]) for u in range(4)]
        assert novelty(lists, bundle) == pytest.approx(0.0)

    def test_one_in_32_users(self):
        train = [(0, p, 1) for p in range(3)] + [(u, 3, 1) for u in range(32)]
        bundle = make_bundle(32, 4, train)
        lists = [make_list(5, [0, 1, 2])]
        assert novelty(lists, bundle) == pytest.approx(5.0)

    def test_matches_direct_formula(self, micro_bundle):
        rng = np.random.default_rng(9)
        lists = [
            make_list(u, rng.permutation(micro_bundle.n_pois)[:4])
            for u in range(micro_bundle.n_users)
        ]
        visitors = {}
        for (u, p), _ in micro_bundle.train.entries().items():
            visitors.setdefault(p, set()).add(u)
        per_list = []
        for rl in lists:
            vals = []
            for p in rl.pois:
                pop = max(len(visitors.get(int(p), ())), 1) / micro_bundle.n_users
                vals.append(-math.log2(pop))
            per_list.append(np.mean(vals))
        assert novelty(lists, micro_bundle) == pytest.approx(np.mean(per_list), abs=1e-12)


class TestDiversity:
    def test_identical_user_vectors(self):
        train = [(0, 0, 2), (0, 1, 2), (1, 0, 1), (1, 1, 1)]
        bundle = make_bundle(2, 3, train)
        lists = [make_list(0, [0, 1])]
        assert intra_list_diversity(lists, bundle) == pytest.approx(0.0)

    def test_disjoint_visitor_sets(self):
        train = [(0, 0, 1), (1, 1, 1)]
        bundle = make_bundle(2, 3, train)
        lists = [make_list(0, [0, 1])]
        assert intra_list_diversity(lists, bundle) == pytest.approx(1.0)

    def test_single_item_list_contributes_one(self):
        bundle = make_bundle(2, 3, [(0, 0, 1)])
        assert intra_list_diversity([make_list(0, [1])], bundle) == pytest.approx(1.0)

    def test_matches_dense_pairwise_oracle(self, micro_bundle):
        rng = np.random.default_rng(17)
        lists = [
            make_list(u, rng.permutation(micro_bundle.n_pois)[:5])
            for u in range(micro_bundle.n_users)
        ]
        dense = micro_bundle.train.to_csr().toarray()
        per_list = []
        for rl in lists:
            sims = []
            for i, j in itertools.combinations(range(len(rl.pois)), 2):
                a, b = dense[:, rl.pois[i]], dense[:, rl.pois[j]]
                denom = np.linalg.norm(a) * np.linalg.norm(b)
                sims.append(a @ b / denom if denom > 0 else 0.0)
            per_list.append(1.0 - np.mean(sims))
        assert intra_list_diversity(lists, micro_bundle) == pytest.approx(
            np.mean(per_list), abs=1e-12
        )


class TestPersonalization:
    def test_identical_lists(self):
        lists = [make_list(u, [0, 1, 2]) for u in range(5)]
        assert personalization(lists, 3) == pytest.approx(0.0)

    def test_disjoint_lists(self):
        lists = [make_list(u, [3 * u, 3 * u + 1, 3 * u + 2]) for u in range(5)]
        assert personalization(lists, 3) == pytest.approx(1.0)

    def test_matches_exhaustive_pair_oracle(self):
        rng = np.random.default_rng(23)
        lists = [make_list(u, rng.permutation(30)[:6]) for u in range(10)]
        sets = [set(rl.pois.tolist()) for rl in lists]
        overlaps = [
            len(sets[i] & sets[j]) / 6
            for i, j in itertools.combinations(range(10), 2)
        ]
        assert personalization(lists, 6) == pytest.approx(1 - np.mean(overlaps), abs=1e-12)

    def test_sampled_estimate_close_to_exact(self):
        import poibench.evaluation as ev

        rng = np.random.default_rng(31)
        lists = [make_list(u, rng.permutation(200)[:10]) for u in range(120)]
        exact = personalization(lists, 10)
        original = ev.PAIR_SAMPLE_LIMIT
        ev.PAIR_SAMPLE_LIMIT = 5_000  # force the sampling path
        try:
            sampled = personalization(lists, 10, seed=42)
        finally:
            ev.PAIR_SAMPLE_LIMIT = original
        assert sampled == pytest.approx(exact, abs=0.01)


class TestFairness:
    def _groups(self):
        return UserGroups(
            active=frozenset({0, 1}), inactive=frozenset({2, 3}), percentage=0.5
        )

    def test_mad_r_identical_means(self):
        values = {0: 0.5, 1: 0.5, 2: 0.5, 3: 0.5}
        assert mad_r(values, self._groups()) == pytest.approx(0.0)

    def test_mad_r_known_gap(self):
        values = {0: 0.7, 1: 0.5, 2: 0.3, 3: 0.5}
        assert mad_r(values, self._groups()) == pytest.approx(0.2)

    def test_mad_r_matches_direct_means(self):
        rng = np.random.default_rng(2)
        values = {u: float(rng.uniform()) for u in range(4)}
        expected = abs(
            np.mean([values[0], values[1]]) - np.mean([values[2], values[3]])
        )
        assert mad_r(values, self._groups()) == pytest.approx(expected, abs=1e-12)

    def test_mad_r_symmetric_under_label_swap(self):
        rng = np.random.default_rng(7)
        values = {u: float(rng.uniform()) for u in range(4)}
        swapped = UserGroups(
            active=frozenset({2, 3}), inactive=frozenset({0, 1}), percentage=0.5
        )
        assert mad_r(values, self._groups()) == pytest.approx(mad_r(values, swapped))

    def test_gce_uniform_shares(self):
        utilities = {0: 0.3, 1: 0.2, 2: 0.25, 3: 0.25}
        assert gce(utilities, self._groups()) == pytest.approx(0.0)

    def test_gce_known_value(self):
        # p = (0.7, 0.3): closed form gives about -0.0952
        utilities = {0: 0.7, 1: 0.0, 2: 0.3, 3: 0.0}
        expected = (1.0 / (2 * -1.0)) * (0.25 / 0.7 + 0.25 / 0.3 - 1.0)
        assert gce(utilities, self._groups()) == pytest.approx(expected)
        assert expected == pytest.approx(-0.0952, abs=1e-4)

    def test_gce_degenerate_share_is_large_negative(self):
        utilities = {0: 1.0, 1: 0.0, 2: 0.0, 3: 0.0}
        value = gce(utilities, self._groups())
        assert value < -1e9

    def test_gce_zero_total_is_undefined(self):
        assert gce({0: 0.0, 2: 0.0}, self._groups()) is None

    @pytest.mark.parametrize("beta", [0.0, 1.0])
    def test_gce_invalid_beta(self, beta):
        with pytest.raises(ConfigurationError):
            gce({0: 1.0}, self._groups(), beta=beta)


class TestEvaluateRun:
    def _lists(self, bundle):
        rng = np.random.default_rng(1)
        return [
            make_list(u, rng.permutation(bundle.n_pois)[:5])
            for u in range(bundle.n_users)
        ]

    def test_empty_selection_gives_metadata_only(self, micro_bundle):
        report = evaluate_run(
            self._lists(micro_bundle), micro_bundle, None, (), 3, 5,
            metadata={"model": "x"},
        )
        assert report.values == {}
        assert report.metadata == {"model": "x"}

    def test_unknown_metric_rejected(self, micro_bundle):
        with pytest.raises(ConfigurationError, match="valid names"):
            evaluate_run(self._lists(micro_bundle), micro_bundle, None, ("Bogus",), 3, 5)

    def test_fairness_without_groups_rejected(self, micro_bundle):
        with pytest.raises(ConfigurationError, match="groups"):
            evaluate_run(self._lists(micro_bundle), micro_bundle, None, ("MADr",), 3, 5)

    def test_full_report_matches_metric_oracles(self, micro_bundle):
        from poibench.datasets import compute_active_users

        lists = self._lists(micro_bundle)
        groups = compute_active_users(micro_bundle, 0.25)
        metrics = (
            "Precision", "Recall", "mAP", "nDCG",
            "Coverage", "Novelty", "Diversity", "Personalization",
            "MADr", "GCE",
        )
        report = evaluate_run(lists, micro_bundle, groups, metrics, 3, 5)
        truths = {rl.user: micro_bundle.test_truth(rl.user) for rl in lists}
        evaluable = [rl for rl in lists if truths[rl.user]]
        assert report.values["Precision@3"] == pytest.approx(
            np.mean([precision_at_k(rl.pois, truths[rl.user], 3) for rl in evaluable])
        )
        assert report.values["Recall@3"] == pytest.approx(
            np.mean([recall_at_k(rl.pois, truths[rl.user], 3) for rl in evaluable])
        )
        assert report.values["nDCG@3"] == pytest.approx(
            np.mean([ndcg_at_k(rl.pois, truths[rl.user], 3) for rl in evaluable])
        )
        assert report.values["mAP@3"] == pytest.approx(map_at_k(evaluable, truths, 3))
        assert report.values["Coverage@5"] == pytest.approx(
            catalog_coverage(lists, micro_bundle.n_pois)
        )
        assert report.values["Novelty@5"] == pytest.approx(novelty(lists, micro_bundle))
        assert report.values["Diversity@5"] == pytest.approx(
            intra_list_diversity(lists, micro_bundle)
        )
        assert report.values["Personalization@5"] == pytest.approx(
            personalization(lists, 5)
        )
        means = {rl.user: float(rl.scores.mean()) for rl in lists}
        assert report.values["MADr@5"] == pytest.approx(mad_r(means, groups))
        utils = {rl.user: ndcg_at_k(rl.pois, truths[rl.user], 3) for rl in evaluable}
        assert report.values["GCE@3"] == pytest.approx(gce(utils, groups))
        assert ("active", "nDCG@3") in report.group_values
        assert ("inactive", "Precision@3") in report.group_values
