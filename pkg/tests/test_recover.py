import cmath
import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from prs.metrics import RankingEstimate, alignment, hamming, kendall_tau
from prs.model import DirectedAdjacency, ModelParams, sample_null, sample_planted, sample_planted_given
from prs.recover import (
    acyclic_order,
    angular_embedding,
    estimate_k,
    max_acyclic_ordering_dp,
    merge_candidates,
    mle_recover,
    ordered_clique_recover,
    ordered_clique_recover_enhanced,
    ranking_by_wins,
    recover_from_eigenvector,
    spectral_recover,
    win_scores,
)
from prs.spectral import ConvergenceError, top_eigenpair


def brute_best(graph, subset):
    return max(alignment(list(p), graph) for p in itertools.permutations(subset))


def random_graph(seed, n, p=None):
    rng = np.random.default_rng(seed)
    return sample_null(ModelParams(n, 1, rng.uniform(0.3, 1.0) if p is None else p, 0.0), seed)


class TestRankingByWins:
    def test_acyclic_identity(self):
        g = DirectedAdjacency.acyclic_tournament(range(5))
        assert ranking_by_wins(g).order.tolist() == [0, 1, 2, 3, 4]

    def test_all_ties(self):
        g = DirectedAdjacency(np.zeros((5, 5), dtype=np.int8))
        assert ranking_by_wins(g).order.tolist() == [4, 3, 2, 1, 0]

    @given(st.integers(0, 2**32), st.integers(1, 30))
    def test_scores_sum_to_zero(self, seed, n):
        assert win_scores(random_graph(seed, n)).sum() == 0

    @given(st.integers(0, 2**32), st.integers(2, 30))
    def test_equivariance(self, seed, n):
        g = random_graph(seed, n)
        perm = np.random.default_rng(seed + 1).permutation(n)  # vertex v becomes perm[v]
        inv = np.argsort(perm)
        relabeled = DirectedAdjacency(g.entries[np.ix_(inv, inv)])
        s, s2 = win_scores(g), win_scores(relabeled)
        assert np.array_equal(s2[perm], s)
        # rankings agree after relabeling up to the order among tied scores
        got = ranking_by_wins(relabeled).order
        assert np.array_equal(s2[got], s[ranking_by_wins(g).order])


class TestDP:
    def test_three_cycle(self):
        g = DirectedAdjacency.from_edges(3, [(0, 1), (1, 2), (2, 0)])
        order, value = max_acyclic_ordering_dp(g, [0, 1, 2])
        assert value == 1
        assert alignment(order, g) == 1

    def test_acyclic_subset(self):
        g = DirectedAdjacency.acyclic_tournament([4, 2, 0, 3, 1, 5, 6])
        order, value = max_acyclic_ordering_dp(g, [0, 1, 2, 3, 4])
        assert value == 10 and order.tolist() == [4, 2, 0, 3, 1]

    @given(st.integers(0, 2**32), st.integers(0, 8))
    def test_matches_factorial_search(self, seed, size):
        g = random_graph(seed, 10)
        subset = np.random.default_rng(seed).choice(10, size=size, replace=False)
        order, value = max_acyclic_ordering_dp(g, subset)
        assert sorted(order.tolist()) == sorted(subset.tolist())
        assert value == alignment(order, g)
        assert value == (brute_best(g, subset.tolist()) if size else 0)

    @given(st.integers(0, 2**32), st.integers(1, 12))
    def test_at_least_identity_or_reverse(self, seed, size):
        g = random_graph(seed, 14)
        subset = np.sort(np.random.default_rng(seed).choice(14, size=size, replace=False))
        _, value = max_acyclic_ordering_dp(g, subset)
        assert value >= abs(alignment(subset, g))

    def test_tie_rule_smallest_index_last(self):
        # empty graph: every ordering scores 0, the DP keeps taking the smallest index as bottom
        g = DirectedAdjacency(np.zeros((4, 4), dtype=np.int8))
        order, value = max_acyclic_ordering_dp(g, [0, 1, 2, 3])
        assert value == 0 and order.tolist() == [3, 2, 1, 0]

    def test_caps(self):
        g = random_graph(0, 23)
        with pytest.raises(ValueError):
            max_acyclic_ordering_dp(g, range(23))
        with pytest.raises(ValueError):
            max_acyclic_ordering_dp(g, [0, 99])


class TestMLE:
    def test_full_bias_small_returns_an_acyclic_set(self):
        # at this size many 5-subsets are acyclic, so only the value is pinned down
        for seed in range(5):
            inst = sample_planted_given(ModelParams(10, 5, 1.0, 0.5), [0, 2, 4, 6, 8],
                                        np.random.default_rng(seed).permutation(5) + 1, seed)
            est = mle_recover(inst.graph, 5)
            assert est.info["value"] == 10 == alignment(est, inst.graph)

    def test_recovers_large_clique(self):
        # k^2 (n - k) / 2^(k-1) is small here, so the planted set is the unique acyclic 14-set
        community = np.arange(0, 22)[np.random.default_rng(4).permutation(22)[:14]]
        ranks = np.random.default_rng(5).permutation(14) + 1
        inst = sample_planted_given(ModelParams(22, 14, 1.0, 0.5), community, ranks, 6)
        est = mle_recover(inst.graph, 14)
        assert np.array_equal(est.order, inst.order)

    def test_matches_brute_force(self):
        for seed in range(5):
            g = random_graph(seed, 7)
            est = mle_recover(g, 3)
            best = max(brute_best(g, list(s)) for s in itertools.combinations(range(7), 3))
            assert est.info["value"] == best == alignment(est, g)
            winners = [s for s in itertools.combinations(range(7), 3) if brute_best(g, list(s)) == best]
            assert est.support.tolist() == list(min(winners))

    def test_rejects(self):
        with pytest.raises(ValueError):
            mle_recover(random_graph(0, 5), 6)
        with pytest.raises(ValueError):
            mle_recover(random_graph(0, 23), 2)


class TestSpectralRecover:
    def test_acyclic_tournament_exact(self):
        n = 60
        order = np.random.default_rng(1).permutation(n)
        est = spectral_recover(DirectedAdjacency.acyclic_tournament(order), n)
        assert est.order.tolist() == order.tolist()

    def test_angles_follow_analytic_vector(self):
        n = 40
        emb = angular_embedding(top_eigenpair(DirectedAdjacency.acyclic_tournament(range(n))).vector, n)
        assert len(emb.support) == n
        assert np.all(np.diff(emb.angles) < 0)
        assert np.all(emb.angles >= -math.pi) and np.all(emb.angles < math.pi)

    def test_phase_invariance(self, rng):
        inst = sample_planted(ModelParams(400, 120, 1.0, 0.5), 8)
        v = top_eigenpair(inst.graph).vector
        base = recover_from_eigenvector(v, 120)
        for phi in rng.uniform(0, 2 * math.pi, size=10):
            assert recover_from_eigenvector(v * cmath.exp(1j * phi), 120) == base

    def test_planted_accuracy(self):
        n = 900
        k = 10 * math.sqrt(n)
        inst = sample_planted(ModelParams(n, k, 1.0, 0.5), 3)
        est = spectral_recover(inst.graph, k)
        assert hamming(est.support, inst.community) / k <= 0.1
        assert kendall_tau(est, inst.order) / (k * (k - 1) / 2) <= 0.1

    def test_empty_support(self):
        # a flat vector puts every |v_i|^2 = 0.1 below the 1/(2k) = 0.5 cut
        v = np.ones(10) / math.sqrt(10)
        est = recover_from_eigenvector(v, k=1.0)
        assert len(est) == 0 and not est.failed

    def test_eigensolver_failure_propagates(self):
        with pytest.raises(ConvergenceError):
            spectral_recover(sample_null(ModelParams(300, 1, 1.0, 0.0), 0), 30, max_iters=3)

    def test_estimate_k(self):
        v = np.zeros(100)
        v[:20] = 1
        assert estimate_k(v) == 20
        assert estimate_k(v, factor=0.5) == 10


class TestOrderedClique:
    def test_whole_graph_acyclic(self):
        order = np.random.default_rng(3).permutation(50)
        est = ordered_clique_recover(DirectedAdjacency.acyclic_tournament(order), 50)
        assert not est.failed and est.order.tolist() == order.tolist()

    def test_planted(self):
        n = 900
        k = 10 * math.sqrt(n)
        wins = 0
        for seed in range(5):
            inst = sample_planted(ModelParams(n, k, 1.0, 0.5), seed)
            est = ordered_clique_recover(inst.graph, k, seed=seed)
            wins += (not est.failed) and np.array_equal(est.order, inst.order)
        assert wins >= 4

    @staticmethod
    def closed_chain(m):
        # acyclic tournament 0 -> 1 -> ... -> m-1 with the longest edge reversed
        y = DirectedAdjacency.acyclic_tournament(range(m)).entries.copy()
        y[0, m - 1], y[m - 1, 0] = -1, 1
        return DirectedAdjacency(y)

    def test_cycle_gives_failure(self):
        est = ordered_clique_recover(self.closed_chain(40), 40)
        assert est.failed and est.info["reason"] == "cycle"
        assert len(est.order) == 0
        assert len(est.info["refined_support"]) == 40

    def test_acyclic_order_helper(self):
        g = DirectedAdjacency.acyclic_tournament([3, 1, 2, 0])
        assert acyclic_order(g, [0, 1, 2, 3]).tolist() == [3, 1, 2, 0]
        cyc = DirectedAdjacency.from_edges(4, [(0, 1), (1, 2), (2, 0), (3, 0)])
        assert acyclic_order(cyc, [0, 1, 2]) is None
        assert acyclic_order(cyc, [0, 3]).tolist() == [3, 0]


class TestEnhanced:
    def test_b0_equals_plain(self):
        n = 400
        for seed in range(3):
            inst = sample_planted(ModelParams(n, 80, 1.0, 0.5), seed)
            assert ordered_clique_recover_enhanced(inst.graph, 80, 0, seed=seed) == \
                ordered_clique_recover(inst.graph, 80, seed=seed)

    def test_partitioned_runs_merge(self):
        n = 60
        inst = sample_planted(ModelParams(n, 25, 1.0, 0.5), 2)
        full = ordered_clique_recover_enhanced(inst.graph, 25, 1)
        parts = [ordered_clique_recover_enhanced(inst.graph, 25, 1, guesses=[(v,) for v in range(lo, lo + 20)])
                 for lo in (0, 20, 40)]
        assert merge_candidates(parts) == full

    def test_output_is_acyclic(self):
        inst = sample_planted(ModelParams(80, 30, 1.0, 0.5), 5)
        est = ordered_clique_recover_enhanced(inst.graph, 30, 1)
        if not est.failed:
            sub = inst.graph.entries[np.ix_(est.order, est.order)]
            assert np.all(sub[np.triu_indices(len(est), 1)] == 1)

    def test_v_b_size_for_top_members(self):
        n, k = 2000, 200
        sizes = []
        for seed in range(5):
            inst = sample_planted(ModelParams(n, k, 1.0, 0.5), seed)
            top = inst.order[:2]
            y = inst.graph.entries
            inside = (y[top[0]] > 0) & (y[top[1]] > 0)
            sizes.append(int(inside.sum()))
        # members below both are always in V_B; outsiders join with probability 1/4
        expect = [(n - k) / 4 + k for _ in sizes]
        assert np.all(np.abs(np.array(sizes) - expect) <= 3 * math.sqrt(n * 3 / 16) + 2 * math.sqrt(k))

    def test_no_candidate_fails(self):
        est = ordered_clique_recover_enhanced(TestOrderedClique.closed_chain(40), 40, 0)
        assert est.failed and est.info["reason"] == "no acyclic candidate"
