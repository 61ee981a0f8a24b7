import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from prs.metrics import (
    RankingEstimate,
    alignment,
    count_inversions,
    hamming,
    inversions,
    kendall_tau,
    normalized_errors,
)
from prs.model import DirectedAdjacency, ModelParams, sample_null


def kt_pairs(sigma, tau):
    """O(m^2) oracle: pairs ordered one way by sigma and the other way by tau."""
    ps = {v: r for r, v in enumerate(sigma)}
    pt = {v: r for r, v in enumerate(tau)}
    common = [v for v in sigma if v in pt]
    return sum((ps[a] < ps[b]) != (pt[a] < pt[b]) for a, b in itertools.combinations(common, 2))


orders = st.lists(st.integers(0, 30), unique=True, max_size=25)


class TestHamming:
    def test_examples(self):
        assert hamming({1, 2}, {1, 2}) == 0
        assert hamming({1, 2}, {2, 3}) == 2
        assert hamming(set(), range(7)) == 7

    @given(st.sets(st.integers(0, 20)), st.sets(st.integers(0, 20)), st.sets(st.integers(0, 20)))
    def test_metric(self, a, b, c):
        assert hamming(a, b) == hamming(b, a)
        assert hamming(a, c) <= hamming(a, b) + hamming(b, c)


class TestKendall:
    def test_examples(self):
        assert kendall_tau(range(5), range(5)) == 0
        assert kendall_tau([0, 1, 2], [2, 1, 0]) == 3

    def test_partial_supports(self):
        # sigma on {1,2,3} is 1 > 2 > 3; tau on {2,3,4} is 3 > 2 > 4
        assert kendall_tau([1, 2, 3], [3, 2, 4]) == 1
        assert kendall_tau([1, 2, 3], [3, 2, 4]) == kt_pairs([1, 2, 3], [3, 2, 4])

    @given(orders, orders)
    def test_matches_pair_oracle(self, a, b):
        assert kendall_tau(a, b) == kt_pairs(a, b)

    @given(orders, orders)
    def test_symmetric_and_bounded(self, a, b):
        common = len(set(a) & set(b))
        assert kendall_tau(a, b) == kendall_tau(b, a)
        assert 0 <= kendall_tau(a, b) <= common * (common - 1) // 2

    def test_accepts_estimates(self):
        est = RankingEstimate([3, 1, 2])
        assert kendall_tau(est, [1, 2, 3]) == 2

    def test_large(self, rng):
        a = rng.permutation(5000)
        b = rng.permutation(5000)
        ranks = np.empty(5000, dtype=int)
        ranks[b] = np.arange(5000)
        seq = ranks[a]
        # independent count via sorting on pairs of a random sample
        assert kendall_tau(a, b) == count_inversions(seq.tolist())
        assert abs(kendall_tau(a, b) / (5000 * 4999 / 2) - 0.5) < 0.02


class TestInversions:
    @given(st.lists(st.integers(-50, 50), max_size=40))
    def test_merge_count_matches_brute_force(self, seq):
        brute = sum(seq[i] > seq[j] for i in range(len(seq)) for j in range(i + 1, len(seq)))
        assert count_inversions(seq) == brute

    def test_examples(self):
        assert inversions([1, 2, 3, 4]) == 0
        assert inversions(list(range(9, 0, -1))) == 36

    def test_mean_over_symmetric_group(self):
        total = sum(inversions(p) for p in itertools.permutations(range(1, 9)))
        assert total / math.factorial(8) == 14


class TestAlignment:
    def test_examples(self):
        g = DirectedAdjacency.acyclic_tournament([0, 1, 2])
        assert alignment([0, 1, 2], g) == 3
        assert alignment([2, 1, 0], g) == -3

    @given(st.integers(0, 2**32), st.integers(2, 9))
    def test_agreement_count(self, seed, n):
        g = sample_null(ModelParams(n, 1, 1.0, 0.0), seed)
        order = np.random.default_rng(seed).permutation(n)
        pos = {int(v): r for r, v in enumerate(order)}
        agree = sum(1 for u, v in g.edges() if pos[int(u)] < pos[int(v)])
        assert alignment(order, g) == 2 * agree - n * (n - 1) // 2
        assert alignment(order[::-1], g) == -alignment(order, g)

    def test_argmax_is_likelihood_argmax(self):
        # for tournaments alignment = 2 * agreements - C(n, 2), so the argmaxes coincide
        for seed in range(10):
            g = sample_null(ModelParams(6, 1, 1.0, 0.0), seed)
            perms = list(itertools.permutations(range(6)))
            by_align = max(perms, key=lambda p: alignment(p, g))
            agreements = lambda p: sum(g.entries[p[i], p[j]] > 0 for i in range(6) for j in range(i + 1, 6))
            assert agreements(by_align) == max(agreements(p) for p in perms)

    def test_partial_order_only_counts_inside(self):
        g = DirectedAdjacency.from_edges(4, [(0, 1), (2, 3), (3, 0)])
        assert alignment([0, 1], g) == 1
        assert alignment([1, 0], g) == -1


class TestEstimate:
    def test_rejects_repeats(self):
        with pytest.raises(ValueError):
            RankingEstimate([1, 1])

    def test_failure(self):
        f = RankingEstimate.failure("cycle")
        assert f.failed and len(f) == 0 and f.info["reason"] == "cycle"

    def test_ranks(self):
        e = RankingEstimate([4, 0, 2])
        assert e.ranks == {4: 1, 0: 2, 2: 3}
        assert e.support.tolist() == [0, 2, 4]


def test_normalized_errors():
    assert normalized_errors(3, 6, 4) == (0.75, 1.0)
    assert normalized_errors(None, None, 4) == (None, None)
    assert normalized_errors(0, 0, 1) == (0.0, None)
