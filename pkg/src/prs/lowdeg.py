"""Exact small-instance oracles for low-degree and chi-squared calculations.

Everything here enumerates: orderings of a handful of vertices, edge sets over
C([n], 2) for n <= 7, or all 3^{C(n,2)} observation matrices for n <= 4.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

import numpy as np

from prs.model import ModelParams

SIGN_MAX_VERTICES = 10
ADV_MAX_N = 7
ADV_MAX_D = 6
CHI2_MAX_N = 4
MGF_MAX_H = 9

Pair = tuple[int, int]


def _pair(e) -> Pair:
    i, j = (int(x) for x in e)
    if i == j:
        raise ValueError(f"self-loop {{{i}, {j}}}")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class EdgeSet:
    """A set of unordered vertex pairs, stored as sorted (i, j) tuples with i < j."""

    edges: frozenset

    def __init__(self, edges: Iterable = ()):
        object.__setattr__(self, "edges", frozenset(_pair(e) for e in edges))

    def __len__(self):
        return len(self.edges)

    def __iter__(self):
        return iter(sorted(self.edges))

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted({v for e in self.edges for v in e}))

    def components(self) -> list["EdgeSet"]:
        """Connected components, each as an EdgeSet, ordered by smallest vertex."""
        parent = {v: v for v in self.vertices}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for i, j in self.edges:
            parent[find(i)] = find(j)
        groups: dict[int, list[Pair]] = {}
        for e in sorted(self.edges):
            groups.setdefault(find(e[0]), []).append(e)
        comps = [EdgeSet(g) for g in groups.values()]
        return sorted(comps, key=lambda c: c.vertices[0])

    @property
    def component_sizes(self) -> tuple[int, ...]:
        """Edge count of each component."""
        return tuple(len(c) for c in self.components())

    @property
    def is_even(self) -> bool:
        return all(s % 2 == 0 for s in self.component_sizes)

    def canonical(self) -> tuple[Pair, ...]:
        """Relabel vertices 0..|V|-1 preserving their order."""
        idx = {v: r for r, v in enumerate(self.vertices)}
        return tuple(sorted((idx[i], idx[j]) for i, j in self.edges))


@dataclass(frozen=True)
class LowDegParams:
    D: int
    model: ModelParams

    def __post_init__(self):
        if int(self.D) != self.D or self.D < 0:
            raise ValueError(f"D must be a nonnegative integer, got {self.D!r}")


def _as_edgeset(a) -> EdgeSet:
    return a if isinstance(a, EdgeSet) else EdgeSet(a)


@lru_cache(maxsize=None)
def _permutation_table(m: int) -> np.ndarray:
    table = np.array(list(itertools.permutations(range(m))), dtype=np.int8).reshape(-1, m)
    table.flags.writeable = False
    return table


@lru_cache(maxsize=None)
def _sign_expectation_canonical(edges: tuple[Pair, ...], m: int) -> Fraction:
    if not edges:
        return Fraction(1)
    perms = _permutation_table(m)
    flips = np.zeros(len(perms), dtype=np.int8)
    for i, j in edges:
        flips ^= (perms[:, i] > perms[:, j]).astype(np.int8)
    minus = int(flips.sum())
    return Fraction(len(perms) - 2 * minus, len(perms))


def ordering_sign_expectation(a) -> Fraction:
    """E over a uniform ordering pi of V(a) of (-1)^{#{(i,j) in a, i<j : pi(i) > pi(j)}}.

    Computed by enumerating all |V(a)|! relative orders.
    """
    a = _as_edgeset(a)
    m = len(a.vertices)
    if m > SIGN_MAX_VERTICES:
        raise ValueError(f"|V(a)| = {m} exceeds {SIGN_MAX_VERTICES}")
    return _sign_expectation_canonical(a.canonical(), m)


def planted_monomial_expectation(a, model: ModelParams) -> float:
    """E_P[prod_{(i,j) in a} Y_ij] = (k/n)^{|V|} (2pq)^{|a|} prod over components of the sign expectation."""
    a = _as_edgeset(a)
    if len(a.vertices) > SIGN_MAX_VERTICES:
        raise ValueError(f"|V(a)| = {len(a.vertices)} exceeds {SIGN_MAX_VERTICES}")
    if not a.edges:
        return 1.0
    sign = Fraction(1)
    for comp in a.components():
        sign *= ordering_sign_expectation(comp)
        if sign == 0:
            return 0.0
    n, k, p, q = model.n, model.k, model.p, model.q
    return (k / n) ** len(a.vertices) * (2 * p * q) ** len(a) * float(sign)


def h_value(A, B, y: np.ndarray, p: float) -> float:
    """h_{A,B}(Y) = p^{-|A|/2} Y^A * (p(1-p))^{-|B|/2} prod_{B} (Y_ij^2 - p), for disjoint A, B."""
    A, B = _as_edgeset(A), _as_edgeset(B)
    if A.edges & B.edges:
        raise ValueError("A and B must be disjoint")
    if not 0 < p < 1 and B.edges:
        raise ValueError("h_{A,B} with B nonempty needs 0 < p < 1")
    val = p ** (-len(A) / 2)
    for i, j in A.edges:
        val *= y[i, j]
    if B.edges:
        val *= (p * (1 - p)) ** (-len(B) / 2)
        for i, j in B.edges:
            val *= y[i, j] ** 2 - p
    return float(val)


def planted_h_expectation(A, B, model: ModelParams) -> float:
    """E_P[h_{A,B}]: zero for nonempty B, p^{-|A|/2} E_P[Y^A] otherwise."""
    if _as_edgeset(B).edges:
        return 0.0
    A = _as_edgeset(A)
    return model.p ** (-len(A) / 2) * planted_monomial_expectation(A, model)


def _check_adv(params: LowDegParams, max_n: int):
    n = params.model.n
    if max_n > ADV_MAX_N:
        raise ValueError(f"max_n is capped at {ADV_MAX_N}")
    if n > max_n:
        raise ValueError(f"n={n} exceeds max_n={max_n}")
    if params.D > ADV_MAX_D:
        raise ValueError(f"D={params.D} exceeds {ADV_MAX_D}")
    if params.model.p <= 0:
        raise ValueError("the advantage needs p > 0")


def _all_components_even(combo: tuple[Pair, ...]) -> bool:
    parent: dict[int, int] = {}

    def find(v):
        parent.setdefault(v, v)
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for i, j in combo:
        parent[find(i)] = find(j)
    parity: dict[int, int] = {}
    for i, _ in combo:
        r = find(i)
        parity[r] = parity.get(r, 0) ^ 1
    return not any(parity.values())


def advantage_terms(params: LowDegParams, max_n: int = ADV_MAX_N) -> list[tuple[EdgeSet, float]]:
    """Every even A with |A| <= D and its squared planted expectation E_P[h_A]^2."""
    _check_adv(params, max_n)
    model = params.model
    pairs = list(itertools.combinations(range(model.n), 2))
    out = []
    for size in range(0, min(params.D, len(pairs)) + 1):
        for combo in itertools.combinations(pairs, size):
            if not _all_components_even(combo):
                continue
            a = EdgeSet(combo)
            out.append((a, planted_h_expectation(a, (), model) ** 2))
    return out


def advantage_exact(params: LowDegParams, max_n: int = ADV_MAX_N) -> float:
    """Adv_{<=D} = sqrt(sum over even A, |A| <= D, of E_P[h_A]^2)."""
    return math.sqrt(math.fsum(t for _, t in advantage_terms(params, max_n)))


def _pair_probs(p: float, q: float, agree: bool) -> np.ndarray:
    """Probabilities of Y_ij in (-1, 0, +1) where ``agree`` means i is ranked above j."""
    up = p * (0.5 + q) if agree else p * (0.5 - q)
    return np.array([p - up, 1 - p, up])


def chi2_exact(params: ModelParams, k_prime: int, max_n: int = CHI2_MAX_N) -> float:
    """chi^2(P_{k'} || Q) with the community size fixed at k'.

    P_{k'}[Y] averages the conditional likelihood over every support of size
    k' and every ranking of it; the sum over all 3^{C(n,2)} matrices is exact.
    """
    n, p, q = params.n, params.p, params.q
    if max_n > CHI2_MAX_N or n > max_n:
        raise ValueError(f"chi2_exact enumerates at most n={CHI2_MAX_N} vertices, got n={n}")
    if not 0 <= k_prime <= n:
        raise ValueError("need 0 <= k' <= n")
    pairs = list(itertools.combinations(range(n), 2))
    m = len(pairs)
    # all observation vectors, entries in {0, 1, 2} standing for {-1, 0, +1}
    obs = np.array(list(itertools.product(range(3), repeat=m)), dtype=np.int64).reshape(-1, m)
    null = _pair_probs(p, 0.0, True)
    q_lik = np.prod(null[obs], axis=1)
    p_lik = np.zeros(len(obs))
    count = 0
    for support in itertools.combinations(range(n), k_prime):
        for perm in itertools.permutations(range(1, k_prime + 1)):
            rank = dict(zip(support, perm))
            lik = np.ones(len(obs))
            for col, (i, j) in enumerate(pairs):
                if i in rank and j in rank:
                    probs = _pair_probs(p, q, rank[i] < rank[j])
                else:
                    probs = null
                lik *= probs[obs[:, col]]
            p_lik += lik
            count += 1
    p_lik /= count
    keep = q_lik > 0
    return float(np.sum(p_lik[keep] ** 2 / q_lik[keep]) - 1.0)


@lru_cache(maxsize=None)
def inversion_counts(h: int) -> np.ndarray:
    """Number of permutations of [h] with each inversion count 0..C(h,2)."""
    if h < 0:
        raise ValueError("h must be nonnegative")
    if h > MGF_MAX_H:
        raise ValueError(f"exact enumeration handles h <= {MGF_MAX_H}")
    perms = _permutation_table(h)
    inv = np.zeros(len(perms), dtype=np.int64)
    for i, j in itertools.combinations(range(h), 2):
        inv += perms[:, i] > perms[:, j]
    counts = np.bincount(inv, minlength=h * (h - 1) // 2 + 1)
    counts.flags.writeable = False
    return counts


def inversion_mgf(h: int, x: float) -> float:
    """E over uniform pi in Sym([h]) of (1+x)^{C(h,2) - 2 inv(pi)}."""
    counts = inversion_counts(h)
    pairs = h * (h - 1) // 2
    inv = np.arange(pairs + 1)
    return float(np.sum(counts * (1.0 + x) ** (pairs - 2 * inv)) / counts.sum())


def inversion_mgf_bound(h: int, x: float) -> float:
    """exp(x^2 h^3 / 2) * (1 + 2 sqrt(pi x^2 h^3 / 2))."""
    t = x * x * h**3 / 2.0
    return math.exp(t) * (1.0 + 2.0 * math.sqrt(math.pi * t))
