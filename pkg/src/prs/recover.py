"""Recovery of the planted community and its ranking."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from prs.metrics import RankingEstimate
from prs.model import DirectedAdjacency
from prs.spectral import DEFAULT_TOL, ConvergenceError, top_eigenpair

DP_MAX = 22


@dataclass(frozen=True, eq=False)
class AngularEmbedding:
    """Polar coordinates of v_i * conj(x) for the vertices kept by the magnitude filter."""

    support: np.ndarray
    magnitudes: np.ndarray
    angles: np.ndarray  # in [-pi, pi)

    def descending_order(self) -> np.ndarray:
        """Support sorted by decreasing angle; equal angles keep the lower index first."""
        return self.support[np.lexsort((self.support, -self.angles))]


def win_scores(graph: DirectedAdjacency) -> np.ndarray:
    """s_i = sum_k Y_ik (wins minus losses)."""
    return graph.entries.sum(axis=1, dtype=np.int64)


def ranking_by_wins(graph: DirectedAdjacency) -> RankingEstimate:
    """Rank all vertices by decreasing score; on equal scores the higher index ranks first."""
    s = win_scores(graph)
    idx = np.arange(graph.n)
    return RankingEstimate(np.lexsort((-idx, -s)))


def angular_embedding(v: np.ndarray, k: float) -> AngularEmbedding:
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    support = np.flatnonzero(np.abs(v) ** 2 >= 1.0 / (2.0 * k))
    x = v[support].sum()
    s = v[support] * np.conj(x)
    ang = np.angle(s)
    ang[ang >= math.pi] -= 2 * math.pi
    return AngularEmbedding(support, np.abs(s), ang)


def recover_from_eigenvector(v: np.ndarray, k: float) -> RankingEstimate:
    """Threshold |v_i|^2 at 1/(2k) and rank the survivors by angle."""
    emb = angular_embedding(v, k)
    return RankingEstimate(emb.descending_order(), info={"embedding": emb})


def spectral_recover(
    graph: DirectedAdjacency,
    k: float,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    max_iters: int | None = None,
) -> RankingEstimate:
    """Community and ranking from the top eigenvector of iY.

    Eigensolver failures propagate as :class:`ConvergenceError`.
    """
    if k <= 0:
        raise ValueError("k must be positive")
    pair = top_eigenpair(graph, tol=tol, max_iters=max_iters, seed=seed)
    est = recover_from_eigenvector(pair.vector, k)
    est.info.update(eigenvalue=pair.value, iterations=pair.iterations)
    return est


def estimate_k(v: np.ndarray, factor: float = 1.0) -> float:
    """Rough community size: factor * #{i : |v_i|^2 >= 1/n}."""
    v = np.asarray(v)
    v = v / np.linalg.norm(v)
    return factor * float(np.count_nonzero(np.abs(v) ** 2 >= 1.0 / len(v)))


# ---------------------------------------------------------------------------
# Exact maximisation of the ordering objective over small vertex sets.


def _subset_table(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """best[M], last[M] for every bitmask M over the m vertices of ``y``.

    best[M] is the maximum of sum_{a above b in M} y[a, b] over orderings of M;
    last[M] is the vertex placed at the bottom of an optimal ordering, the
    smallest such index on ties.  Layered by popcount so each layer is one
    vectorised pass per vertex.
    """
    m = y.shape[0]
    size = 1 << m
    # credit[v, M] = sum_{u in M} y[u, v]: gain from putting v below all of M
    credit = np.zeros((m, size), dtype=np.int16)
    for u in range(m):
        view = credit.reshape(m, -1, 2, 1 << u)
        view[:, :, 1, :] = view[:, :, 0, :] + y[u, :, None, None]
    best = np.full(size, np.iinfo(np.int32).min, dtype=np.int32)
    best[0] = 0
    last = np.full(size, -1, dtype=np.int8)
    masks = np.arange(size, dtype=np.int64)
    popcount = np.zeros(size, dtype=np.int8)
    for u in range(m):
        popcount += ((masks >> u) & 1).astype(np.int8)
    layers = np.argsort(popcount, kind="stable")
    bounds = np.searchsorted(popcount[layers], np.arange(m + 2))
    for c in range(1, m + 1):
        layer = layers[bounds[c] : bounds[c + 1]]
        for v in range(m):
            sel = layer[(layer >> v) & 1 == 1]
            prev = sel ^ (1 << v)
            cand = best[prev] + credit[v, prev]
            better = cand > best[sel]
            best[sel[better]] = cand[better]
            last[sel[better]] = v
    return best, last


def _unwind(last: np.ndarray, mask: int) -> list[int]:
    out = []
    while mask:
        v = int(last[mask])
        out.append(v)
        mask ^= 1 << v
    return out[::-1]


def _local(graph: DirectedAdjacency, subset: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    verts = np.unique(np.asarray(list(subset), dtype=np.int64))
    if len(verts) and (verts[0] < 0 or verts[-1] >= graph.n):
        raise ValueError("subset vertex out of range")
    return verts, graph.entries[np.ix_(verts, verts)].astype(np.int16)


def max_acyclic_ordering_dp(graph: DirectedAdjacency, subset: Iterable[int]) -> tuple[np.ndarray, int]:
    """Ordering of ``subset`` maximising agreements minus disagreements.

    Returns (vertices from top to bottom, objective value).  Bitmask DP, so the
    subset is capped at 22 vertices.
    """
    verts, y = _local(graph, subset)
    if len(verts) > DP_MAX:
        raise ValueError(f"subset has {len(verts)} vertices; the DP handles at most {DP_MAX}")
    if len(verts) == 0:
        return verts, 0
    best, last = _subset_table(y)
    full = (1 << len(verts)) - 1
    return verts[_unwind(last, full)], int(best[full])


def ordering_table(graph: DirectedAdjacency) -> tuple[np.ndarray, np.ndarray]:
    """The DP table over all subsets of the whole vertex set (n <= 22)."""
    if graph.n > DP_MAX:
        raise ValueError(f"n={graph.n} exceeds the DP cap of {DP_MAX}")
    return _subset_table(graph.entries.astype(np.int16))


def _mask_vertices(mask: int) -> list[int]:
    return [v for v in range(mask.bit_length()) if mask >> v & 1]


def mle_recover(graph: DirectedAdjacency, k: int) -> RankingEstimate:
    """Best (support of size exactly k, ordering) for the ordering objective.

    Ties between supports go to the lexicographically smallest sorted support.
    The optimal value is in ``info["value"]``.
    """
    n = graph.n
    if int(k) != k or not 0 <= k <= n:
        raise ValueError(f"need integer 0 <= k <= n, got k={k!r}")
    k = int(k)
    best, last = ordering_table(graph)
    masks = np.arange(1 << n, dtype=np.int64)
    sizes = np.zeros(1 << n, dtype=np.int8)
    for u in range(n):
        sizes += ((masks >> u) & 1).astype(np.int8)
    cand = masks[sizes == k]
    vals = best[cand]
    top = int(vals.max())
    winners = [_mask_vertices(int(mk)) for mk in cand[vals == top]]
    support = min(winners)
    mask = sum(1 << v for v in support)
    return RankingEstimate(np.array(_unwind(last, mask), dtype=np.int64), info={"value": top})


# ---------------------------------------------------------------------------
# Planted ordered clique (tournaments).


def acyclic_order(graph: DirectedAdjacency, vertices: Sequence[int]) -> np.ndarray | None:
    """Topological order of the induced subgraph, or None if it has a directed cycle.

    Kahn's algorithm; among sources the smallest vertex index is taken first.
    """
    verts = np.asarray(list(vertices), dtype=np.int64)
    m = len(verts)
    if m == 0:
        return verts
    sub = graph.entries[np.ix_(verts, verts)]
    indeg = (sub < 0).sum(axis=1)  # sub[i, j] = -1 means j -> i
    alive = np.ones(m, dtype=bool)
    out = []
    for _ in range(m):
        src = np.flatnonzero(alive & (indeg == 0))
        if len(src) == 0:
            return None
        i = src[np.argmin(verts[src])]
        alive[i] = False
        indeg -= (sub[i] > 0).astype(indeg.dtype)
        out.append(verts[i])
    return np.array(out, dtype=np.int64)


def ordered_clique_recover(
    graph: DirectedAdjacency,
    k: float,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    max_iters: int | None = None,
) -> RankingEstimate:
    """Exact recovery of a planted acyclic subtournament.

    Rough support from the eigenvector, split by angle into a top half L and a
    bottom half R (odd sizes give L the extra vertex), then keep every vertex
    beaten by at least 3k/8 of L or beating at least 3k/8 of R.  The result
    is returned only if it induces an acyclic tournament; otherwise, and on
    eigensolver failure, a failure-marked estimate comes back.
    """
    n = graph.n
    if n < 2:
        raise ValueError("need at least two vertices")
    try:
        pair = top_eigenpair(graph, tol=tol, max_iters=max_iters, seed=seed)
    except ConvergenceError as exc:
        return RankingEstimate.failure("eigensolver", detail=str(exc))
    order1 = angular_embedding(pair.vector, k).descending_order()
    half = (len(order1) + 1) // 2
    left, right = order1[:half], order1[half:]
    y = graph.entries
    deg_in = (y[left, :] > 0).sum(axis=0)
    deg_out = (y[:, right] > 0).sum(axis=1)
    cut = 3.0 * k / 8.0
    s2 = np.flatnonzero((deg_in >= cut) | (deg_out >= cut))
    order = acyclic_order(graph, s2)
    info = {"rough_support": np.sort(order1), "refined_support": s2, "eigenvalue": pair.value}
    if order is None:
        return RankingEstimate.failure("cycle", **info)
    return RankingEstimate(order, info=info)


def _candidate_key(est: RankingEstimate) -> tuple:
    return (-len(est), tuple(est.support.tolist()))


def ordered_clique_recover_enhanced(
    graph: DirectedAdjacency,
    k: float,
    b: int,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    max_iters: int | None = None,
    guesses: Iterable[Sequence[int]] | None = None,
) -> RankingEstimate:
    """Guess b top-ranked members B, recurse on their common out-neighbourhood V_B.

    Each guess runs :func:`ordered_clique_recover` on the tournament induced by
    V_B with size parameter k - b; B plus its recovered set is a candidate if
    it is acyclic.  The largest candidate wins, ties going to the
    lexicographically smallest vertex set.  ``guesses`` restricts the
    enumeration (default: all b-subsets in lexicographic order); the loop has no
    shared state, so disjoint slices of the guesses can be run separately and
    merged with :func:`merge_candidates`.
    """
    n = graph.n
    if b < 0:
        raise ValueError("b must be nonnegative")
    if guesses is None:
        guesses = itertools.combinations(range(n), b)
    y = graph.entries
    beats = y > 0
    best: RankingEstimate | None = None
    tried = 0
    for guess in guesses:
        tried += 1
        bset = np.asarray(guess, dtype=np.int64)
        inside = np.ones(n, dtype=bool)
        for u in bset:
            inside &= beats[u]
        inside[bset] = False
        vb = np.flatnonzero(inside)
        if len(vb) >= 2:
            sub = ordered_clique_recover(graph.induced(vb), max(k - b, 1e-9), seed=seed, tol=tol, max_iters=max_iters)
            if sub.failed:
                continue
            found = vb[sub.order]
        else:
            found = vb
        cand_vertices = np.concatenate([bset, found])
        order = acyclic_order(graph, np.sort(cand_vertices))
        if order is None:
            continue
        cand = RankingEstimate(order, info={"guess": tuple(int(u) for u in bset), "v_b_size": len(vb)})
        if best is None or _candidate_key(cand) < _candidate_key(best):
            best = cand
    if best is None:
        return RankingEstimate.failure("no acyclic candidate", guesses=tried)
    best.info["guesses"] = tried
    return best


def merge_candidates(estimates: Iterable[RankingEstimate]) -> RankingEstimate:
    """Combine results of partitioned enhanced runs with the same max rule."""
    ok = [e for e in estimates if not e.failed]
    if not ok:
        return RankingEstimate.failure("no acyclic candidate")
    return min(ok, key=_candidate_key)
