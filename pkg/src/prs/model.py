"""Planted ranked subgraph model: parameters, samplers and the text file format.

Randomness comes from numpy's Philox counter-based generator.  Every sampler
draws one uniform per unordered pair in lexicographic ``(i < j)`` order, so the
output depends only on ``(params, seed)`` and not on how the draws are chunked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

# Rows of the upper triangle drawn per chunk; bounds peak memory for large n.
_PAIR_CHUNK = 1 << 22


@dataclass(frozen=True)
class ModelParams:
    n: int
    k: float
    p: float
    q: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if not 0 < self.k <= self.n:
            raise ValueError(f"need 0 < k <= n, got k={self.k!r}, n={self.n}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"need 0 <= p <= 1, got {self.p!r}")
        if not 0.0 <= self.q <= 0.5:
            raise ValueError(f"need 0 <= q <= 1/2, got {self.q!r}")
        object.__setattr__(self, "n", int(self.n))

    @classmethod
    def from_exponents(cls, n: int, alpha: float, beta: float, gamma: float) -> "ModelParams":
        """Log-density parametrisation: q = n^-alpha, k = n^beta, p = n^-gamma."""
        return cls(n=n, k=float(n) ** beta, p=float(n) ** -gamma, q=float(n) ** -alpha)

    def _exponent(self, value: float, sign: float) -> float:
        if self.n == 1:
            return math.nan
        if value == 0:
            return math.inf
        return sign * math.log(value) / math.log(self.n)

    @property
    def alpha(self) -> float:
        return self._exponent(self.q, -1.0)

    @property
    def beta(self) -> float:
        return self._exponent(self.k, 1.0)

    @property
    def gamma(self) -> float:
        return self._exponent(self.p, -1.0)


@dataclass(frozen=True, eq=False)
class DirectedAdjacency:
    """Skew-symmetric matrix with entries in {-1, 0, +1}; ``+1`` at (i, j) is an edge i -> j."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.entries)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {a.shape}")
        a = np.array(a, dtype=np.int8, copy=True)
        if np.any(np.abs(a) > 1):
            raise ValueError("entries must lie in {-1, 0, 1}")
        if np.any(a != -a.T):
            raise ValueError("adjacency must be skew-symmetric with zero diagonal")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __eq__(self, other):
        if not isinstance(other, DirectedAdjacency):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def as_float(self) -> np.ndarray:
        return self.entries.astype(np.float64)

    def induced(self, vertices: Sequence[int]) -> "DirectedAdjacency":
        idx = np.asarray(vertices, dtype=np.intp)
        return DirectedAdjacency(self.entries[np.ix_(idx, idx)])

    def edges(self) -> np.ndarray:
        """Directed edges as an (m, 2) array of (tail, head), lexicographic."""
        return np.argwhere(self.entries > 0)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "DirectedAdjacency":
        e = np.asarray(list(edges), dtype=np.intp).reshape(-1, 2)
        a = np.zeros((n, n), dtype=np.int8)
        if len(e) == 0:
            return cls(a)
        if np.any(e[:, 0] == e[:, 1]):
            raise ValueError(f"self-loop at vertex {e[e[:, 0] == e[:, 1]][0, 0]}")
        lo, hi = e.min(axis=1), e.max(axis=1)
        if len(np.unique(lo * n + hi)) != len(e):
            raise ValueError("more than one edge between some pair of vertices")
        a[e[:, 0], e[:, 1]] = 1
        a[e[:, 1], e[:, 0]] = -1
        return cls(a)

    @classmethod
    def acyclic_tournament(cls, order: Sequence[int]) -> "DirectedAdjacency":
        """Tournament in which every edge points from the earlier to the later vertex of ``order``."""
        order = np.asarray(order, dtype=np.intp)
        n = len(order)
        rank = np.empty(n, dtype=np.intp)
        rank[order] = np.arange(n)
        a = np.sign(rank[None, :] - rank[:, None]).astype(np.int8)
        return cls(a)


@dataclass(frozen=True, eq=False)
class PlantedInstance:
    """Ground truth of one planted sample.

    ``community`` is sorted; ``ranks[t]`` is the rank (1 = top) of ``community[t]``.
    """

    params: ModelParams
    community: np.ndarray
    ranks: np.ndarray
    graph: DirectedAdjacency

    def __post_init__(self):
        s = np.asarray(self.community, dtype=np.int64)
        r = np.asarray(self.ranks, dtype=np.int64)
        _check_ranking(s, r)
        if self.graph.n != self.params.n:
            raise ValueError(f"graph has {self.graph.n} vertices, params say n={self.params.n}")
        if len(s) and (s[0] < 0 or s[-1] >= self.params.n):
            raise ValueError("community vertex out of range")
        object.__setattr__(self, "community", s)
        object.__setattr__(self, "ranks", r)

    @property
    def order(self) -> np.ndarray:
        """Community members from top rank to bottom rank."""
        return self.community[np.argsort(self.ranks, kind="stable")]

    def __eq__(self, other):
        if not isinstance(other, PlantedInstance):
            return NotImplemented
        return (
            self.params == other.params
            and np.array_equal(self.community, other.community)
            and np.array_equal(self.ranks, other.ranks)
            and self.graph == other.graph
        )


def _check_ranking(community: np.ndarray, ranks: np.ndarray) -> None:
    if community.shape != ranks.shape or community.ndim != 1:
        raise ValueError("community and ranks must be 1-d arrays of equal length")
    if len(np.unique(community)) != len(community):
        raise ValueError("community has repeated vertices")
    if np.any(np.diff(community) < 0):
        raise ValueError("community must be sorted")
    if not np.array_equal(np.sort(ranks), np.arange(1, len(ranks) + 1)):
        raise ValueError("ranks must be a bijection onto 1..|S|")


def _generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed) & 0xFFFFFFFFFFFFFFFF))


def mix_seed(base_seed: int, *index: int) -> int:
    """Per-trial seed: first 64-bit word of SeedSequence(base_seed, spawn_key=index)."""
    ss = np.random.SeedSequence(entropy=int(base_seed), spawn_key=tuple(int(i) for i in index))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _orient_pairs(
    n: int, p: float, rng: np.random.Generator, rank: np.ndarray | None = None, q: float = 0.0
) -> DirectedAdjacency:
    """Fill the upper triangle pair by pair in lexicographic order.

    ``rank`` has length n, 0 outside the community and 1..|S| inside.  For a
    pair inside the community the edge points from the better-ranked vertex
    w.p. p(1/2 + q); every other pair gets a uniformly random direction.
    """
    y = np.zeros((n, n), dtype=np.int8)
    half = p / 2.0
    rows_per_chunk = max(1, _PAIR_CHUNK // max(n, 1))
    for start in range(0, n - 1, rows_per_chunk):
        ii, jj = _triu_block(n, start, min(n - 1, start + rows_per_chunk))
        u = rng.random(len(ii))
        if rank is None:
            fwd = half
        else:
            ri, rj = rank[ii], rank[jj]
            inside = (ri > 0) & (rj > 0)
            fwd = np.where(inside, np.where(ri < rj, p * (0.5 + q), p * (0.5 - q)), half)
        y[ii, jj] = np.where(u < fwd, 1, np.where(u < p, -1, 0))
    return DirectedAdjacency(y - y.T)


def _triu_block(n: int, start: int, stop: int) -> tuple[np.ndarray, np.ndarray]:
    """Pairs (i, j), i < j, for rows start..stop-1 in lexicographic order."""
    rows = np.arange(start, stop)
    counts = n - 1 - rows
    ii = np.repeat(rows, counts)
    offsets = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    return ii, ii + 1 + offsets


def _rank_vector(n: int, community: np.ndarray, ranks: np.ndarray) -> np.ndarray:
    rank = np.zeros(n, dtype=np.int64)
    rank[community] = ranks
    return rank


def sample_null(params: ModelParams, seed: int) -> DirectedAdjacency:
    """Each pair: no edge w.p. 1-p, otherwise a uniformly random direction."""
    return _orient_pairs(params.n, params.p, _generator(seed), None)


def sample_planted(params: ModelParams, seed: int) -> PlantedInstance:
    """Draw S (each vertex w.p. k/n), a uniform ranking of S, then the biased graph."""
    rng = _generator(seed)
    n = params.n
    community = np.flatnonzero(rng.random(n) < params.k / n)
    ranks = rng.permutation(len(community)) + 1
    graph = _orient_pairs(n, params.p, rng, _rank_vector(n, community, ranks), params.q)
    return PlantedInstance(params, community, ranks, graph)


def sample_planted_given(
    params: ModelParams, community: Sequence[int], ranks: Sequence[int], seed: int
) -> PlantedInstance:
    """Planted graph with the community and its ranking held fixed.

    With an empty community this reproduces ``sample_null`` bit for bit.
    """
    community = np.asarray(community, dtype=np.int64)
    ranks = np.asarray(ranks, dtype=np.int64)
    if community.shape != ranks.shape:
        raise ValueError("community and ranks must have equal length")
    order = np.argsort(community, kind="stable")
    community, ranks = community[order], ranks[order]
    _check_ranking(community, ranks)
    if len(community) and (community[0] < 0 or community[-1] >= params.n):
        raise ValueError("community vertex out of range")
    n = params.n
    rank = _rank_vector(n, community, ranks) if len(community) >= 2 else None
    graph = _orient_pairs(n, params.p, _generator(seed), rank, params.q)
    return PlantedInstance(params, community, ranks, graph)


# ---------------------------------------------------------------------------
# Text format.  Vertices are 1-indexed on disk, 0-indexed in memory.


def format_graph(graph: DirectedAdjacency, community=None, ranks=None, params: ModelParams | None = None) -> str:
    lines = [f"n {graph.n}"]
    if params is not None:
        lines.append(f"# params k {params.k!r} p {params.p!r} q {params.q!r}")
    if community is not None:
        lines.append(" ".join(["S"] + [str(v + 1) for v in community]))
        lines.append(" ".join(["pi"] + [str(int(r)) for r in ranks]))
    lines.extend(f"{u + 1} {v + 1}" for u, v in graph.edges())
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> tuple[DirectedAdjacency, np.ndarray | None, np.ndarray | None, dict]:
    """Inverse of :func:`format_graph`; returns (graph, community, ranks, params-dict)."""
    n = None
    community = ranks = None
    meta: dict[str, float] = {}
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        tok = raw.split()
        if tok[:2] == ["#", "params"]:
            meta = {key: float(val) for key, val in zip(tok[2::2], tok[3::2])}
            continue
        if not tok or tok[0].startswith("#"):
            continue
        try:
            if tok[0] == "n":
                n = int(tok[1])
            elif tok[0] == "S":
                community = np.array([int(t) - 1 for t in tok[1:]], dtype=np.int64)
            elif tok[0] == "pi":
                ranks = np.array([int(t) for t in tok[1:]], dtype=np.int64)
            else:
                u, v = int(tok[0]) - 1, int(tok[1]) - 1
                edges.append((u, v))
        except (IndexError, ValueError) as exc:
            raise ValueError(f"line {lineno}: cannot parse {raw!r}") from exc
    if n is None:
        raise ValueError("missing 'n <n>' header line")
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u + 1}, {v + 1}) out of range for n={n}")
    if (community is None) != (ranks is None):
        raise ValueError("instance files need both 'S' and 'pi' lines")
    return DirectedAdjacency.from_edges(n, edges), community, ranks, meta


def save_graph(path: str | Path, graph: DirectedAdjacency) -> None:
    Path(path).write_text(format_graph(graph))


def save_instance(path: str | Path, inst: PlantedInstance) -> None:
    Path(path).write_text(format_graph(inst.graph, inst.community, inst.ranks, inst.params))


def load_graph(path: str | Path) -> DirectedAdjacency:
    return parse_graph(Path(path).read_text())[0]


def load_instance(path: str | Path, params: ModelParams | None = None) -> PlantedInstance:
    graph, community, ranks, meta = parse_graph(Path(path).read_text())
    if community is None:
        raise ValueError(f"{path} has no 'S'/'pi' lines")
    if params is None:
        if not meta:
            raise ValueError(f"{path} carries no '# params' line; pass params explicitly")
        params = ModelParams(n=graph.n, k=meta["k"], p=meta["p"], q=meta["q"])
    return PlantedInstance(params, community, ranks, graph)
