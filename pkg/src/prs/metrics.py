"""Rankings on vertex subsets and the distances used to score estimates."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from prs.model import DirectedAdjacency


@dataclass(frozen=True, eq=False)
class RankingEstimate:
    """An estimated community together with a ranking of it.

    ``order`` lists the members from rank 1 downwards.  A failed estimate has an
    empty order and ``failed=True``; ``info`` carries algorithm diagnostics.
    """

    order: np.ndarray
    failed: bool = False
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        o = np.asarray(self.order, dtype=np.int64).reshape(-1)
        if len(np.unique(o)) != len(o):
            raise ValueError("ranking repeats a vertex")
        object.__setattr__(self, "order", o)

    @classmethod
    def failure(cls, reason: str, **info) -> "RankingEstimate":
        return cls(np.empty(0, dtype=np.int64), failed=True, info={"reason": reason, **info})

    @property
    def support(self) -> np.ndarray:
        return np.sort(self.order)

    @property
    def ranks(self) -> dict[int, int]:
        """Vertex -> rank, ranks starting at 1."""
        return {int(v): r for r, v in enumerate(self.order, 1)}

    def __len__(self):
        return len(self.order)

    def __eq__(self, other):
        if not isinstance(other, RankingEstimate):
            return NotImplemented
        return self.failed == other.failed and np.array_equal(self.order, other.order)


def _as_order(x) -> np.ndarray:
    if isinstance(x, RankingEstimate):
        return x.order
    if hasattr(x, "order") and not isinstance(x, np.ndarray):
        return np.asarray(x.order, dtype=np.int64)
    return np.asarray(x, dtype=np.int64).reshape(-1)


def hamming(a: Iterable[int], b: Iterable[int]) -> int:
    """Size of the symmetric difference of two vertex sets."""
    return len(set(map(int, a)) ^ set(map(int, b)))


def count_inversions(seq: Sequence) -> int:
    """Number of pairs i < j with seq[i] > seq[j], by bottom-up merge sort."""
    a = list(seq)
    n = len(a)
    buf = [None] * n
    inv = 0
    width = 1
    while width < n:
        for lo in range(0, n - width, 2 * width):
            mid, hi = lo + width, min(lo + 2 * width, n)
            i, j, t = lo, mid, lo
            while i < mid and j < hi:
                if a[j] < a[i]:
                    buf[t] = a[j]
                    inv += mid - i
                    j += 1
                else:
                    buf[t] = a[i]
                    i += 1
                t += 1
            buf[t : t + mid - i] = a[i:mid]
            t += mid - i
            buf[t : t + hi - j] = a[j:hi]
            a[lo:hi] = buf[lo:hi]
        width *= 2
    return inv


def kendall_tau(sigma, tau) -> int:
    """Pairs of common vertices that ``sigma`` and ``tau`` order oppositely.

    Each argument is a RankingEstimate or a sequence of vertices listed from the
    top rank down; the supports may differ.
    """
    s, t = _as_order(sigma), _as_order(tau)
    t_rank = {int(v): r for r, v in enumerate(t)}
    seq = [t_rank[int(v)] for v in s if int(v) in t_rank]
    return count_inversions(seq)


def inversions(pi: Sequence[int]) -> int:
    """inv(pi) for a permutation given as the rank vector (pi(1), ..., pi(h))."""
    return count_inversions(pi)


def alignment(order, graph: DirectedAdjacency) -> int:
    """Edges agreeing with ``order`` minus edges disagreeing with it.

    Only pairs inside ``order`` are counted, so for a partial order this is the
    objective sum_{i<j in S} Y_ij pi(i, j) restricted to S.
    """
    o = _as_order(order)
    sub = graph.entries[np.ix_(o, o)].astype(np.int64)
    return int(np.triu(sub, 1).sum())


def normalized_errors(d_h: int | None, d_kt: int | None, k: float) -> tuple[float | None, float | None]:
    """(d_H / k, d_KT / C(k, 2)) with k the model's community size."""
    nh = None if d_h is None else d_h / k
    pairs = k * (k - 1) / 2
    nkt = None if d_kt is None or pairs <= 0 else d_kt / pairs
    return nh, nkt
