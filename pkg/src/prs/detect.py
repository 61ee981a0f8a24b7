"""Test statistics for planted (P) versus null (Q) and the threshold tests built on them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from prs.model import DirectedAdjacency, ModelParams
from prs.recover import ordering_table
from prs.spectral import DEFAULT_TOL, sigma_max

EXHAUSTIVE_MAX = 16
SPECTRAL_EDGE = 2.0
STATISTICS = ("degree2", "spectral", "exhaustive")


@dataclass(frozen=True)
class DetectionReport:
    statistic_value: float
    threshold: float
    decision: bool  # True means "planted"
    statistic_kind: str


@dataclass(frozen=True)
class Calibration:
    threshold: float
    total_error: float  # type I + type II on the calibration samples


def degree2_statistic(graph: DirectedAdjacency) -> int:
    """f(Y) = sum_{i, j != k} Y_ij Y_ik, computed as (sum_i r_i^2 - sum_i w_i) / 2.

    r_i is the row sum and w_i the number of edges at i; the diagonal terms
    Y_ij^2 are exactly the w_i.
    """
    y = graph.entries
    r = y.sum(axis=1, dtype=np.int64)
    w = np.count_nonzero(y, axis=1).astype(np.int64)
    return int((r @ r - w.sum()) // 2)


def degree2_threshold(params: ModelParams) -> float:
    """k^3 p^2 q^2 / 3, half the planted mean of the statistic (to leading order)."""
    return params.k**3 * params.p**2 * params.q**2 / 3.0


def degree2_moments(params: ModelParams) -> tuple[float, float, float]:
    """(E_Q f, Var_Q f to leading order, E_P f) for the degree-2 statistic."""
    n, k, p, q = params.n, params.k, params.p, params.q
    e_p = n * (n - 1) * (n - 2) / 2 * (4.0 / 3.0) * (k / n) ** 3 * p**2 * q**2
    return 0.0, n**3 * p**2 / 2.0, e_p


def spectral_statistic(graph: DirectedAdjacency, tol: float = DEFAULT_TOL, method: str = "lanczos", seed: int = 0) -> float:
    """lambda_max(iY) / sqrt(n); the spectrum of iY is symmetric so this is sigma_max(Y) / sqrt(n)."""
    if graph.n == 0:
        raise ValueError("empty graph")
    return sigma_max(graph, tol=tol, method=method, seed=seed) / math.sqrt(graph.n)


def spectral_threshold(epsilon: float = 0.1) -> float:
    return SPECTRAL_EDGE + epsilon


def exhaustive_detect_statistic(graph: DirectedAdjacency, k: float) -> int:
    """max over vertex sets of size <= 2k and orderings of the alignment objective."""
    n = graph.n
    if n > EXHAUSTIVE_MAX:
        raise ValueError(f"exhaustive search handles n <= {EXHAUSTIVE_MAX}, got {n}")
    cap = min(n, int(math.floor(2 * k)))
    best, _ = ordering_table(graph)
    masks = np.arange(1 << n, dtype=np.int64)
    sizes = np.zeros(1 << n, dtype=np.int64)
    for u in range(n):
        sizes += (masks >> u) & 1
    return int(best[sizes <= cap].max())


def exhaustive_threshold(params: ModelParams) -> float:
    return 0.5 * params.p * params.q * params.k**2


def statistic(graph: DirectedAdjacency, kind: str, params: ModelParams | None = None, **kw) -> float:
    if kind == "degree2":
        return float(degree2_statistic(graph))
    if kind == "spectral":
        return spectral_statistic(graph, **kw)
    if kind == "exhaustive":
        if params is None:
            raise ValueError("the exhaustive statistic needs the model parameters (for k)")
        return float(exhaustive_detect_statistic(graph, params.k))
    raise ValueError(f"unknown statistic {kind!r}; choose from {STATISTICS}")


def default_threshold(kind: str, params: ModelParams, epsilon: float = 0.1) -> float:
    if kind == "degree2":
        return degree2_threshold(params)
    if kind == "spectral":
        return spectral_threshold(epsilon)
    if kind == "exhaustive":
        return exhaustive_threshold(params)
    raise ValueError(f"unknown statistic {kind!r}; choose from {STATISTICS}")


def run_detection(
    graph: DirectedAdjacency,
    params: ModelParams,
    kind: str = "degree2",
    threshold: float | None = None,
    epsilon: float = 0.1,
    **kw,
) -> DetectionReport:
    """Declare "planted" when the statistic reaches the threshold."""
    if graph.n != params.n:
        raise ValueError(f"graph has {graph.n} vertices but params say n={params.n}")
    thr = default_threshold(kind, params, epsilon) if threshold is None else float(threshold)
    val = statistic(graph, kind, params, **kw)
    return DetectionReport(val, thr, bool(val >= thr), kind)


def total_error(null_values: Sequence[float], planted_values: Sequence[float], threshold: float) -> float:
    """Empirical Q(decide planted) + P(decide null)."""
    null = np.asarray(null_values, dtype=float)
    planted = np.asarray(planted_values, dtype=float)
    return float(np.mean(null >= threshold) + np.mean(planted < threshold))


def calibrate_threshold(null_values: Sequence[float], planted_values: Sequence[float]) -> Calibration:
    """Threshold minimising the empirical total error; ties go to the smallest threshold."""
    null = np.sort(np.asarray(null_values, dtype=float))
    planted = np.sort(np.asarray(planted_values, dtype=float))
    if len(null) == 0 or len(planted) == 0:
        raise ValueError("need samples from both distributions")
    cands = np.unique(np.concatenate([null, planted, [np.inf]]))
    type1 = 1.0 - np.searchsorted(null, cands, side="left") / len(null)
    type2 = np.searchsorted(planted, cands, side="left") / len(planted)
    err = type1 + type2
    i = int(np.argmin(err))
    return Calibration(float(cands[i]), float(err[i]))
