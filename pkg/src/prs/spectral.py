"""Eigen-solvers for the Hermitian matrix iY of a directed graph.

For real skew-symmetric Y the spectrum of iY is real and symmetric about zero,
and its absolute values are the singular values of Y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as sla

from prs.model import DirectedAdjacency

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITERS = 20000


class ConvergenceError(RuntimeError):
    """Raised when an iterative eigensolver stops before reaching its tolerance."""

    def __init__(self, message: str, value: float, vector: np.ndarray, iterations: int):
        super().__init__(message)
        self.value = value
        self.vector = vector
        self.iterations = iterations


@dataclass(frozen=True, eq=False)
class EigenPair:
    value: float
    vector: np.ndarray  # complex, unit norm
    residual: float  # ||iY v - value v||_2
    iterations: int = 0
    imag_rayleigh: float = 0.0


def default_max_iters(n: int) -> int:
    """50 * ceil(log2 n), capped at 20000."""
    return min(DEFAULT_MAX_ITERS, 50 * max(1, math.ceil(math.log2(max(n, 2)))))


def _start_vector(n: int, seed: int, complex_: bool) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(int(seed) & 0xFFFFFFFFFFFFFFFF))
    v = rng.standard_normal(n)
    if complex_:
        v = v + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def _dense(graph) -> np.ndarray:
    if isinstance(graph, DirectedAdjacency):
        return graph.entries.astype(np.float64)
    return np.asarray(graph, dtype=np.float64)


def sigma_max(
    graph,
    tol: float = DEFAULT_TOL,
    max_iters: int | None = None,
    method: str = "lanczos",
    seed: int = 0,
) -> float:
    """Largest singular value of Y, i.e. sqrt(lambda_max(Y^T Y)).

    ``method="power"`` runs plain power iteration on Y^T Y until the relative
    residual ||Mv - rho v|| / rho drops below ``tol``; ``method="lanczos"``
    hands the same operator to ARPACK, which needs far fewer products when the
    top of the spectrum has no gap.
    """
    y = _dense(graph)
    n = y.shape[0]
    if tol <= 0:
        raise ValueError("tol must be positive")
    if n == 0 or not np.any(y):
        return 0.0
    max_iters = default_max_iters(n) if max_iters is None else max_iters
    if method == "lanczos" and n >= 3:
        op = sla.LinearOperator((n, n), matvec=lambda x: -(y @ (y @ x)), dtype=np.float64)
        try:
            vals = sla.eigsh(
                op, k=1, which="LA", tol=tol, maxiter=max_iters,
                v0=_start_vector(n, seed, False), return_eigenvectors=False,
            )
        except sla.ArpackNoConvergence as exc:
            val = float(exc.eigenvalues[0]) if len(exc.eigenvalues) else math.nan
            raise ConvergenceError("ARPACK did not converge", math.sqrt(max(val, 0.0)), exc.eigenvectors, max_iters) from exc
        return math.sqrt(max(float(vals[0]), 0.0))
    if method not in ("power", "lanczos"):
        raise ValueError(f"unknown method {method!r}")

    v = _start_vector(n, seed, False)
    rho = 0.0
    for it in range(1, max_iters + 1):
        w = -(y @ (y @ v))
        rho = float(v @ w)
        if rho <= 0.0:
            raise ConvergenceError("start vector lies in the kernel of Y", 0.0, v, it)
        if np.linalg.norm(w - rho * v) <= tol * rho:
            return math.sqrt(rho)
        v = w / np.linalg.norm(w)
    raise ConvergenceError(
        f"power iteration on Y^T Y did not converge in {max_iters} iterations",
        math.sqrt(max(rho, 0.0)), v, max_iters,
    )


def _apply_iy(y: np.ndarray, v: np.ndarray) -> np.ndarray:
    # i Y (a + ib) = -Y b + i Y a, with two real products in one GEMM
    ab = y @ np.column_stack((v.real, v.imag))
    return -ab[:, 1] + 1j * ab[:, 0]


def top_eigenpair(
    graph,
    tol: float = DEFAULT_TOL,
    max_iters: int | None = None,
    seed: int = 0,
    start: np.ndarray | None = None,
) -> EigenPair:
    """Eigenpair of iY with the largest signed eigenvalue.

    Power iteration on iY + sI with s = sigma_max(Y) + 1, so every shifted
    eigenvalue is positive and the top one dominates.  Stops once
    ||iY v - lambda v|| <= tol * sigma_max(Y).
    """
    y = _dense(graph)
    n = y.shape[0]
    if n < 2:
        raise ValueError("need at least two vertices")
    max_iters = default_max_iters(n) if max_iters is None else max_iters
    sig = sigma_max(y, tol=min(tol, 1e-6), seed=seed)
    if sig == 0.0:
        v = np.zeros(n, dtype=complex)
        v[0] = 1.0
        return EigenPair(0.0, v, 0.0, 0)
    shift = sig + 1.0
    v = _start_vector(n, seed, True) if start is None else np.asarray(start, dtype=complex) / np.linalg.norm(start)
    lam = 0.0
    res = math.inf
    for it in range(1, max_iters + 1):
        iyv = _apply_iy(y, v)
        rq = np.vdot(v, iyv)
        lam = float(rq.real)
        res = float(np.linalg.norm(iyv - lam * v))
        if res <= tol * sig:
            return EigenPair(lam, v, res, it, float(rq.imag))
        w = iyv + shift * v
        v = w / np.linalg.norm(w)
    raise ConvergenceError(
        f"shifted power iteration did not converge in {max_iters} iterations (residual {res:.3g})",
        lam, v, max_iters,
    )


def ordering_matrix(l: int) -> np.ndarray:
    """A_l: i above the diagonal, -i below, i.e. iY for the acyclic tournament 1 -> 2 -> ... -> l."""
    a = np.triu(np.ones((l, l)), 1)
    return 1j * (a - a.T)


def analytic_A_eigs(l: int) -> list[tuple[float, np.ndarray]]:
    """Closed-form eigenpairs of A_l, largest eigenvalue first.

    lambda_i = cot((2i-1) pi / (2l)), v_j = exp(-i pi (2i-1) j / l) for j = 1..l
    (unnormalised, each entry has modulus one).
    """
    if l < 1:
        raise ValueError("l must be >= 1")
    j = np.arange(1, l + 1)
    out = []
    for i in range(1, l + 1):
        ang = (2 * i - 1) * math.pi / (2 * l)
        value = math.cos(ang) / math.sin(ang)
        out.append((value, np.exp(-1j * math.pi * (2 * i - 1) * j / l)))
    return out
