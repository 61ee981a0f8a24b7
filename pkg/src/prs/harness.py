"""Seeded Monte Carlo trials and log-density sweeps with CSV/JSON output."""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import time
import typing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from prs import __version__
from prs.detect import STATISTICS, run_detection
from prs.metrics import RankingEstimate, hamming, kendall_tau, normalized_errors
from prs.model import ModelParams, PlantedInstance, mix_seed, sample_null, sample_planted
from prs.recover import (
    mle_recover,
    ordered_clique_recover,
    ordered_clique_recover_enhanced,
    ranking_by_wins,
    spectral_recover,
)

DETECTORS = STATISTICS
RECOVERERS = ("spectral_recover", "ranking_by_wins", "mle", "ordered_clique", "ordered_clique_enhanced")
ALGORITHMS = DETECTORS + RECOVERERS
MODEL_CODE = {"null": 0, "planted": 1}
SIZE_CAPS = {"exhaustive": 16, "mle": 22}


@dataclass(frozen=True)
class GridAxis:
    min: float
    max: float
    steps: int = 1

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError(f"steps must be a positive integer, got {self.steps!r}")
        for v in (self.min, self.max):
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"exponents must lie in [0, 1], got {v!r}")

    def values(self) -> list[float]:
        if self.steps == 1:
            return [float(self.min)]
        return [float(v) for v in np.linspace(self.min, self.max, self.steps)]

    @classmethod
    def parse(cls, value) -> "GridAxis":
        if isinstance(value, (int, float)):
            return cls(float(value), float(value), 1)
        return cls(float(value["min"]), float(value.get("max", value["min"])), int(value.get("steps", 1)))


@dataclass(frozen=True)
class SweepConfig:
    """Grid over (alpha, beta, gamma, n); each cell runs ``trials`` trials of every algorithm."""

    alpha: GridAxis
    beta: GridAxis
    gamma: GridAxis
    n: tuple[int, ...]
    trials: int
    algorithms: tuple[str, ...]
    base_seed: int
    output: str = "sweep"
    workers: int = 1
    b: int = 1
    epsilon: float = 0.1
    recovery_tol: float = 0.1
    record_timing: bool = False

    def __post_init__(self):
        if not self.n or any(int(v) != v or v < 2 for v in self.n):
            raise ValueError(f"n must be a nonempty list of integers >= 2, got {self.n!r}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.algorithms:
            raise ValueError("no algorithms given")
        for algo in self.algorithms:
            if algo not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {algo!r}; choose from {ALGORITHMS}")
            cap = SIZE_CAPS.get(algo)
            if cap is not None and max(self.n) > cap:
                raise ValueError(f"{algo} is limited to n <= {cap}")
        if not 0 <= int(self.base_seed) < 2**64:
            raise ValueError("base_seed must be an unsigned 64-bit integer")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        self.cells()  # builds ModelParams for every grid point, which validates them

    @classmethod
    def from_dict(cls, d: dict) -> "SweepConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config fields: {sorted(extra)}")
        d = dict(d)
        for ax in ("alpha", "beta", "gamma"):
            if ax not in d:
                raise ValueError(f"missing config field {ax!r}")
            d[ax] = GridAxis.parse(d[ax])
        n = d.get("n")
        d["n"] = tuple(int(v) for v in (n if isinstance(n, (list, tuple)) else [n]))
        algos = d.get("algorithms", ())
        d["algorithms"] = tuple([algos] if isinstance(algos, str) else algos)
        return cls(**d)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["n"] = list(self.n)
        d["algorithms"] = list(self.algorithms)
        return d

    def result_settings(self) -> dict:
        """Fields that determine the results; output path, worker count and timing excluded."""
        d = self.to_dict()
        for key in ("output", "workers", "record_timing"):
            d.pop(key)
        return d

    def config_hash(self) -> str:
        return hashlib.sha256(json.dumps(self.result_settings(), sort_keys=True).encode()).hexdigest()

    def cells(self) -> list[tuple[tuple[float, float, float], ModelParams]]:
        out = []
        for n in self.n:
            for a in self.alpha.values():
                for b in self.beta.values():
                    for g in self.gamma.values():
                        out.append(((a, b, g), ModelParams.from_exponents(int(n), a, b, g)))
        return out

    def expected_trials(self) -> int:
        per_cell = sum(2 if a in DETECTORS else 1 for a in self.algorithms)
        return len(self.cells()) * self.trials * per_cell


@dataclass
class TrialRecord:
    """One algorithm run on one sampled graph.  Field order is the CSV column order."""

    algorithm: str
    cell: int
    trial: int
    model: str
    n: int
    k: float
    p: float
    q: float
    alpha: float
    beta: float
    gamma: float
    seed: int
    statistic: float | None = None
    threshold: float | None = None
    decision: bool | None = None
    d_h: int | None = None
    d_kt: int | None = None
    norm_d_h: float | None = None
    norm_d_kt: float | None = None
    exact: bool | None = None
    failed: bool = False
    error: str = ""
    iterations: int | None = None
    wall_time: float | None = None

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in dataclasses.fields(cls)]

    def to_row(self) -> list[str]:
        return [_fmt(getattr(self, c)) for c in self.columns()]

    @classmethod
    def from_row(cls, row: Sequence[str] | dict) -> "TrialRecord":
        if not isinstance(row, dict):
            row = dict(zip(cls.columns(), row))
        hints = typing.get_type_hints(cls)
        return cls(**{c: _parse(row[c], hints[c]) for c in cls.columns()})


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse(text: str, hint):
    args = typing.get_args(hint)
    base = next((a for a in args if a is not type(None)), hint)
    if text == "" and type(None) in args:
        return None
    if base is bool:
        if text not in ("true", "false"):
            raise ValueError(f"bad boolean {text!r}")
        return text == "true"
    if base is int:
        return int(text)
    if base is float:
        return float(text)
    return text


def trial_seed(base_seed: int, cell: int, trial: int, model: str) -> int:
    return mix_seed(base_seed, cell, trial, MODEL_CODE[model])


def _estimate(algorithm: str, graph, params: ModelParams, seed: int, options: dict) -> RankingEstimate:
    if algorithm == "spectral_recover":
        return spectral_recover(graph, params.k, seed=seed)
    if algorithm == "ranking_by_wins":
        return ranking_by_wins(graph)
    if algorithm == "mle":
        return mle_recover(graph, min(graph.n, max(1, round(params.k))))
    if algorithm == "ordered_clique":
        return ordered_clique_recover(graph, params.k, seed=seed)
    if algorithm == "ordered_clique_enhanced":
        return ordered_clique_recover_enhanced(graph, params.k, int(options.get("b", 1)), seed=seed)
    raise ValueError(f"unknown recovery algorithm {algorithm!r}")


def score(est: RankingEstimate, truth: PlantedInstance) -> dict:
    """d_H, d_KT, their normalised versions and exact recovery, against (S, pi_S)."""
    d_h = hamming(est.support, truth.community)
    d_kt = kendall_tau(est, truth.order)
    nh, nkt = normalized_errors(d_h, d_kt, truth.params.k)
    exact = (not est.failed) and np.array_equal(est.order, truth.order)
    return {"d_h": d_h, "d_kt": d_kt, "norm_d_h": nh, "norm_d_kt": nkt, "exact": bool(exact)}


def run_trial(
    params: ModelParams,
    algorithm: str,
    trial: int,
    base_seed: int,
    model: str = "planted",
    cell: int = 0,
    options: dict | None = None,
    exponents: tuple[float, float, float] | None = None,
) -> TrialRecord:
    """Sample, run ``algorithm``, score.  Exceptions become failure records."""
    options = options or {}
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if algorithm in RECOVERERS and model != "planted":
        raise ValueError("recovery trials need the planted model")
    seed = trial_seed(base_seed, cell, trial, model)
    a, b, g = exponents if exponents is not None else (params.alpha, params.beta, params.gamma)
    rec = TrialRecord(algorithm, cell, trial, model, params.n, params.k, params.p, params.q, a, b, g, seed)
    t0 = time.perf_counter()
    try:
        inst = sample_planted(params, seed) if model == "planted" else None
        graph = inst.graph if inst is not None else sample_null(params, seed)
        if algorithm in DETECTORS:
            rep = run_detection(graph, params, algorithm, epsilon=options.get("epsilon", 0.1))
            rec.statistic, rec.threshold, rec.decision = rep.statistic_value, rep.threshold, rep.decision
        else:
            est = _estimate(algorithm, graph, params, seed, options)
            rec.iterations = est.info.get("iterations")
            if est.failed:
                rec.failed = True
                rec.error = str(est.info.get("reason", "failed"))
            for key, val in score(est, inst).items():
                setattr(rec, key, val)
    except Exception as exc:  # recorded, never dropped
        rec.failed = True
        rec.error = f"{type(exc).__name__}: {exc}"
    if options.get("record_timing"):
        rec.wall_time = time.perf_counter() - t0
    return rec


def _job(args) -> TrialRecord:
    return run_trial(**args)


def _jobs(config: SweepConfig) -> list[dict]:
    options = {"b": config.b, "epsilon": config.epsilon, "record_timing": config.record_timing}
    jobs = []
    for ci, (exps, params) in enumerate(config.cells()):
        for algo in config.algorithms:
            models = ("null", "planted") if algo in DETECTORS else ("planted",)
            for t in range(config.trials):
                for m in models:
                    jobs.append(dict(params=params, algorithm=algo, trial=t, base_seed=config.base_seed,
                                     model=m, cell=ci, options=options, exponents=exps))
    return jobs


def summarize(config: SweepConfig, records: Sequence[TrialRecord]) -> list[dict]:
    """Per (cell, algorithm) rates."""
    groups: dict[tuple[int, str], list[TrialRecord]] = {}
    for r in records:
        groups.setdefault((r.cell, r.algorithm), []).append(r)
    cells = config.cells()
    out = []
    for (ci, algo), rows in sorted(groups.items(), key=lambda kv: (kv[0][0], config.algorithms.index(kv[0][1]))):
        (a, b, g), params = cells[ci]
        row: dict[str, Any] = dict(cell=ci, algorithm=algo, n=params.n, alpha=a, beta=b, gamma=g,
                                   k=params.k, p=params.p, q=params.q, trials=len(rows),
                                   failures=sum(r.failed for r in rows))
        if algo in DETECTORS:
            null = [r for r in rows if r.model == "null" and not r.failed]
            planted = [r for r in rows if r.model == "planted" and not r.failed]
            t1 = float(np.mean([r.decision for r in null])) if null else None
            t2 = float(np.mean([not r.decision for r in planted])) if planted else None
            tot = None if t1 is None or t2 is None else t1 + t2
            row.update(type1=t1, type2=t2, total_error=tot, success_rate=None if tot is None else 1.0 - tot / 2)
        else:
            ok = [r for r in rows if not r.failed]
            row["exact_rate"] = float(np.mean([bool(r.exact) for r in rows]))
            kts = [r.norm_d_kt for r in ok if r.norm_d_kt is not None]
            row["mean_norm_d_h"] = float(np.mean([r.norm_d_h for r in ok])) if ok else None
            row["mean_norm_d_kt"] = float(np.mean(kts)) if kts else None
            row["success_rate"] = float(np.mean([
                (not r.failed) and r.norm_d_h <= config.recovery_tol and (r.norm_d_kt or 0.0) <= config.recovery_tol
                for r in rows
            ]))
        out.append(row)
    return out


def header(config: SweepConfig) -> dict:
    return {"artifact_version": __version__, "config_hash": config.config_hash(), "base_seed": int(config.base_seed)}


def format_csv(config: SweepConfig, records: Sequence[TrialRecord]) -> str:
    buf = io.StringIO()
    for key, val in header(config).items():
        buf.write(f"# {key}={val}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TrialRecord.columns())
    for r in records:
        w.writerow(r.to_row())
    buf.write(f"# total_trials={len(records)}\n")
    return buf.getvalue()


def read_records(path: str | Path) -> list[TrialRecord]:
    lines = [ln for ln in Path(path).read_text().splitlines() if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    if reader.fieldnames != TrialRecord.columns():
        raise ValueError(f"unexpected CSV columns {reader.fieldnames}")
    return [TrialRecord.from_row(row) for row in reader]


def run_sweep(config: SweepConfig) -> tuple[Path, Path]:
    """Run every trial and write ``<output>.csv`` and ``<output>.json``; returns both paths."""
    jobs = _jobs(config)
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            records = list(pool.map(_job, jobs, chunksize=1))
    else:
        records = [_job(j) for j in jobs]
    expected = config.expected_trials()
    if len(records) != expected:
        raise RuntimeError(f"ran {len(records)} trials, expected {expected}")
    base = Path(config.output)
    base.parent.mkdir(parents=True, exist_ok=True)
    csv_path = base.with_name(base.name + ".csv")
    json_path = base.with_name(base.name + ".json")
    csv_path.write_text(format_csv(config, records))
    summary = {
        "header": header(config),
        "config": config.result_settings(),
        "cells": summarize(config, records),
        "footer": {"total_trials": len(records), "expected_trials": expected,
                   "failures": sum(r.failed for r in records)},
    }
    json_path.write_text(json.dumps(summary, indent=2, sort_keys=True, default=_json_default, allow_nan=False) + "\n")
    return csv_path, json_path


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")
