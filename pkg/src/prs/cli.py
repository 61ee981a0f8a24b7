"""Command line entry point: ``prs {sample,detect,recover,oracle,sweep}``."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from prs import lowdeg
from prs.detect import STATISTICS, run_detection
from prs.harness import RECOVERERS, SweepConfig, _estimate, run_sweep, score
from prs.model import (
    DirectedAdjacency,
    ModelParams,
    format_graph,
    parse_graph,
    PlantedInstance,
    sample_null,
    sample_planted,
)
from prs.spectral import ConvergenceError, analytic_A_eigs

EXIT_OK, EXIT_CONFIG, EXIT_FAILURE = 0, 2, 3
ORACLES = ("sign", "monomial", "advantage", "chi2", "mgf", "A_eigs")
PARAM_KEYS = ("n", "k", "p", "q", "alpha", "beta", "gamma")


class ConfigError(ValueError):
    pass


class AlgorithmFailure(RuntimeError):
    pass


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config; flags override its fields")
    common.add_argument("--seed", type=_u64, required=True, help="unsigned 64-bit seed (mandatory)")
    common.add_argument("--out", help="output path (stdout if omitted; sweep: output prefix)")
    common.add_argument("--algo", help="algorithm / statistic / oracle id")
    for key, typ in (("n", int), ("k", float), ("p", float), ("q", float),
                     ("alpha", float), ("beta", float), ("gamma", float)):
        common.add_argument(f"--{key}", type=typ, default=None)

    parser = argparse.ArgumentParser(prog="prs", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", parents=[common], help="write a sampled graph or planted instance")
    p.add_argument("--model", choices=("planted", "null"), default=None)

    p = sub.add_parser("detect", parents=[common], help=f"run a detection statistic {STATISTICS}")
    p.add_argument("--graph", help="graph/instance file to test instead of sampling")
    p.add_argument("--model", choices=("planted", "null"), default=None)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--epsilon", type=float, default=None)

    p = sub.add_parser("recover", parents=[common], help=f"run a recovery algorithm {RECOVERERS}")
    p.add_argument("--graph", help="graph/instance file instead of sampling")
    p.add_argument("--b", type=int, default=None, help="guess size for ordered_clique_enhanced")

    p = sub.add_parser("oracle", parents=[common], help=f"exact small-instance oracles {ORACLES}")
    p.add_argument("--edges", help="edge set as 'i-j,i-j,...'")
    p.add_argument("--D", type=int, default=None)
    p.add_argument("--k-prime", dest="k_prime", type=int, default=None)
    p.add_argument("--h", type=int, default=None)
    p.add_argument("--x", type=float, default=None)
    p.add_argument("--l", type=int, default=None)

    p = sub.add_parser("sweep", parents=[common], help="log-density sweep to CSV + JSON")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    return parser


def _settings(args) -> dict:
    """Config file fields overlaid with every flag that was given."""
    conf: dict = {}
    if args.config:
        try:
            conf = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(conf, dict):
            raise ConfigError("config must be a JSON object")
    for key, val in vars(args).items():
        if key in ("config", "command") or val is None:
            continue
        conf[key] = val
    return conf


def _params(conf: dict, n: int | None = None) -> ModelParams:
    if n is not None:
        conf = {**conf, "n": n}
    if "n" not in conf:
        raise ConfigError("missing n")
    expo = [key for key in ("alpha", "beta", "gamma") if key in conf]
    direct = [key for key in ("k", "p", "q") if key in conf]
    try:
        if expo:
            if direct or len(expo) != 3:
                raise ConfigError("give either all of --alpha/--beta/--gamma or --k/--p/--q, not a mix")
            return ModelParams.from_exponents(int(conf["n"]), conf["alpha"], conf["beta"], conf["gamma"])
        if len(direct) != 3:
            raise ConfigError("missing model parameters: need --k, --p and --q (or --alpha/--beta/--gamma)")
        return ModelParams(int(conf["n"]), float(conf["k"]), float(conf["p"]), float(conf["q"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n"


def _jsonable(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, Fraction):
        return str(o)
    raise TypeError(type(o).__name__)


def _load_or_sample(conf: dict, default_model: str) -> tuple[DirectedAdjacency, ModelParams | None, PlantedInstance | None]:
    if conf.get("graph"):
        try:
            graph, community, ranks, meta = parse_graph(Path(conf["graph"]).read_text())
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read graph {conf['graph']}: {exc}") from exc
        merged = {**meta, **{key: conf[key] for key in PARAM_KEYS if key in conf}}
        merged.pop("n", None)
        params = _params(merged, n=graph.n) if any(key in merged for key in PARAM_KEYS) else None
        inst = None
        if community is not None and params is not None:
            inst = PlantedInstance(params, community, ranks, graph)
        return graph, params, inst
    params = _params(conf)
    model = conf.get("model", default_model)
    if model == "planted":
        inst = sample_planted(params, conf["seed"])
        return inst.graph, params, inst
    return sample_null(params, conf["seed"]), params, None


def cmd_sample(conf: dict) -> int:
    params = _params(conf)
    if conf.get("model", "planted") == "planted":
        inst = sample_planted(params, conf["seed"])
        text = format_graph(inst.graph, inst.community, inst.ranks, params)
    else:
        text = format_graph(sample_null(params, conf["seed"]), params=params)
    _emit(text, conf.get("out"))
    return EXIT_OK


def cmd_detect(conf: dict) -> int:
    kind = conf.get("algo", "degree2")
    if kind not in STATISTICS:
        raise ConfigError(f"unknown statistic {kind!r}; choose from {STATISTICS}")
    graph, params, _ = _load_or_sample(conf, "planted")
    if params is None:
        raise ConfigError("detection needs model parameters (file '# params' line or flags)")
    try:
        rep = run_detection(graph, params, kind, threshold=conf.get("threshold"), epsilon=conf.get("epsilon", 0.1))
    except ConvergenceError as exc:
        raise AlgorithmFailure(str(exc)) from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    out = {"statistic_kind": rep.statistic_kind, "statistic_value": rep.statistic_value,
           "threshold": rep.threshold, "decision": "planted" if rep.decision else "null",
           "n": graph.n, "seed": conf["seed"]}
    _emit(_dumps(out), conf.get("out"))
    return EXIT_OK


def cmd_recover(conf: dict) -> int:
    algo = conf.get("algo", "spectral_recover")
    if algo not in RECOVERERS:
        raise ConfigError(f"unknown recovery algorithm {algo!r}; choose from {RECOVERERS}")
    graph, params, inst = _load_or_sample(conf, "planted")
    if params is None:
        raise ConfigError("recovery needs k (file '# params' line or flags)")
    try:
        est = _estimate(algo, graph, params, conf["seed"], {"b": conf.get("b", 1)})
    except ConvergenceError as exc:
        raise AlgorithmFailure(str(exc)) from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if est.failed:
        raise AlgorithmFailure(f"{algo} failed: {est.info.get('reason')}")
    lines = [f"# estimate {algo} seed {conf['seed']}"]
    if inst is not None:
        s = score(est, inst)
        lines.append("# truth " + " ".join(f"{key} {val}" for key, val in s.items()))
        lines.append("# truth_S " + " ".join(str(v + 1) for v in inst.community))
        lines.append("# truth_pi " + " ".join(str(int(r)) for r in inst.ranks))
    ranks = np.argsort(est.order, kind="stable") + 1  # aligned with the sorted support
    body = format_graph(graph, est.support, ranks, params)
    _emit("\n".join(lines) + "\n" + body, conf.get("out"))
    return EXIT_OK


def _edges(conf: dict) -> lowdeg.EdgeSet:
    text = conf.get("edges")
    if text is None:
        raise ConfigError("--edges is required for this oracle")
    try:
        pairs = [tuple(int(v) for v in item.split("-")) for item in text.split(",") if item.strip()]
        return lowdeg.EdgeSet(pairs)
    except ValueError as exc:
        raise ConfigError(f"bad edge list {text!r}: {exc}") from exc


def _need(conf: dict, key: str):
    if conf.get(key) is None:
        raise ConfigError(f"--{key.replace('_', '-')} is required for this oracle")
    return conf[key]


def cmd_oracle(conf: dict) -> int:
    name = conf.get("algo")
    if name not in ORACLES:
        raise ConfigError(f"unknown oracle {name!r}; choose from {ORACLES}")
    try:
        if name == "sign":
            a = _edges(conf)
            val = lowdeg.ordering_sign_expectation(a)
            out = {"edges": sorted(a.edges), "value": str(val), "float": float(val)}
        elif name == "monomial":
            a = _edges(conf)
            out = {"edges": sorted(a.edges), "value": lowdeg.planted_monomial_expectation(a, _params(conf))}
        elif name == "advantage":
            lp = lowdeg.LowDegParams(int(_need(conf, "D")), _params(conf))
            out = {"D": lp.D, "value": lowdeg.advantage_exact(lp)}
        elif name == "chi2":
            out = {"k_prime": _need(conf, "k_prime"), "value": lowdeg.chi2_exact(_params(conf), int(conf["k_prime"]))}
        elif name == "mgf":
            h, x = int(_need(conf, "h")), float(_need(conf, "x"))
            out = {"h": h, "x": x, "bound": lowdeg.inversion_mgf_bound(h, x)}
            if h <= lowdeg.MGF_MAX_H:
                out["exact"] = lowdeg.inversion_mgf(h, x)
        else:
            pairs = analytic_A_eigs(int(_need(conf, "l")))
            out = {"l": int(conf["l"]), "eigenvalues": [v for v, _ in pairs]}
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    out["oracle"] = name
    _emit(_dumps(out), conf.get("out"))
    return EXIT_OK


def cmd_sweep(conf: dict) -> int:
    fields = dict(conf)
    fields["base_seed"] = fields.pop("seed")
    if "out" in fields:
        fields["output"] = fields.pop("out")
    if "algo" in fields:
        fields["algorithms"] = [a.strip() for a in str(fields.pop("algo")).split(",")]
    for key in ("k", "p", "q"):
        if key in fields:
            raise ConfigError(f"sweeps are parametrised by exponents; --{key} is not allowed")
    try:
        config = SweepConfig.from_dict(fields)
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(f"invalid sweep config: {exc}") from exc
    csv_path, json_path = run_sweep(config)
    sys.stdout.write(f"{csv_path}\n{json_path}\n")
    return EXIT_OK


COMMANDS = {"sample": cmd_sample, "detect": cmd_detect, "recover": cmd_recover,
            "oracle": cmd_oracle, "sweep": cmd_sweep}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        conf = _settings(args)
        return COMMANDS[args.command](conf)
    except ConfigError as exc:
        print(f"prs: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AlgorithmFailure as exc:
        print(f"prs: algorithm failure: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
