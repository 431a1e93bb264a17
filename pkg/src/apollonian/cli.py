"""Command line entry point: render, count, dim, measure, chain, verify.

Settings come from flags, then a key=value config file (--config), then defaults.
The resolved settings are echoed into every output.  Exit codes: 0 success,
1 computation failure, 2 usage error, 3 verification failure.
"""
from __future__ import annotations

import argparse
import configparser
import json
import os
import sys

EXIT_OK, EXIT_COMPUTE, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(Exception):
    pass


DEFAULTS = {
    "curvatures": "2,3,6",
    "backend": "auto",
    "d": None,
    "lambda": None,
    "lambda_max": 1e6,
    "lambda_min": None,
    "per_decade": 16,
    "threads": None,
    "output": None,
    "seed": 7,
    "cutoff": 1000.0,
    "steps": 500,
    "paths": 32,
    "n_max": 40,
    "lambda_kernel": 1e5,
    "lambda_eval": 1e5,
    "other": None,
    "cap": None,
}

CASTS = {
    "d": float,
    "lambda": float,
    "lambda_max": float,
    "lambda_min": float,
    "per_decade": int,
    "threads": int,
    "seed": int,
    "cutoff": float,
    "steps": int,
    "paths": int,
    "n_max": int,
    "lambda_kernel": float,
    "lambda_eval": float,
    "cap": int,
}


def read_config(path: str) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment, dashes in keys become underscores."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_string("[config]\n" + fh.read(), source=path)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise UsageError(f"bad config file {path}: {exc}") from exc
    out = {}
    for key, value in parser["config"].items():
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise UsageError(f"unknown config key {key!r} in {path}")
        out[key] = value
    return out


def resolve(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(read_config(args.config))
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    for key, cast in CASTS.items():
        if cfg[key] is not None:
            try:
                cfg[key] = cast(float(cfg[key])) if cast is int else cast(cfg[key])
            except (TypeError, ValueError):
                raise UsageError(f"{key} must be a number, got {cfg[key]!r}") from None
    return cfg


def parse_curvatures(text: str):
    from .curvature import CurvatureVector

    try:
        parts = [p.strip() for p in str(text).split(",")]
        vals = [int(p) if p.lstrip("-").isdigit() else float(p) for p in parts]
    except ValueError:
        raise UsageError(f"curvatures must be comma-separated numbers, got {text!r}") from None
    if len(vals) != 3:
        raise UsageError("give exactly three curvatures alpha,beta,gamma (kappa is derived)")
    try:
        return CurvatureVector.from_triple(*vals)
    except ValueError as exc:
        raise UsageError(f"invalid curvature triple {text!r}: {exc}") from None


def _echo(cfg: dict, command: str) -> dict:
    return {"command": command, **{k: cfg[k] for k in sorted(cfg)}}


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n"


def _threads(cfg: dict) -> None:
    import numba

    if cfg["threads"]:
        numba.set_num_threads(max(1, min(cfg["threads"], numba.config.NUMBA_NUM_THREADS)))


def _d(cfg: dict) -> float:
    from .dimension import SESSION_DIMENSION

    return cfg["d"] if cfg["d"] is not None else SESSION_DIMENSION


def cmd_render(cfg: dict, args) -> int:
    from .geometry import DiskTriple, GeometryError, RenderSpec, render_svg

    if not cfg["output"]:
        raise UsageError("render needs an output file (-o)")
    try:
        if args.triple:
            with open(args.triple, encoding="utf-8") as fh:
                tri = DiskTriple.from_json(fh.read())
        else:
            parse_curvatures(cfg["curvatures"])
            tri = DiskTriple.canonical([float(x) for x in str(cfg["curvatures"]).split(",")])
    except (GeometryError, KeyError, json.JSONDecodeError) as exc:
        raise UsageError(f"invalid triple: {exc}") from None
    spec = RenderSpec(cutoff=cfg["cutoff"], output=cfg["output"], description="config " + json.dumps(_echo(cfg, "render"), sort_keys=True, default=str))
    render_svg(tri, spec)
    return EXIT_OK


def cmd_count(cfg: dict, args) -> int:
    from .counting import count, count_curve, count_stream, decomposition_check
    import csv
    import io

    g = parse_curvatures(cfg["curvatures"])
    _threads(cfg)
    echo = _echo(cfg, "count")
    if args.curve:
        curve = count_curve(g, _d(cfg), cfg["lambda_max"], cfg["lambda_min"], cfg["per_decade"])
        _emit(curve.to_csv(header="config " + json.dumps(echo, sort_keys=True, default=str)), cfg["output"])
        return EXIT_OK
    if cfg["lambda"] is None:
        raise UsageError("count needs --lambda (or --curve)")
    if args.check_decomposition:
        try:
            rep = decomposition_check(g, cfg["lambda"])
        except AssertionError as exc:
            print(f"FAIL {exc}", file=sys.stderr)
            return EXIT_VERIFY
        _emit(rep.to_json(config=echo) + "\n", cfg["output"])
        return EXIT_OK if rep.passed else EXIT_VERIFY
    if args.stream:
        buf = io.StringIO()
        buf.write("# config " + json.dumps(echo, sort_keys=True, default=str) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["word", "curvature"])
        for rec in count_stream(g, cfg["lambda"], backend=cfg["backend"]):
            w.writerow([rec.word, rec.curvature])
        _emit(buf.getvalue(), cfg["output"])
        return EXIT_OK
    n = count(g, cfg["lambda"], backend=cfg["backend"], cap=cfg["cap"], threads=cfg["threads"])
    _emit(_dump({"config": echo, "count": n}), cfg["output"])
    return EXIT_OK


def cmd_dim(cfg: dict, args) -> int:
    from .dimension import estimate_dimension

    g = parse_curvatures(cfg["curvatures"])
    _threads(cfg)
    est = estimate_dimension(g, cfg["lambda_max"], cfg["per_decade"], cfg["lambda_min"])
    if args.csv:
        import numpy as np

        x = np.log(est.lambdas)
        y = np.log(est.counts)
        slope = np.gradient(y, x)
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write("g,lambda,count,normalized,local_slope\n")
            for lam, n, s in zip(est.lambdas, est.counts, slope):
                fh.write(f'"{g}",{lam!r},{int(n)},{float(n / lam ** est.d_hat)!r},{float(s)!r}\n')
    _emit(_dump({"config": _echo(cfg, "dim"), **est.summary()}), cfg["output"])
    return EXIT_OK if est.boyd_pass else EXIT_VERIFY


def cmd_measure(cfg: dict, args) -> int:
    from .dimension import MeasureEstimator, estimate_measure_ratio

    g = parse_curvatures(cfg["curvatures"])
    _threads(cfg)
    d = _d(cfg)
    out = {"config": _echo(cfg, "measure"), "d": d}
    if cfg["other"]:
        g2 = parse_curvatures(cfg["other"])
        lam = cfg["lambda"] or 1e5
        r = estimate_measure_ratio(g, g2, lam, d)
        out.update(ratio=r.ratio, lam=lam, counts=list(r.counts), max_deviation_last_decade=r.max_deviation)
    else:
        est = MeasureEstimator(d, cfg["lambda_eval"])
        out.update(h_rel=est.h(g), normalized=list(est.normalize(g).as_floats()), estimator=est.metadata())
    _emit(_dump(out), cfg["output"])
    return EXIT_OK


def cmd_chain(cfg: dict, args) -> int:
    from .chain import simulate, summary_json
    from .dimension import MeasureEstimator

    g = parse_curvatures(cfg["curvatures"])
    est = MeasureEstimator(_d(cfg), cfg["lambda_eval"])
    sim = simulate(
        g, cfg["steps"], cfg["paths"], cfg["seed"], est,
        n_max=cfg["n_max"], lambda_kernel=cfg["lambda_kernel"], cache=args.cache,
    )
    summary = summary_json(sim, config=_echo(cfg, "chain"))
    if cfg["output"]:
        prefix = cfg["output"]
        with open(prefix + "_paths.csv", "w", encoding="utf-8") as fh:
            fh.write("# config " + json.dumps(_echo(cfg, "chain"), sort_keys=True, default=str) + "\n")
            for i, p in enumerate(sim.paths):
                body = p.to_csv().splitlines()
                if i == 0:
                    fh.write("path," + body[0] + "\n")
                fh.writelines(f"{i},{line}\n" for line in body[1:])
        with open(prefix + "_summary.json", "w", encoding="utf-8") as fh:
            fh.write(summary + "\n")
    else:
        sys.stdout.write(summary + "\n")
    return EXIT_COMPUTE if sim.metadata["failures"] else EXIT_OK


def cmd_verify(cfg: dict, args) -> int:
    from .verify import run_checks

    results = run_checks(quick=args.quick)
    lines = [r.line() for r in results]
    _emit("\n".join(lines) + "\n", cfg["output"])
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value settings file (flags take precedence)")
    common.add_argument("--curvatures", help="alpha,beta,gamma of the seed triple; kappa is derived")
    common.add_argument("--backend", choices=["auto", "exact", "wide", "float"])
    common.add_argument("--d", type=float, help="dimension override (default: session value)")
    common.add_argument("--threads", type=int, help="cap on worker threads (default: all cores)")
    common.add_argument("--seed", type=int)
    common.add_argument("-o", "--output", help="output path (stdout when omitted, where allowed)")

    ap = argparse.ArgumentParser(prog="apollonian", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", parents=[common], help="SVG picture of the gasket")
    p.add_argument("--cutoff", type=float, help="largest curvature drawn")
    p.add_argument("--triple", help="JSON triple descriptor instead of --curvatures")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("count", parents=[common], help="N(g, lambda), curves, streams, decomposition")
    p.add_argument("--lambda", dest="lambda", type=float)
    p.add_argument("--curve", action="store_true", help="CSV of N on a geometric grid")
    p.add_argument("--lambda-max", dest="lambda_max", type=float)
    p.add_argument("--lambda-min", dest="lambda_min", type=float)
    p.add_argument("--per-decade", dest="per_decade", type=int)
    p.add_argument("--stream", action="store_true", help="CSV of (word, curvature) in curvature order")
    p.add_argument("--check-decomposition", action="store_true")
    p.add_argument("--cap", type=int, help="abort when the count exceeds this")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("dim", parents=[common], help="dimension estimate and bounds gate")
    p.add_argument("--lambda-max", dest="lambda_max", type=float)
    p.add_argument("--lambda-min", dest="lambda_min", type=float)
    p.add_argument("--per-decade", dest="per_decade", type=int)
    p.add_argument("--csv", help="also write the count curve with local slopes")
    p.set_defaults(func=cmd_dim)

    p = sub.add_parser("measure", parents=[common], help="relative measure or measure ratio")
    p.add_argument("--other", help="second triple: report N(g1)/N(g2) at --lambda")
    p.add_argument("--lambda", dest="lambda", type=float)
    p.add_argument("--lambda-eval", dest="lambda_eval", type=float)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("chain", parents=[common], help="simulate the renewal chain")
    p.add_argument("--steps", type=int)
    p.add_argument("--paths", type=int)
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--lambda-kernel", dest="lambda_kernel", type=float)
    p.add_argument("--lambda-eval", dest="lambda_eval", type=float)
    p.add_argument("--cache", action="store_true", help="memoise kernels on a 1e-3 grid")
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("verify", parents=[common], help="exact identity suite")
    p.add_argument("--quick", action="store_true", help="skip the dimension gate")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on bad flags
    try:
        cfg = resolve(args)
        return args.func(cfg, args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - surfaced as a computation failure
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        if os.environ.get("APOLLONIAN_DEBUG"):
            raise
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
