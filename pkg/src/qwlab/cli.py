"""``qwlab`` command line.

Exit codes: 0 ok, 1 other error, 2 unparsable config, 3 non-unitary coin,
4 incompatible bulk coins (no admissible eigenvalue), 5 verification failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .config import load_json, parse_config
from .core import l2_norm, measure_of
from .errors import (
    IncompatibleDeterminants,
    IncompatiblePhases,
    NonUnitary,
    NotDiagonal,
    NotNormalized,
    ParseError,
    QwlabError,
)
from .evolve import evolve
from .io import eigen_solution_to_json, read_state_csv, write_json, write_measure_csv, write_state_csv
from .runs import admissible, build_stationary, verify
from .sweep import run_sweep

EXIT_OK, EXIT_ERROR, EXIT_PARSE, EXIT_UNITARY, EXIT_INCOMPATIBLE, EXIT_VERIFY = 0, 1, 2, 3, 4, 5


def _c(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _load(args):
    raw = load_json(args.config)
    if getattr(args, "seed", None) is not None:
        raw["seed"] = args.seed
    if getattr(args, "model", None):
        raw["model"] = args.model
    cfg = parse_config(raw)
    cfg = cfg.override(
        M=getattr(args, "M", None),
        t=getattr(args, "t", None),
        t_max=getattr(args, "t_max", None),
        tol=getattr(args, "tol", None),
        branch=getattr(args, "branch", None),
    )
    return raw, cfg


def _out_dir(args) -> Path:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_validate(args) -> int:
    _, cfg = _load(args)
    report = {"n": cfg.family.n, "model": cfg.model, "unitary": True}
    try:
        report["admissible_lambda"] = [_c(lam) for lam in admissible(cfg)]
    except NotDiagonal as exc:
        report["admissible_lambda"] = None
        report["note"] = str(exc)
    print(json.dumps(report))
    return EXIT_OK


def cmd_evolve(args) -> int:
    _, cfg = _load(args)
    if cfg.initial_state is None:
        raise ParseError("evolve needs an 'initial_state' in the config")
    out = _out_dir(args)
    final = evolve(cfg.initial_state, cfg.family, cfg.t)
    write_state_csv(final, out / f"state_t{cfg.t}.csv")
    write_measure_csv(measure_of(final), out / f"measure_t{cfg.t}.csv")
    drift = abs(l2_norm(final) - l2_norm(cfg.initial_state))
    print(json.dumps({"t": cfg.t, "window": list(final.window), "norm_drift": drift}))
    return EXIT_OK


def cmd_stationary(args) -> int:
    _, cfg = _load(args)
    run = build_stationary(cfg)
    out = _out_dir(args)
    write_state_csv(run.state, out / "state.csv")
    write_measure_csv(measure_of(run.state), out / "measure.csv")
    piecewise = {
        "model": run.model,
        "lambda": _c(run.lam),
        "left": run.piecewise.left,
        "origin": run.piecewise.origin,
        "right": run.piecewise.right,
        "residual": run.residual,
    }
    write_json(piecewise, out / "piecewise.json")
    if run.solution is not None:
        write_json(eigen_solution_to_json(run.solution), out / "solution.json")
    if run.diagnosis is not None:
        write_json(run.diagnosis.to_json(), out / "diagnostic.json")
    if run.trace is not None:
        write_json(run.trace, out / "sgf_trace.json")
    if args.explain:
        if run.trace is None:
            raise ParseError("--explain is available for thm1 only")
        print(json.dumps(run.trace, indent=2))
    else:
        print(json.dumps(piecewise))
    return EXIT_OK


def cmd_verify(args) -> int:
    _, cfg = _load(args)
    state = read_state_csv(args.state, cfg.family.spec) if args.state else None
    result = verify(cfg, state)
    report = result.to_json()
    if args.out:
        write_json(report, _out_dir(args) / "verify.json")
    print(json.dumps(report))
    return EXIT_OK if result.passed else EXIT_VERIFY


def cmd_sweep(args) -> int:
    raw = load_json(args.config)
    if args.seed is not None:
        raw["seed"] = args.seed
    for key in ("M", "t_max", "tol"):
        v = getattr(args, key, None)
        if v is not None:
            raw[key] = v
    path = run_sweep(raw, _out_dir(args))
    print(str(path))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qwlab", description="Stationary measures of one-defect diagonal quantum walks.")
    ap.add_argument("--version", action="version", version=f"qwlab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, *extra):
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int, help="seed for random defect coins")
        if "model" in extra:
            p.add_argument("--model", choices=["thm1", "thm2", "thm3"])
        if "branch" in extra:
            p.add_argument("--branch", choices=["plus", "minus"], help="sign of the admissible eigenvalue")
        if "M" in extra:
            p.add_argument("--M", type=int, help="half-width of the constructed window")
        if "t" in extra:
            p.add_argument("--t", type=int, help="number of time steps")
        if "t_max" in extra:
            p.add_argument("--t-max", dest="t_max", type=int, help="stationarity horizon")
        if "tol" in extra:
            p.add_argument("--tol", type=float, help="pass tolerance")
        return p

    p = common(sub.add_parser("validate", help="check coins and print admissible eigenvalues"), "model")
    p.set_defaults(func=cmd_validate)
    p = common(sub.add_parser("evolve", help="evolve the configured initial state"), "t")
    p.set_defaults(func=cmd_evolve)
    p = common(sub.add_parser("stationary", help="construct a stationary state"), "model", "branch", "M")
    p.add_argument("--explain", action="store_true", help="print the SGF derivation trace (thm1)")
    p.set_defaults(func=cmd_stationary)
    p = common(
        sub.add_parser("verify", help="certify stationarity and eigen-relations"),
        "model", "branch", "M", "t_max", "tol",
    )
    p.add_argument("--state", help="state CSV to verify instead of the constructed one")
    p.set_defaults(func=cmd_verify)
    p = common(sub.add_parser("sweep", help="grid sweep to a summary CSV"), "M", "t_max", "tol")
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (NonUnitary, NotNormalized) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNITARY
    except (IncompatibleDeterminants, IncompatiblePhases) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INCOMPATIBLE
    except QwlabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
