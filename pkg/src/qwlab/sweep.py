"""Parameter sweeps over bulk angles and boundary amplitudes.

A sweep config is a run config plus a ``grid`` object whose keys name axes
and whose values are either explicit lists or ``{"start", "stop", "num"}``
(``endpoint`` optional, default false)::

    "grid": {"sigma": {"start": 0, "stop": 6.283185307179586, "num": 10},
             "delta_arg": [0.0, 1.5]}

Axes:

``sigma`` / ``sigma_plus`` / ``sigma_minus``
    bulk coin angle on both sides / one side
``delta_arg``
    bulk determinant angle on both sides
``boundary_angle``, ``boundary_phase``
    ``alpha = cos(t)``, ``beta = sin(t) e^{i p}``
``gamma``
    real stay-put amplitude (thm3)

Rows are the Cartesian product in the order the axes are listed.  Random
origin coins get one seed per row, derived from the config seed, so output is
independent of the thread count.
"""

from __future__ import annotations

import copy
import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .config import parse_config
from .errors import ParseError
from .io import fmt
from .runs import build_stationary, empirical_branches, verify

AXES = ("sigma", "sigma_plus", "sigma_minus", "delta_arg", "boundary_angle", "boundary_phase", "gamma")
BASE_COLUMNS = [
    "lambda_re",
    "lambda_im",
    "residual",
    "stationarity_deviation",
    "left",
    "origin",
    "right",
    "empirical_deviation",
]


def axis_values(spec) -> list[float]:
    if isinstance(spec, list):
        return [float(v) for v in spec]
    if isinstance(spec, dict):
        try:
            num = int(spec["num"])
            vals = np.linspace(
                float(spec["start"]), float(spec["stop"]), num, endpoint=bool(spec.get("endpoint", False))
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad axis range {spec!r}: {exc}") from exc
        return vals.tolist()
    raise ParseError(f"axis must be a list or a range object, got {spec!r}")


def grid_points(grid: dict) -> tuple[list[str], list[tuple[float, ...]]]:
    for name in grid:
        if name not in AXES:
            raise ParseError(f"unknown sweep axis {name!r}; known: {', '.join(AXES)}")
    names = list(grid)
    if not names:
        return names, []
    return names, list(itertools.product(*(axis_values(grid[n]) for n in names)))


def _row_config(raw: dict, names, point, row_seed: int) -> dict:
    obj = copy.deepcopy(raw)
    obj.pop("grid", None)
    obj["seed"] = row_seed
    coins = obj["coins"]
    values = dict(zip(names, point))
    homogeneous = obj.get("model") == "thm3"

    def set_bulk(keys, field, v):
        for k in keys:
            c = coins.get(k)
            if isinstance(c, dict) and "sigma" in c:
                c[field] = v

    both = ("minus", "plus", "bulk") + (("origin",) if homogeneous else ())
    if "sigma" in values:
        set_bulk(both, "sigma", values["sigma"])
    if "sigma_plus" in values:
        set_bulk(("plus",), "sigma", values["sigma_plus"])
    if "sigma_minus" in values:
        set_bulk(("minus",), "sigma", values["sigma_minus"])
    if "delta_arg" in values:
        set_bulk(both, "delta_arg", values["delta_arg"])
    b = obj.setdefault("boundary", {})
    if "boundary_angle" in values or "boundary_phase" in values:
        t = values.get("boundary_angle", 0.0)
        p = values.get("boundary_phase", 0.0)
        b["alpha"] = [math.cos(t), 0.0]
        b["beta"] = [math.sin(t) * math.cos(p), math.sin(t) * math.sin(p)]
    if "gamma" in values:
        b["gamma"] = [values["gamma"], 0.0]
    return obj


def _run_row(raw, names, point, row_seed):
    cfg = parse_config(_row_config(raw, names, point, row_seed))
    run = build_stationary(cfg)
    ver = verify(cfg, run.state)
    emp = empirical_branches(run.state)
    pw = run.piecewise.as_tuple()
    vals = [
        run.lam.real,
        run.lam.imag,
        run.residual,
        ver.stationarity.max_deviation,
        *pw,
        max(abs(e - p) for e, p in zip(emp, pw)),
    ]
    if run.diagnosis is not None:
        vals.append(run.diagnosis.max_deviation)
    return vals


def run_sweep(raw: dict, out_dir, threads: int | None = None) -> Path:
    """Write ``sweep.csv`` into ``out_dir`` and return its path."""
    if "grid" not in raw:
        raise ParseError("sweep config needs a 'grid' object")
    parse_config({k: v for k, v in raw.items() if k != "grid"})  # fail fast on a bad base config
    names, points = grid_points(raw["grid"])
    seeds = np.random.SeedSequence(int(raw.get("seed", 0))).generate_state(len(points), dtype=np.uint32)
    if threads is None:
        threads = int(os.environ.get("QWLAB_THREADS", "1") or 1)
    columns = ["index", *names, "seed", *BASE_COLUMNS]
    if raw.get("model") == "thm2":
        columns.append("printed_max_deviation")

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "sweep.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh, ThreadPoolExecutor(max(1, threads)) as pool:
        fh.write(",".join(columns) + "\n")
        fh.flush()
        jobs = pool.map(lambda i: _run_row(raw, names, points[i], int(seeds[i])), range(len(points)))
        for i, vals in enumerate(jobs):
            cells = [str(i), *(fmt(v) for v in points[i]), str(int(seeds[i])), *(fmt(v) for v in vals)]
            fh.write(",".join(cells) + "\n")
            fh.flush()
    return path
