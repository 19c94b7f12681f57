"""JSON run configuration shared by all CLI subcommands.

Example::

    {
      "model": "thm1",
      "coins": {
        "minus":  {"sigma": 0.3, "delta_arg": 1.0},
        "origin": {"a": [0.6, 0], "b": [0, 0.8], "delta_arg": 0.5},
        "plus":   {"sigma": 1.1, "delta_arg": 1.0}
      },
      "boundary": {"alpha": [1, 0], "beta": [0, 0], "gamma": "solve"},
      "initial_state": {"sites": [{"x": 0, "amplitudes": [[1, 0], [0, 0]]}]},
      "M": 50, "t_max": 20, "tol": 1e-10, "branch": "plus", "seed": 0
    }

``"coins": {"bulk": {...}}`` puts one coin everywhere (homogeneous walk).
Origin coins may be ``{"random": true}``, drawn from ``seed``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Optional

from .coin import CoinFamily, build_family, random_unitary
from .core import WaveState, shift_offsets
from .errors import ParseError
from .io import coin_from_json, complex_from_json

MODELS = {"thm1": 2, "thm2": 3, "thm3": 3}
DEFAULT_M = 50
DEFAULT_T_MAX = 20
DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class RunConfig:
    model: Optional[str]
    family: CoinFamily
    alpha: complex = 1.0
    beta: complex = 0.0
    gamma: Any = "solve"
    initial_state: Optional[WaveState] = None
    M: int = DEFAULT_M
    t_max: int = DEFAULT_T_MAX
    tol: float = DEFAULT_TOL
    t: int = 0
    branch: str = "plus"
    seed: int = 0
    raw: Optional[dict] = None

    def override(self, **kwargs) -> "RunConfig":
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


def load_json(path) -> dict:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ParseError(f"{path}: top level must be an object")
    return obj


def _int(obj: dict, key: str, default: int) -> int:
    v = obj.get(key, default)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError(f"{key} must be an integer, got {v!r}")
    return v


def parse_family(coins: dict, n: int, seed: int = 0) -> CoinFamily:
    if not isinstance(coins, dict):
        raise ParseError("coins must be an object")

    def one(key):
        obj = coins.get(key, coins.get("bulk"))
        if obj is None:
            raise ParseError(f"coins.{key} missing (and no coins.bulk)")
        if isinstance(obj, dict) and obj.get("random"):
            return random_unitary(n, seed)
        return coin_from_json(obj, n)

    minus, origin, plus = one("minus"), one("origin"), one("plus")
    if origin.n != n:
        raise ParseError(f"origin coin is {origin.n}x{origin.n}, model needs n={n}")
    return build_family(minus, origin, plus)


def parse_initial_state(obj: dict, n: int) -> WaveState:
    try:
        sites = {}
        for entry in obj["sites"]:
            vec = [complex_from_json(v) for v in entry["amplitudes"]]
            if len(vec) != n:
                raise ParseError(f"site {entry['x']} has {len(vec)} amplitudes, expected {n}")
            sites[int(entry["x"])] = vec
        window = obj.get("window")
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed initial_state: {exc}") from exc
    return WaveState.from_sites(shift_offsets(n), sites, tuple(window) if window else None)


def parse_config(obj: dict) -> RunConfig:
    model = obj.get("model")
    if model is not None and model not in MODELS:
        raise ParseError(f"model must be one of {sorted(MODELS)}, got {model!r}")
    n = _int(obj, "n", MODELS.get(model, 2))
    if model is not None and n != MODELS[model]:
        raise ParseError(f"model {model} is a {MODELS[model]}-state walk, config says n={n}")
    seed = _int(obj, "seed", 0)
    if "coins" not in obj:
        raise ParseError("config needs a 'coins' object")
    family = parse_family(obj["coins"], n, seed)

    b = obj.get("boundary", {})
    gamma = b.get("gamma", "solve")
    if gamma != "solve":
        gamma = complex_from_json(gamma)
    branch = obj.get("branch", "plus")
    if branch not in ("plus", "minus"):
        raise ParseError(f"branch must be 'plus' or 'minus', got {branch!r}")
    init = parse_initial_state(obj["initial_state"], n) if "initial_state" in obj else None
    try:
        tol = float(obj.get("tol", DEFAULT_TOL))
    except (TypeError, ValueError) as exc:
        raise ParseError(f"tol: {exc}") from exc
    return RunConfig(
        model=model,
        family=family,
        alpha=complex_from_json(b.get("alpha", [1.0, 0.0])),
        beta=complex_from_json(b.get("beta", [0.0, 0.0])),
        gamma=gamma,
        initial_state=init,
        M=_int(obj, "M", DEFAULT_M),
        t_max=_int(obj, "t_max", DEFAULT_T_MAX),
        tol=tol,
        t=_int(obj, "t", 0),
        branch=branch,
        seed=seed,
        raw=obj,
    )


def load_config(path) -> RunConfig:
    return parse_config(load_json(path))
