"""CSV and JSON formats.

Floats are written with 17 significant digits so that a write/read round trip
reproduces every double exactly.  Complex numbers in JSON are ``[re, im]``.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import IO, Union

import numpy as np

from .coin import CoinMatrix, Defect2Params, Diag2Params, Diag3Params, build_defect2, build_diag2, build_diag3
from .core import ChiralitySpec, MeasureProfile, WaveState, shift_offsets
from .eigen import EigenSolution
from .errors import ParseError

PathLike = Union[str, Path]


def fmt(v: float) -> str:
    return format(float(v), ".17g")


def complex_to_json(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(v) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(
        isinstance(p, (int, float)) and not isinstance(p, bool) for p in v
    ):
        return complex(v[0], v[1])
    raise ParseError(f"expected a complex number as [re, im], got {v!r}")


def _open_write(target):
    if hasattr(target, "write"):
        return target, False
    return open(target, "w", newline="", encoding="utf-8"), True


def write_measure_csv(profile: MeasureProfile, target: Union[PathLike, IO[str]]) -> None:
    fh, close = _open_write(target)
    try:
        fh.write("x,mu\n")
        for x, mu in profile:
            fh.write(f"{x},{fmt(mu)}\n")
    finally:
        if close:
            fh.close()


def read_measure_csv(source: Union[PathLike, IO[str]]) -> MeasureProfile:
    rows = _read_rows(source, ["x", "mu"])
    try:
        xs = [int(r[0]) for r in rows]
        mus = [float(r[1]) for r in rows]
    except (IndexError, ValueError) as exc:
        raise ParseError(f"bad measure row: {exc}") from exc
    _check_contiguous(xs)
    return MeasureProfile(xs[0], mus)


def state_header(n: int) -> list[str]:
    cols = ["x"]
    for j in range(1, n + 1):
        cols += [f"re_{j}", f"im_{j}"]
    return cols


def write_state_csv(state: WaveState, target: Union[PathLike, IO[str]]) -> None:
    fh, close = _open_write(target)
    try:
        fh.write(",".join(state_header(state.spec.n)) + "\n")
        for x, vec in zip(state.sites().tolist(), state.amplitudes):
            parts = [str(x)]
            for z in vec:
                parts += [fmt(z.real), fmt(z.imag)]
            fh.write(",".join(parts) + "\n")
    finally:
        if close:
            fh.close()


def read_state_csv(source: Union[PathLike, IO[str]], spec: ChiralitySpec | None = None) -> WaveState:
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text(encoding="utf-8")
    header = text.splitlines()[0].split(",") if text else []
    if len(header) < 3 or (len(header) - 1) % 2:
        raise ParseError(f"bad state CSV header: {header}")
    n = (len(header) - 1) // 2
    rows = _read_rows(io.StringIO(text), state_header(n))
    try:
        xs = [int(r[0]) for r in rows]
        vals = np.array([[float(v) for v in r[1:]] for r in rows])
    except ValueError as exc:
        raise ParseError(f"bad state row: {exc}") from exc
    if vals.shape != (len(rows), 2 * n):
        raise ParseError(f"every state row needs {2 * n + 1} fields")
    _check_contiguous(xs)
    amp = vals[:, 0::2] + 1j * vals[:, 1::2]
    return WaveState(spec or shift_offsets(n), xs[0], amp)


def _read_rows(source, expected_header: list[str]) -> list[list[str]]:
    if hasattr(source, "read"):
        reader = csv.reader(source)
        rows = list(reader)
    else:
        with open(source, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    if not rows or rows[0] != expected_header:
        raise ParseError(f"expected header {expected_header}, got {rows[0] if rows else None}")
    body = rows[1:]
    if not body:
        raise ParseError("CSV has no data rows")
    return body


def _check_contiguous(xs: list[int]) -> None:
    if xs != list(range(xs[0], xs[0] + len(xs))):
        raise ParseError("sites must be consecutive and ascending")


def coin_from_json(obj, n: int | None = None) -> CoinMatrix:
    """Parse a coin object.

    ``{"sigma", "delta_arg"}`` is a diagonal coin (2- or 3-state, from ``n``),
    ``{"a", "b", "delta_arg"}`` a parameterised 2x2 defect and ``{"entries"}``
    a general matrix of ``[re, im]`` pairs.
    """
    if not isinstance(obj, dict):
        raise ParseError(f"coin must be an object, got {obj!r}")
    try:
        if "entries" in obj:
            rows = obj["entries"]
            m = np.array([[complex_from_json(v) for v in row] for row in rows])
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise ParseError(f"coin entries must be square, got shape {m.shape}")
            return CoinMatrix(m)
        if "a" in obj:
            return build_defect2(
                Defect2Params(complex_from_json(obj["a"]), complex_from_json(obj["b"]), float(obj["delta_arg"]))
            )
        if "sigma" in obj:
            sigma, delta_arg = float(obj["sigma"]), float(obj["delta_arg"])
            if n == 3:
                return build_diag3(Diag3Params(sigma, delta_arg))
            if n in (None, 2):
                return build_diag2(Diag2Params(sigma, delta_arg))
            raise ParseError(f"diagonal coins exist for n=2 and n=3 only, got n={n}")
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed coin {obj!r}: {exc}") from exc
    raise ParseError(f"unrecognised coin object with keys {sorted(obj)}")


def coin_to_json(coin: CoinMatrix) -> dict:
    p = coin.params
    if isinstance(p, (Diag2Params, Diag3Params)):
        return {"sigma": p.sigma, "delta_arg": p.delta_arg}
    if isinstance(p, Defect2Params):
        return {"a": complex_to_json(p.a), "b": complex_to_json(p.b), "delta_arg": p.delta_arg}
    return {"entries": [[complex_to_json(z) for z in row] for row in coin.entries]}


def eigen_solution_to_json(sol: EigenSolution) -> dict:
    return {
        "lambda": complex_to_json(sol.lam),
        "alpha": complex_to_json(sol.boundary.alpha),
        "beta": complex_to_json(sol.boundary.beta),
        "gamma": complex_to_json(sol.boundary.gamma),
        "residual": sol.residual,
    }


def write_json(obj, path: PathLike) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")
