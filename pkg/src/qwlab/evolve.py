"""Exact time evolution of a truncated state and the finite-horizon stationarity test.

One step applies, at every site, the coin of that site and then moves
chirality ``j`` by ``spec.offsets[j]``.  Equivalently component ``j`` of the
new amplitude at ``x`` is row ``j`` of the coin at the source site
``x - offsets[j]`` applied to the old amplitude there.  The window grows by
``s_max`` on each side so nothing is ever lost or wrapped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coin import CoinFamily
from .core import ChiralitySpec, Interval, WaveState, measure_of
from .errors import SpecMismatch, WindowTooSmall

DEFAULT_T_MAX = 20
DEFAULT_TOL = 1e-10


def apply_step(amp: np.ndarray, xmin: int, family: CoinFamily) -> np.ndarray:
    spec = family.spec
    s = spec.s_max
    w = amp.shape[0]
    coins = family.coins_for(xmin, xmin + w - 1)
    moved = np.einsum("xij,xj->xi", coins, amp)
    out = np.zeros((w + 2 * s, spec.n), dtype=np.complex128)
    for j, off in enumerate(spec.offsets):
        out[s + off : s + off + w, j] = moved[:, j]
    return out


def step(state: WaveState, family: CoinFamily) -> WaveState:
    if state.spec != family.spec:
        raise SpecMismatch(f"state has {state.spec}, family has {family.spec}")
    s = family.spec.s_max
    return WaveState(state.spec, state.xmin - s, apply_step(state.amplitudes, state.xmin, family))


def evolve(state: WaveState, family: CoinFamily, t: int) -> WaveState:
    if t < 0:
        raise ValueError("t must be non-negative")
    if state.spec != family.spec:
        raise SpecMismatch(f"state has {state.spec}, family has {family.spec}")
    amp, xmin, s = state.amplitudes, state.xmin, family.spec.s_max
    for _ in range(t):
        amp = apply_step(amp, xmin, family)
        xmin -= s
    if t == 0:
        return state
    return WaveState(state.spec, xmin, amp)


def valid_interior(window: tuple[int, int], t: int, spec: ChiralitySpec) -> Interval:
    """Sites of ``window`` whose value after ``t`` steps is unaffected by the truncation."""
    lo, hi = window
    d = t * spec.s_max
    return Interval(lo + d, hi - d)


@dataclass(frozen=True)
class StationarityReport:
    deviations: tuple[float, ...]  # index t-1 holds the max deviation at time t
    interiors: tuple[Interval, ...]
    tol: float

    @property
    def max_deviation(self) -> float:
        return max(self.deviations, default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tol

    @property
    def first_failure(self) -> int | None:
        for t, d in enumerate(self.deviations, start=1):
            if d > self.tol:
                return t
        return None


def measure_stationarity_check(
    state: WaveState,
    family: CoinFamily,
    t_max: int = DEFAULT_T_MAX,
    tol: float = DEFAULT_TOL,
) -> StationarityReport:
    """Compare the measure at times ``1..t_max`` with the initial one on each valid interior.

    A pass certifies stationarity only up to ``t_max`` and only on the sites
    the truncated window can speak for.
    """
    if t_max < 1:
        raise ValueError("t_max must be positive")
    if valid_interior(state.window, t_max, state.spec).empty:
        raise WindowTooSmall(
            f"window {tuple(state.window)} has no valid interior after {t_max} steps"
        )
    if state.spec != family.spec:
        raise SpecMismatch(f"state has {state.spec}, family has {family.spec}")
    mu0 = measure_of(state)
    amp, xmin, s = state.amplitudes, state.xmin, family.spec.s_max
    devs, interiors = [], []
    for t in range(1, t_max + 1):
        amp = apply_step(amp, xmin, family)
        xmin -= s
        inner = valid_interior(state.window, t, state.spec)
        cur = amp[inner.lo - xmin : inner.hi - xmin + 1]
        mu_t = (cur.real**2 + cur.imag**2).sum(axis=1)
        devs.append(float(np.max(np.abs(mu_t - mu0.restrict(inner)))))
        interiors.append(inner)
    return StationarityReport(tuple(devs), tuple(interiors), tol)
