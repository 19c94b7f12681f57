"""Splitted generating functions for the 2-state one-defect walk.

On each half-line the eigen-relations turn into a diagonal 2x2 linear system
``A(z) f(z) = a(z)`` for the one-sided generating functions
``f_+(z) = sum_{x>=1} Psi(x) z^x`` and ``f_-(z) = sum_{x<=-1} Psi(x) z^x``.
Every entry of ``A`` is ``lam - kappa z^s`` with ``s = -1`` (left-mover) or
``s = +1`` (right-mover) and every entry of ``a`` is a monomial, so each
component is a single-pole rational function whose expansion is geometric.
Series are carried as (first index, leading coefficient, ratio).

The determinant of ``A`` is, up to a prefactor, a quadratic in ``z`` whose
roots ``theta_s, theta_l`` are ordered by modulus.  One root is cancelled by
the numerator of each component; the other is the pole that sets the ratio.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .coin import CoinFamily, Diag2Params
from .core import WaveState
from .eigen import require_admissible, admissible_lambda2, diag2_params_of

Side = Literal["plus", "minus"]
ROOT_TOL = 1e-10


@dataclass(frozen=True)
class Laurent:
    """``lam - kappa z^power`` with ``power`` in {-1, +1}."""

    lam: complex
    kappa: complex
    power: int

    def __call__(self, z):
        return self.lam - self.kappa * z**self.power

    def zero(self) -> complex:
        # lam = kappa z^power
        return self.lam / self.kappa if self.power == 1 else self.kappa / self.lam


@dataclass(frozen=True)
class Monomial:
    coeff: complex
    power: int

    def __call__(self, z):
        return self.coeff * z**self.power


@dataclass(frozen=True)
class SgfSystem:
    """Diagonal system ``diag(A_L, A_R) f = (a_L, a_R)`` on one half-line."""

    side: Side
    lam: complex
    sigma: float
    delta: complex
    alpha: complex
    beta: complex
    A: tuple[Laurent, Laurent]
    rhs: tuple[Monomial, Monomial]

    def matrix(self, z: complex) -> np.ndarray:
        return np.diag([self.A[0](z), self.A[1](z)])

    def rhs_at(self, z: complex) -> np.ndarray:
        return np.array([self.rhs[0](z), self.rhs[1](z)])


@dataclass(frozen=True)
class ThetaRoots:
    theta_s: complex
    theta_l: complex


@dataclass(frozen=True)
class GeometricSeries:
    """Coefficients ``lead * ratio**m`` at ``x = start + direction * m``, ``m >= 0``."""

    start: int
    lead: complex
    ratio: complex
    direction: int

    def coefficient(self, x):
        m = (np.asarray(x) - self.start) * self.direction
        return self.lead * np.power(self.ratio, m)

    def iterate(self, count: int) -> np.ndarray:
        out = np.empty(count, dtype=np.complex128)
        v = self.lead
        for m in range(count):
            out[m] = v
            v = v * self.ratio
        return out


@dataclass(frozen=True)
class ComponentSolution:
    side: Side
    component: Literal["L", "R"]
    series: GeometricSeries
    pole: complex
    cancelled: complex
    roots: ThetaRoots


def build_system(
    params: Diag2Params,
    defect: np.ndarray,
    lam: complex,
    alpha: complex,
    beta: complex,
    side: Side,
) -> SgfSystem:
    (a, b), (c, d) = np.asarray(getattr(defect, "entries", defect))
    e = cmath.exp(1j * params.sigma)
    A = (Laurent(lam, e, -1), Laurent(lam, params.delta / e, 1))
    if side == "plus":
        rhs = (Monomial(-lam * alpha, 0), Monomial(c * alpha + d * beta, 1))
    elif side == "minus":
        rhs = (Monomial(a * alpha + b * beta, -1), Monomial(-lam * beta, 0))
    else:
        raise ValueError(f"side must be 'plus' or 'minus', got {side!r}")
    return SgfSystem(side, complex(lam), params.sigma, params.delta, alpha, beta, A, rhs)


def det_coefficients(lam, sigma, delta):
    """``(p, q)`` of ``z^2 + p z + q``, the monic factor of ``det A``; broadcasts over arrays."""
    e = np.exp(1j * np.asarray(sigma))
    p = -(e / (lam * delta)) * (lam**2 + delta)
    q = e**2 / delta
    return p, q


def det_quadratic(system: SgfSystem) -> tuple[complex, complex]:
    """Monic quadratic of ``det A`` obtained by multiplying out the two diagonal entries.

    ``(lam - k1/z)(lam - k2 z) = -(lam k2 / z) (z^2 - (lam^2 + k1 k2)/(lam k2) z + k1/k2)``.
    """
    lam = system.lam
    k1, k2 = system.A[0].kappa, system.A[1].kappa
    return -(lam**2 + k1 * k2) / (lam * k2), k1 / k2


def det_prefactor(system: SgfSystem, z: complex) -> complex:
    return -system.lam * system.A[1].kappa / z


def theta_roots(p, q, prefer=None, tol: float = ROOT_TOL) -> ThetaRoots:
    """Roots of ``z^2 + p z + q`` with ``|theta_s| <= |theta_l|``.

    When ``prefer`` is (numerically) a root it becomes ``theta_s`` and its
    partner is taken as ``q / prefer``, unless that would break the modulus
    ordering by more than ``tol``.  This resolves the double-root tie at the
    admissible eigenvalues, where the quadratic formula alone only locates
    the roots to about the square root of machine precision.  Accepts arrays.
    """
    p = np.asarray(p, dtype=np.complex128)
    q = np.asarray(q, dtype=np.complex128)
    disc = np.sqrt(p * p - 4 * q)
    disc = np.where((np.conj(p) * disc).real < 0, -disc, disc)
    big = -(p + disc) / 2
    with np.errstate(divide="ignore", invalid="ignore"):
        small = np.where(big == 0, 0, q / big)
    swap = np.abs(small) > np.abs(big)
    ts = np.where(swap, big, small)
    tl = np.where(swap, small, big)
    if prefer is not None:
        pr = np.asarray(prefer, dtype=np.complex128)
        is_root = np.abs(pr * pr + p * pr + q) <= tol * np.maximum(1.0, np.abs(pr) ** 2)
        with np.errstate(divide="ignore", invalid="ignore"):
            partner = q / pr
        use = is_root & (np.abs(pr) <= np.abs(partner) + tol)
        ts = np.where(use, pr, ts)
        tl = np.where(use, partner, tl)
    if ts.ndim == 0:
        ts, tl = complex(ts), complex(tl)
        # np.abs and abs can differ in the last bit on tied moduli; keep the
        # ordering true for the scalar the caller will actually compare
        if prefer is None and abs(ts) > abs(tl):
            ts, tl = tl, ts
        return ThetaRoots(ts, tl)
    return ThetaRoots(ts, tl)


def _expand(side: Side, A: Laurent, rhs: Monomial) -> GeometricSeries:
    # f = r z^k / (lam - kappa z^s)
    lam, kappa, s = A.lam, A.kappa, A.power
    r, k = rhs.coeff, rhs.power
    if side == "plus":
        if s == 1:
            return GeometricSeries(k, r / lam, kappa / lam, 1)
        return GeometricSeries(k + 1, -r / kappa, lam / kappa, 1)
    if s == -1:
        return GeometricSeries(k, r / lam, kappa / lam, -1)
    return GeometricSeries(k - 1, -r / kappa, lam / kappa, -1)


def solve_component(system: SgfSystem, component: Literal["L", "R"]) -> ComponentSolution:
    """Expand one generating function and name its roots.

    On the plus side the series lives inside the unit disc, so the surviving
    pole is ``theta_l`` and the cancelled root is ``theta_s``; on the minus
    side (a series in ``1/z``) the roles swap.
    """
    j = 0 if component == "L" else 1
    series = _expand(system.side, system.A[j], system.rhs[j])
    expected_start = 1 if system.side == "plus" else -1
    if series.start != expected_start:
        raise AssertionError(f"series for {system.side}/{component} starts at {series.start}")
    p, q = det_quadratic(system)
    pole = system.A[j].zero()
    # the numerator carries the other diagonal entry, whose zero is cancelled
    cancelled = system.A[1 - j].zero()
    if system.side == "plus":
        roots = theta_roots(p, q, prefer=cancelled)
    else:
        roots = theta_roots(p, q, prefer=pole)
    return ComponentSolution(system.side, component, series, pole, cancelled, roots)


def closed_form_theta_s(side: Side, component: Literal["L", "R"], lam, sigma, delta):
    """Closed-form ``theta_s`` of each component: the det root its numerator cancels (plus side) or its pole (minus side)."""
    e = np.exp(1j * np.asarray(sigma))
    if side == "plus":
        return lam * e / delta if component == "L" else e / lam
    return e / lam if component == "L" else lam * e / delta


def _family_parts(family: CoinFamily):
    return diag2_params_of(family.plus), diag2_params_of(family.minus), family.origin.entries


def sgf_state2(family: CoinFamily, lam: complex, alpha: complex, beta: complex, M: int) -> WaveState:
    """Eigenstate on ``[-M, M]`` read off the expanded generating functions."""
    plus, minus, u0 = _family_parts(family)
    amp = np.zeros((2 * M + 1, 2), dtype=np.complex128)
    amp[M] = (alpha, beta)
    xs_plus = np.arange(1, M + 1)
    xs_minus = np.arange(-1, -M - 1, -1)
    for params, side, xs in ((plus, "plus", xs_plus), (minus, "minus", xs_minus)):
        system = build_system(params, u0, lam, alpha, beta, side)
        for j, comp in enumerate("LR"):
            sol = solve_component(system, comp)
            amp[xs + M, j] = sol.series.coefficient(xs)
    return WaveState(family.spec, -M, amp)


def closed_form_state2(family: CoinFamily, lam: complex, alpha: complex, beta: complex, M: int) -> WaveState:
    """Evaluate the piecewise eigenstate formula with each component's ``theta_s``.

    For ``x >= 1``:  ``(alpha r^x, Delta^{-1} (c alpha + d beta) e^{i sigma} r'^x)`` with
    ``r = Delta e^{-2 i sigma} theta_s``; for ``x <= -1``:
    ``((a alpha + b beta) e^{-i sigma} theta_s^{|x|}, beta theta_s^{|x|})``.
    """
    lam = require_admissible(lam, lambda: admissible_lambda2(family))
    plus, minus, u0 = _family_parts(family)
    (a, b), (c, d) = u0

    def theta_s(params, side, comp):
        p, q = det_coefficients(lam, params.sigma, params.delta)
        return theta_roots(p, q, prefer=closed_form_theta_s(side, comp, lam, params.sigma, params.delta)).theta_s

    amp = np.zeros((2 * M + 1, 2), dtype=np.complex128)
    amp[M] = (alpha, beta)
    x = np.arange(1, M + 1)
    ep, dp = cmath.exp(1j * plus.sigma), plus.delta
    rl = dp / ep**2 * theta_s(plus, "plus", "L")
    rr = dp / ep**2 * theta_s(plus, "plus", "R")
    amp[M + x, 0] = alpha * rl**x
    amp[M + x, 1] = (c * alpha + d * beta) * ep / dp * rr**x
    em = cmath.exp(1j * minus.sigma)
    tl = theta_s(minus, "minus", "L")
    tr = theta_s(minus, "minus", "R")
    amp[M - x, 0] = (a * alpha + b * beta) / em * tl**x
    amp[M - x, 1] = beta * tr**x
    return WaveState(family.spec, -M, amp)


def system_residual(system: SgfSystem, state: WaveState) -> float:
    """Max coefficient mismatch of ``A f = a`` with ``f`` truncated from ``state``.

    Only powers unaffected by the truncation are compared.
    """
    if system.side == "plus":
        xs = np.arange(1, state.xmax + 1)
    else:
        xs = np.arange(-1, state.xmin - 1, -1)
    worst = 0.0
    for j in range(2):
        f = {int(x): state.at(int(x))[j] for x in xs}
        A, r = system.A[j], system.rhs[j]
        out: dict[int, complex] = {}
        for x, v in f.items():
            out[x] = out.get(x, 0) + A.lam * v
            out[x + A.power] = out.get(x + A.power, 0) - A.kappa * v
        # the one power that would also receive a term from beyond the truncation
        edge = xs[-1] + (A.power if np.sign(A.power) == np.sign(xs[-1]) else 0)
        for k, v in out.items():
            if k == edge:
                continue
            target = r.coeff if k == r.power else 0
            worst = max(worst, abs(v - target))
        if r.power not in out:
            worst = max(worst, abs(r.coeff))
    return worst


def explain(family: CoinFamily, lam: complex, alpha: complex, beta: complex) -> dict:
    """Derivation trace of the SGF pipeline as a JSON-ready dict."""

    def c(z):
        z = complex(z)
        return [z.real, z.imag]

    plus, minus, u0 = _family_parts(family)
    trace = {"lambda": c(lam), "alpha": c(alpha), "beta": c(beta), "sides": {}}
    for params, side in ((plus, "plus"), (minus, "minus")):
        system = build_system(params, u0, lam, alpha, beta, side)
        p, q = det_quadratic(system)
        pp, qp = det_coefficients(lam, params.sigma, params.delta)
        roots = theta_roots(p, q)
        entry = {
            "A": [
                {"lambda": c(A.lam), "kappa": c(A.kappa), "power": A.power} for A in system.A
            ],
            "rhs": [{"coeff": c(r.coeff), "power": r.power} for r in system.rhs],
            "det_quadratic": {"p": c(p), "q": c(q), "p_formula": c(pp), "q_formula": c(qp)},
            "roots": {"theta_s": c(roots.theta_s), "theta_l": c(roots.theta_l)},
            "components": {},
        }
        for comp in "LR":
            sol = solve_component(system, comp)
            entry["components"][comp] = {
                "pole": c(sol.pole),
                "cancelled_root": c(sol.cancelled),
                "theta_s": c(sol.roots.theta_s),
                "theta_l": c(sol.roots.theta_l),
                "theta_s_formula": c(closed_form_theta_s(side, comp, lam, params.sigma, params.delta)),
                "series": {
                    "start": sol.series.start,
                    "lead": c(sol.series.lead),
                    "ratio": c(sol.series.ratio),
                },
            }
        trace["sides"][side] = entry
    return trace
