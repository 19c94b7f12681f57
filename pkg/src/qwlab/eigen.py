"""Site-wise eigen-relations around the defect and the shooting constructors.

For an eigenvector ``U Psi = lambda Psi`` of the one-defect walk with diagonal
bulk coins, the chiralities decouple away from the origin.  Each component
therefore propagates outward from the boundary values at ``x = 0`` by a fixed
unit-modulus ratio per site, and the defect only enters through the two
amplitudes that leave the origin.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Literal, Union

import numpy as np

from .coin import CoinFamily, CoinMatrix, Diag2Params, Diag3Params
from .core import WaveState
from .errors import (
    IncompatibleDeterminants,
    IncompatiblePhases,
    InadmissibleLambda,
    NotDiagonal,
    SingularGamma,
    WindowTooSmall,
)
from .evolve import apply_step

ANGLE_TOL = 1e-12
LAMBDA_TOL = 1e-12
_DIAG_TOL = 1e-12

Gamma = Union[complex, Literal["solve"]]


@dataclass(frozen=True)
class BoundaryData:
    """Origin amplitudes: ``alpha`` (left-mover), ``beta`` (right-mover), ``gamma`` (stay-put)."""

    alpha: complex
    beta: complex
    gamma: Gamma = "solve"


@dataclass(frozen=True)
class EigenSolution:
    lam: complex
    boundary: BoundaryData  # gamma is always resolved to a number here
    state: WaveState
    residual: float
    origin_middle_residual: float = 0.0
    gamma_free: bool = False


def wrap_angle(phi: float) -> float:
    """Map an angle to ``(-pi, pi]``."""
    w = math.remainder(phi, 2 * math.pi)
    return math.pi if w == -math.pi else w


def angles_equal(a: float, b: float, tol: float = ANGLE_TOL) -> bool:
    return abs(wrap_angle(a - b)) <= tol


def principal_sqrt_phase(phi: float) -> complex:
    """Principal square root of ``e^{i phi}``, i.e. ``e^{i phi/2}`` with ``phi`` wrapped to ``(-pi, pi]``."""
    return cmath.exp(0.5j * wrap_angle(phi))


def local_residual(state: WaveState, family: CoinFamily, lam: complex) -> float:
    """Largest entry of ``lam Psi(x) - (U Psi)(x)`` that the window can evaluate exactly.

    Component ``j`` at ``x`` is checked whenever its source site
    ``x - offsets[j]`` lies in the window.  This includes every site with both
    neighbours in the window, plus the edge components whose source is inside,
    so that a change to any single stored amplitude shows up.
    """
    s = family.spec.s_max
    w = state.amplitudes.shape[0]
    if w < 2 * s + 1:
        raise WindowTooSmall(f"window of width {w} has no interior for s_max={s}")
    image = apply_step(state.amplitudes, state.xmin, family)
    worst = 0.0
    for j, off in enumerate(family.spec.offsets):
        lo, hi = max(0, off), min(w, w + off)  # window rows with source inside
        diff = lam * state.amplitudes[lo:hi, j] - image[s + lo : s + hi, j]
        worst = max(worst, float(np.max(np.abs(diff), initial=0.0)))
    return worst


def diag2_params_of(coin: CoinMatrix) -> Diag2Params:
    if isinstance(coin.params, Diag2Params):
        return coin.params
    m = coin.entries
    if m.shape != (2, 2) or abs(m[0, 1]) > _DIAG_TOL or abs(m[1, 0]) > _DIAG_TOL:
        raise NotDiagonal("bulk coin is not a diagonal 2x2 matrix")
    return Diag2Params(cmath.phase(m[0, 0]), cmath.phase(m[0, 0] * m[1, 1]))


def diag3_params_of(coin: CoinMatrix) -> Diag3Params:
    if isinstance(coin.params, Diag3Params):
        return coin.params
    m = coin.entries
    if m.shape != (3, 3) or np.max(np.abs(m - np.diag(np.diagonal(m)))) > _DIAG_TOL:
        raise NotDiagonal("bulk coin is not a diagonal 3x3 matrix")
    if abs(m[0, 0] * m[1, 1] - 1) > _DIAG_TOL:
        raise NotDiagonal("bulk coin middle entry is not the conjugate phase of the first")
    return Diag3Params(cmath.phase(m[0, 0]), cmath.phase(m[2, 2]))


def admissible_lambda2(family: CoinFamily) -> tuple[complex, complex]:
    """Eigenvalues ``+-sqrt(Delta)`` carrying the 2-state stationary measure.

    Both sides must share the determinant phase; otherwise ``lambda^2`` would
    have to equal two different numbers.
    """
    plus, minus = diag2_params_of(family.plus), diag2_params_of(family.minus)
    if not angles_equal(plus.delta_arg, minus.delta_arg):
        raise IncompatibleDeterminants(plus.delta, minus.delta)
    r = principal_sqrt_phase(plus.delta_arg)
    return (r, -r)


def admissible_lambda3(family: CoinFamily) -> tuple[complex, complex]:
    """Eigenvalues ``+-sqrt(Delta e^{i sigma})`` for the 3-state walk."""
    plus, minus = diag3_params_of(family.plus), diag3_params_of(family.minus)
    phi_p = plus.delta_arg + plus.sigma
    phi_m = minus.delta_arg + minus.sigma
    if not angles_equal(phi_p, phi_m):
        raise IncompatiblePhases(cmath.exp(1j * phi_p), cmath.exp(1j * phi_m))
    r = principal_sqrt_phase(phi_p)
    return (r, -r)


def require_admissible(lam: complex, admissible) -> complex:
    """Return ``lam`` if it is one of the admissible eigenvalues, else raise InadmissibleLambda."""
    try:
        allowed = admissible()
    except (IncompatibleDeterminants, IncompatiblePhases) as exc:
        raise InadmissibleLambda(str(exc)) from exc
    if not any(abs(lam - a) <= LAMBDA_TOL for a in allowed):
        raise InadmissibleLambda(f"lambda={lam:.6g} not in {allowed}")
    return complex(lam)


def _geometric(start: complex, ratio: complex, count: int) -> np.ndarray:
    """``[start * ratio, start * ratio**2, ...]`` by repeated multiplication."""
    out = np.empty(count, dtype=np.complex128)
    v = start
    for k in range(count):
        v = v * ratio
        out[k] = v
    return out


def shoot2(family: CoinFamily, lam: complex, boundary: BoundaryData, M: int) -> EigenSolution:
    """Propagate a 2-state eigenvector outward from ``(alpha, beta)`` at the origin onto ``[-M, M]``."""
    if M < 2:
        raise ValueError("M must be >= 2")
    lam = require_admissible(lam, lambda: admissible_lambda2(family))
    plus, minus = diag2_params_of(family.plus), diag2_params_of(family.minus)
    (a, b), (c, d) = family.origin.entries
    alpha, beta = complex(boundary.alpha), complex(boundary.beta)
    ep, em = cmath.exp(1j * plus.sigma), cmath.exp(1j * minus.sigma)

    amp = np.zeros((2 * M + 1, 2), dtype=np.complex128)
    o = M
    amp[o] = (alpha, beta)
    # lam L(x) = e^{i s+} L(x+1) for x >= 0
    amp[o + 1 :, 0] = _geometric(alpha, lam / ep, M)
    # lam R(1) = c alpha + d beta; lam R(x) = D+ e^{-i s+} R(x-1) for x >= 2
    r1 = (c * alpha + d * beta) / lam
    amp[o + 1 :, 1] = np.concatenate(([r1], _geometric(r1, plus.delta / ep / lam, M - 1)))
    # lam L(-1) = a alpha + b beta; lam L(x) = e^{i s-} L(x+1) for x <= -2
    l1 = (a * alpha + b * beta) / lam
    amp[o - 1 :: -1, 0] = np.concatenate(([l1], _geometric(l1, em / lam, M - 1)))
    # lam R(x) = D- e^{-i s-} R(x-1) for x <= 0
    amp[o - 1 :: -1, 1] = _geometric(beta, lam * em / minus.delta, M)

    state = WaveState(family.spec, -M, amp)
    return EigenSolution(
        lam, BoundaryData(alpha, beta, 0j), state, local_residual(state, family, lam)
    )


def solve_gamma(origin: np.ndarray, lam: complex, alpha: complex, beta: complex):
    """Origin stay-put amplitude from ``lam gamma = d alpha + e gamma + f beta``.

    Returns ``(gamma, free)``; ``free`` is set when the relation holds for any gamma.
    """
    d, e, f = origin[1]
    num = d * alpha + f * beta
    den = lam - e
    if abs(den) <= LAMBDA_TOL:
        if abs(num) <= LAMBDA_TOL:
            return 0j, True
        raise SingularGamma(f"lambda equals the defect middle entry e={e:.6g} but d*alpha+f*beta={num:.3g}")
    return num / den, False


def shoot3(family: CoinFamily, lam: complex, boundary: BoundaryData, M: int) -> EigenSolution:
    """3-state analogue of :func:`shoot2`.

    The stay-put chirality is supported on the origin only.  With
    ``boundary.gamma == "solve"`` the origin middle-row relation fixes gamma;
    an explicit gamma is used as given and the violation of that relation is
    returned as ``origin_middle_residual``.
    """
    if M < 2:
        raise ValueError("M must be >= 2")
    lam = require_admissible(lam, lambda: admissible_lambda3(family))
    plus, minus = diag3_params_of(family.plus), diag3_params_of(family.minus)
    u0 = family.origin.entries
    (a, b, c), (d, e, f), (g, h, i) = u0
    alpha, beta = complex(boundary.alpha), complex(boundary.beta)
    free = False
    if isinstance(boundary.gamma, str):
        if boundary.gamma != "solve":
            raise ValueError(f"unknown gamma mode {boundary.gamma!r}")
        gamma, free = solve_gamma(u0, lam, alpha, beta)
    else:
        gamma = complex(boundary.gamma)
    middle_res = abs(lam * gamma - (d * alpha + e * gamma + f * beta))
    ep, em = cmath.exp(1j * plus.sigma), cmath.exp(1j * minus.sigma)

    amp = np.zeros((2 * M + 1, 3), dtype=np.complex128)
    o = M
    amp[o] = (alpha, gamma, beta)
    amp[o + 1 :, 0] = _geometric(alpha, lam / ep, M)
    r1 = (g * alpha + h * gamma + i * beta) / lam
    amp[o + 1 :, 2] = np.concatenate(([r1], _geometric(r1, plus.delta / lam, M - 1)))
    l1 = (a * alpha + b * gamma + c * beta) / lam
    amp[o - 1 :: -1, 0] = np.concatenate(([l1], _geometric(l1, em / lam, M - 1)))
    amp[o - 1 :: -1, 2] = _geometric(beta, lam / minus.delta, M)

    state = WaveState(family.spec, -M, amp)
    return EigenSolution(
        lam,
        BoundaryData(alpha, beta, gamma),
        state,
        local_residual(state, family, lam),
        origin_middle_residual=middle_res,
        gamma_free=free,
    )
