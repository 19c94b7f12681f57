"""Closed-form stationary measures of the one-defect diagonal walks.

The published ("printed") 3-state closed form is evaluated as written, next
to the measure of the eigenstate actually built by :func:`qwlab.eigen.shoot3`,
so any disagreement can be measured and attributed term by term.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .coin import (
    USER_TOL,
    CoinFamily,
    Diag3Params,
    build_diag3,
    build_family,
    validate_unitary,
)
from .core import MeasureProfile, PiecewiseMeasure, WaveState, measure_of, shift_offsets
from .eigen import BoundaryData, admissible_lambda3, shoot3
from .errors import InadmissibleLambda, NotNormalized
from .sgf import closed_form_state2

NORM_TOL = 1e-12


def _check_normalized(a: complex, b: complex) -> None:
    s = abs(a) ** 2 + abs(b) ** 2
    if abs(s - 1) > NORM_TOL:
        raise NotNormalized(f"|a|^2 + |b|^2 = {s!r}, expected 1")


def _theorem1_cross(a, b, alpha, beta) -> float:
    return (np.conj(a) * b * np.conj(alpha) * beta).real


def theorem1_measure(a: complex, b: complex, alpha: complex, beta: complex) -> PiecewiseMeasure:
    _check_normalized(a, b)
    A, B = abs(alpha) ** 2, abs(beta) ** 2
    ab2, bb2 = abs(a) ** 2, abs(b) ** 2
    cross = _theorem1_cross(a, b, alpha, beta)
    return PiecewiseMeasure(
        left=ab2 * A + (1 + bb2) * B + 2 * cross,
        origin=A + B,
        right=(1 + bb2) * A + ab2 * B - 2 * cross,
    )


def theorem1_is_uniform(a: complex, b: complex, alpha: complex, beta: complex, tol: float = 1e-12) -> bool:
    """Either the defect is diagonal or ``|alpha|^2 - |beta|^2 - 2 Re(conj(a) b conj(alpha) beta)/|b|^2 = 0``."""
    _check_normalized(a, b)
    if abs(b) <= tol:
        return True
    lhs = abs(alpha) ** 2 - abs(beta) ** 2 - 2 * _theorem1_cross(a, b, alpha, beta) / abs(b) ** 2
    return abs(lhs) <= tol


def theorem1_state(family: CoinFamily, lam: complex, alpha: complex, beta: complex, M: int) -> WaveState:
    return closed_form_state2(family, lam, alpha, beta, M)


def _entries3(defect) -> np.ndarray:
    m = np.asarray(getattr(defect, "entries", defect), dtype=np.complex128)
    if m.shape != (3, 3):
        raise ValueError(f"expected a 3x3 defect, got shape {m.shape}")
    return m


def theorem2_printed_branches(defect, alpha, beta, gamma) -> tuple[float, float, float]:
    """Raw ``(left, origin, right)`` of the printed 3-state formula; not clipped at zero."""
    (a, b, c), _, (g, h, i) = _entries3(defect)
    A, B, G = abs(alpha) ** 2, abs(beta) ** 2, abs(gamma) ** 2
    cj = np.conj
    right = (
        (1 + abs(g) ** 2) * A
        + abs(h) ** 2 * G
        + abs(i) ** 2 * B
        + 2 * (g * alpha * cj(h) * cj(gamma) + g * alpha * cj(i) * cj(beta) + g * gamma * cj(i) * cj(beta)).real
    )
    left = (
        A
        + (1 + abs(c) ** 2) * B
        + abs(b) ** 2 * G
        + 2 * (a * alpha * cj(b) * cj(gamma) + a * alpha * cj(c) * cj(beta) + b * gamma * cj(c) * cj(beta)).real
    )
    return float(left), float(A + G + B), float(right)


def theorem2_measure_printed(defect, alpha, beta, gamma) -> PiecewiseMeasure:
    validate_unitary(_entries3(defect), USER_TOL)
    return PiecewiseMeasure(*theorem2_printed_branches(defect, alpha, beta, gamma))


def theorem2_derived_measure(
    family: CoinFamily, lam: complex, alpha: complex, beta: complex, M: int
) -> MeasureProfile:
    return measure_of(shoot3(family, lam, BoundaryData(alpha, beta, "solve"), M).state)


def suspect_terms(defect, alpha, beta, gamma) -> dict:
    """The two places where the printed formula departs from the derived one.

    ``x >= 1``: printed ``2 Re(g gamma conj(i) conj(beta))`` versus derived
    ``2 Re(h gamma conj(i) conj(beta))``.  ``x <= -1``: printed ``|alpha|^2``
    versus derived ``|a|^2 |alpha|^2``.
    """
    (a, _, _), _, (g, h, i) = _entries3(defect)
    cj = np.conj
    return {
        "right": {
            "printed": float(2 * (g * gamma * cj(i) * cj(beta)).real),
            "derived": float(2 * (h * gamma * cj(i) * cj(beta)).real),
        },
        "left": {
            "printed": float(abs(alpha) ** 2),
            "derived": float(abs(a) ** 2 * abs(alpha) ** 2),
        },
        "origin": {},
    }


@dataclass(frozen=True)
class BranchDiagnostic:
    branch: str
    printed: float
    derived: float
    suspect_printed: float = 0.0
    suspect_derived: float = 0.0

    @property
    def deviation(self) -> float:
        return self.printed - self.derived

    @property
    def attribution_residual(self) -> float:
        """What the two flagged terms fail to explain of the deviation."""
        return abs(self.deviation - (self.suspect_printed - self.suspect_derived))

    def to_json(self) -> dict:
        terms = {}
        if self.branch != "origin":
            terms = {"printed": self.suspect_printed, "derived": self.suspect_derived}
        return {
            "branch": self.branch,
            "printed": self.printed,
            "derived": self.derived,
            "deviation": self.deviation,
            "suspect_terms": terms,
            "attribution_residual": self.attribution_residual,
        }


@dataclass(frozen=True)
class Theorem2Diagnosis:
    lam: complex
    gamma: complex  # solved stay-put amplitude at the origin
    gamma_right_minus1: complex  # the amplitude Psi^R(-1), the other reading of the symbol
    residual: float
    branches: tuple[BranchDiagnostic, ...]
    printed_symbol_reading: tuple[float, float, float]
    side_spread: float  # largest variation of the derived measure within one side
    extras: dict = field(default_factory=dict)

    @property
    def max_deviation(self) -> float:
        return max(abs(b.deviation) for b in self.branches)

    @property
    def max_attribution_residual(self) -> float:
        return max(b.attribution_residual for b in self.branches)

    def to_json(self) -> dict:
        c = lambda z: [complex(z).real, complex(z).imag]  # noqa: E731
        left, origin, right = self.printed_symbol_reading
        return {
            "lambda": c(self.lam),
            "gamma": c(self.gamma),
            "gamma_reading": "Psi^O(0)",
            "residual": self.residual,
            "side_spread": self.side_spread,
            "branches": [b.to_json() for b in self.branches],
            "printed_symbol_reading": {
                "gamma": c(self.gamma_right_minus1),
                "gamma_reading": "Psi^R(-1)",
                "left": left,
                "origin": origin,
                "right": right,
            },
        }


def diagnose_theorem2(
    family: CoinFamily, alpha: complex, beta: complex, M: int, lam: complex | None = None
) -> Theorem2Diagnosis:
    """Compare the printed 3-state measure with the measure of the derived eigenstate."""
    if lam is None:
        lam = admissible_lambda3(family)[0]
    sol = shoot3(family, lam, BoundaryData(alpha, beta, "solve"), M)
    mu = measure_of(sol.state)
    gamma = sol.boundary.gamma
    u0 = family.origin.entries
    p_left, p_origin, p_right = theorem2_printed_branches(u0, alpha, beta, gamma)
    terms = suspect_terms(u0, alpha, beta, gamma)
    branches = (
        BranchDiagnostic("left", p_left, mu.at(-1), terms["left"]["printed"], terms["left"]["derived"]),
        BranchDiagnostic("origin", p_origin, mu.at(0)),
        BranchDiagnostic("right", p_right, mu.at(1), terms["right"]["printed"], terms["right"]["derived"]),
    )
    vals = mu.values
    spread = max(np.ptp(vals[: M]), np.ptp(vals[M + 1 :]))
    gamma_alt = sol.state.at(-1)[2]
    return Theorem2Diagnosis(
        lam=sol.lam,
        gamma=gamma,
        gamma_right_minus1=gamma_alt,
        residual=sol.residual,
        branches=branches,
        printed_symbol_reading=theorem2_printed_branches(u0, alpha, beta, gamma_alt),
        side_spread=float(spread),
    )


def theorem3_measure(alpha: complex, beta: complex, gamma: complex) -> PiecewiseMeasure:
    off = abs(alpha) ** 2 + abs(beta) ** 2
    return PiecewiseMeasure(off, off + abs(gamma) ** 2, off)


def homogeneous_family3(params: Diag3Params) -> CoinFamily:
    u = build_diag3(params)
    return build_family(u, u, u)


def theorem3_state(
    params: Diag3Params, alpha: complex, beta: complex, gamma: complex, lam: complex, M: int
) -> WaveState:
    """``Psi(x) = (alpha r^x, gamma [x == 0], beta r^x)`` with ``r = lam e^{-i sigma}``.

    ``lam^2 = Delta e^{i sigma}`` makes the right-mover ratio ``Delta / lam``
    equal to ``r`` as well.  The stay-put part only rotates in place, so the
    measure is stationary even when it is not an eigenvector.
    """
    e = cmath.exp(1j * params.sigma)
    if abs(lam * lam - params.delta * e) > 1e-12 or abs(abs(lam) - 1) > 1e-12:
        raise InadmissibleLambda(f"lambda^2 must equal Delta e^(i sigma); got lambda={lam:.6g}")
    x = np.arange(-M, M + 1)
    # |lam / e^{i sigma}| = 1, so take powers through the phase: every site then
    # has modulus 1 to one rounding instead of an error growing with |x|
    r = np.exp(1j * cmath.phase(lam / e) * x)
    amp = np.zeros((2 * M + 1, 3), dtype=np.complex128)
    amp[:, 0] = alpha * r
    amp[:, 2] = beta * r
    amp[M, 1] = gamma
    return WaveState(shift_offsets(3), -M, amp)
