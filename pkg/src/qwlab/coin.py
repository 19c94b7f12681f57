"""Quantum coins and one-defect coin families."""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .core import ChiralitySpec, shift_offsets
from .errors import DimensionMismatch, NonUnitary, NotNormalized

USER_TOL = 1e-10
BUILD_TOL = 1e-12


@dataclass(frozen=True)
class Diag2Params:
    """Bulk 2-state coin ``diag(e^{i sigma}, Delta e^{-i sigma})`` with ``Delta = e^{i delta_arg}``."""

    sigma: float
    delta_arg: float

    @property
    def delta(self) -> complex:
        return cmath.exp(1j * self.delta_arg)


@dataclass(frozen=True)
class Diag3Params:
    """Bulk 3-state coin ``diag(e^{i sigma}, e^{-i sigma}, Delta)``."""

    sigma: float
    delta_arg: float

    @property
    def delta(self) -> complex:
        return cmath.exp(1j * self.delta_arg)


@dataclass(frozen=True)
class Defect2Params:
    """General 2x2 unitary ``[[a, b], [-Delta conj(b), Delta conj(a)]]``."""

    a: complex
    b: complex
    delta_arg: float

    @property
    def delta(self) -> complex:
        return cmath.exp(1j * self.delta_arg)


CoinParams = Union[Diag2Params, Diag3Params, Defect2Params, None]


@dataclass(frozen=True, eq=False)
class CoinMatrix:
    """An n x n complex matrix used as a coin.

    ``params`` records how the matrix was built, when it came from one of the
    parameterised constructors; admissibility checks rely on it.
    """

    entries: np.ndarray
    params: CoinParams = field(default=None)

    def __post_init__(self):
        m = np.array(self.entries, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"coin must be square, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __getitem__(self, idx):
        return self.entries[idx]


@dataclass(frozen=True, eq=False)
class CoinFamily:
    """Coins ``minus`` on x <= -1, ``origin`` at x = 0 and ``plus`` on x >= 1."""

    spec: ChiralitySpec
    minus: CoinMatrix
    origin: CoinMatrix
    plus: CoinMatrix

    @property
    def n(self) -> int:
        return self.spec.n

    def at(self, x: int) -> CoinMatrix:
        if x == 0:
            return self.origin
        return self.plus if x > 0 else self.minus

    def coins_for(self, lo: int, hi: int) -> np.ndarray:
        """Stack of coin matrices for the sites ``lo..hi``, shape ``(W, n, n)``."""
        x = np.arange(lo, hi + 1)
        out = np.empty((x.size, self.n, self.n), dtype=np.complex128)
        out[x < 0] = self.minus.entries
        out[x == 0] = self.origin.entries
        out[x > 0] = self.plus.entries
        return out

    @property
    def is_homogeneous(self) -> bool:
        return np.array_equal(self.minus.entries, self.origin.entries) and np.array_equal(
            self.plus.entries, self.origin.entries
        )


def unitarity_deviation(m) -> float:
    u = np.asarray(getattr(m, "entries", m), dtype=np.complex128)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def validate_unitary(m: CoinMatrix, tol: float = USER_TOL) -> float:
    """Return the max-entry deviation of ``U^H U`` from the identity, raising if above ``tol``."""
    u = np.asarray(getattr(m, "entries", m))
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DimensionMismatch(f"coin must be square, got shape {u.shape}")
    dev = unitarity_deviation(u)
    if dev > tol:
        raise NonUnitary(dev)
    return dev


def split_rows(m: CoinMatrix) -> list[np.ndarray]:
    """``V_j`` keeps row ``j`` of the coin and zeroes the rest, so that ``sum(V) == m``."""
    u = np.asarray(getattr(m, "entries", m))
    parts = []
    for j in range(u.shape[0]):
        v = np.zeros_like(u)
        v[j] = u[j]
        parts.append(v)
    return parts


def build_defect2(p: Defect2Params) -> CoinMatrix:
    norm = abs(p.a) ** 2 + abs(p.b) ** 2
    if abs(norm - 1.0) > 1e-12:
        raise NotNormalized(f"|a|^2 + |b|^2 = {norm!r}, expected 1")
    a, b, d = complex(p.a), complex(p.b), p.delta
    m = CoinMatrix(np.array([[a, b], [-d * b.conjugate(), d * a.conjugate()]]), p)
    validate_unitary(m, BUILD_TOL)
    return m


def build_diag2(p: Diag2Params) -> CoinMatrix:
    e = cmath.exp(1j * p.sigma)
    return CoinMatrix(np.diag([e, p.delta / e]), p)


def build_diag3(p: Diag3Params) -> CoinMatrix:
    e = cmath.exp(1j * p.sigma)
    return CoinMatrix(np.diag([e, 1 / e, p.delta]), p)


def hadamard() -> CoinMatrix:
    s = 1 / np.sqrt(2.0)
    return build_defect2(Defect2Params(s, s, np.pi))


def build_family(
    minus: CoinMatrix, origin: CoinMatrix, plus: CoinMatrix, tol: float = USER_TOL
) -> CoinFamily:
    n = origin.n
    if minus.n != n or plus.n != n:
        raise DimensionMismatch(f"coin sizes differ: {minus.n}, {origin.n}, {plus.n}")
    for m in (minus, origin, plus):
        validate_unitary(m, tol)
    return CoinFamily(shift_offsets(n), minus, origin, plus)


def random_unitary(n: int, seed: int) -> CoinMatrix:
    """Haar-distributed unitary from a seeded complex Gaussian matrix."""
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    q = q * (d / np.abs(d))
    return CoinMatrix(q)
