"""Lattice value types shared by the rest of the package.

A walker on Z carries an ``n``-component complex amplitude at every site.  Only
a finite window is stored; every site outside the window is an exact zero.
All types here are immutable: operations return new objects and the backing
arrays are flagged read-only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import InvalidArity, WindowMismatch


class Interval(NamedTuple):
    """Closed integer interval ``[lo, hi]``; empty when ``lo > hi``."""

    lo: int
    hi: int

    @property
    def empty(self) -> bool:
        return self.lo > self.hi

    def __len__(self) -> int:
        return max(0, self.hi - self.lo + 1)

    def __contains__(self, x: object) -> bool:
        return isinstance(x, (int, np.integer)) and self.lo <= x <= self.hi

    def sites(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def covers(self, other: "Interval") -> bool:
        return other.empty or (self.lo <= other.lo and other.hi <= self.hi)


@dataclass(frozen=True)
class ChiralitySpec:
    """Number of chiralities and the lattice displacement of each one per step."""

    n: int
    offsets: tuple[int, ...]

    def __post_init__(self):
        if len(self.offsets) != self.n:
            raise InvalidArity(f"expected {self.n} offsets, got {len(self.offsets)}")
        if any(b <= a for a, b in zip(self.offsets, self.offsets[1:])):
            raise InvalidArity("offsets must be strictly increasing")

    @property
    def s_max(self) -> int:
        return max(abs(o) for o in self.offsets)


def shift_offsets(n: int) -> ChiralitySpec:
    """Displacements for the ``n`` chiralities.

    Odd ``n`` gives ``-(n-1)/2, ..., 0, ..., (n-1)/2`` (the middle chirality
    stays put); even ``n`` gives ``-n/2, ..., -1, 1, ..., n/2``.
    """
    if n < 1:
        raise InvalidArity(f"number of chiralities must be >= 1, got {n}")
    if n % 2:
        h = (n - 1) // 2
        offsets = tuple(range(-h, h + 1))
    else:
        h = n // 2
        offsets = tuple(range(-h, 0)) + tuple(range(1, h + 1))
    return ChiralitySpec(n, offsets)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class WaveState:
    """Amplitudes on the window ``[xmin, xmin + len(amplitudes) - 1]``.

    ``amplitudes[k, j]`` is the amplitude of chirality ``j`` at site ``xmin + k``.
    """

    spec: ChiralitySpec
    xmin: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=np.complex128)
        if amp.ndim != 2 or amp.shape[1] != self.spec.n:
            raise InvalidArity(f"amplitudes must have shape (W, {self.spec.n}), got {amp.shape}")
        if amp.shape[0] == 0:
            raise WindowMismatch("window must be non-empty")
        object.__setattr__(self, "xmin", int(self.xmin))
        object.__setattr__(self, "amplitudes", _frozen(amp))

    @classmethod
    def zeros(cls, spec: ChiralitySpec, xmin: int, xmax: int) -> "WaveState":
        return cls(spec, xmin, np.zeros((xmax - xmin + 1, spec.n), dtype=np.complex128))

    @classmethod
    def from_sites(
        cls,
        spec: ChiralitySpec,
        sites: Mapping[int, Sequence[complex]],
        window: tuple[int, int] | None = None,
    ) -> "WaveState":
        """Build a state from ``{x: amplitude vector}``; window defaults to the support hull."""
        if window is None:
            if not sites:
                raise WindowMismatch("cannot infer a window from an empty site map")
            window = (min(sites), max(sites))
        lo, hi = window
        amp = np.zeros((hi - lo + 1, spec.n), dtype=np.complex128)
        for x, vec in sites.items():
            if not lo <= x <= hi:
                raise WindowMismatch(f"site {x} outside window [{lo}, {hi}]")
            amp[x - lo] = vec
        return cls(spec, lo, amp)

    @classmethod
    def delta(cls, spec: ChiralitySpec, x0: int, vec: Sequence[complex], window=None) -> "WaveState":
        return cls.from_sites(spec, {x0: vec}, window or (x0, x0))

    @property
    def xmax(self) -> int:
        return self.xmin + self.amplitudes.shape[0] - 1

    @property
    def window(self) -> Interval:
        return Interval(self.xmin, self.xmax)

    def sites(self) -> np.ndarray:
        return self.window.sites()

    def at(self, x: int) -> np.ndarray:
        if self.xmin <= x <= self.xmax:
            return self.amplitudes[x - self.xmin]
        return np.zeros(self.spec.n, dtype=np.complex128)

    def padded(self, lo: int, hi: int) -> "WaveState":
        """Same amplitudes on the enlarged (or restricted) window ``[lo, hi]``."""
        out = np.zeros((hi - lo + 1, self.spec.n), dtype=np.complex128)
        a, b = max(lo, self.xmin), min(hi, self.xmax)
        if a <= b:
            out[a - lo : b - lo + 1] = self.amplitudes[a - self.xmin : b - self.xmin + 1]
        return WaveState(self.spec, lo, out)

    def with_amplitude(self, x: int, j: int, value: complex) -> "WaveState":
        amp = np.array(self.amplitudes)
        amp[x - self.xmin, j] = value
        return WaveState(self.spec, self.xmin, amp)

    def __mul__(self, c: complex) -> "WaveState":
        return WaveState(self.spec, self.xmin, self.amplitudes * c)

    __rmul__ = __mul__

    def __add__(self, other: "WaveState") -> "WaveState":
        if other.spec != self.spec:
            raise InvalidArity("cannot add states with different chirality specs")
        lo, hi = min(self.xmin, other.xmin), max(self.xmax, other.xmax)
        return WaveState(
            self.spec, lo, self.padded(lo, hi).amplitudes + other.padded(lo, hi).amplitudes
        )


@dataclass(frozen=True, eq=False)
class MeasureProfile:
    """Non-negative values on the window starting at ``xmin``."""

    xmin: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size == 0:
            raise WindowMismatch("measure profile needs a non-empty 1-d window")
        if np.any(v < 0):
            raise ValueError("measure values must be non-negative")
        object.__setattr__(self, "xmin", int(self.xmin))
        object.__setattr__(self, "values", _frozen(v))

    @property
    def window(self) -> Interval:
        return Interval(self.xmin, self.xmin + self.values.size - 1)

    def sites(self) -> np.ndarray:
        return self.window.sites()

    def at(self, x: int) -> float:
        return float(self.values[x - self.xmin])

    def restrict(self, window: Interval) -> np.ndarray:
        if not self.window.covers(window):
            raise WindowMismatch(f"{window} not inside {self.window}")
        return self.values[window.lo - self.xmin : window.hi - self.xmin + 1]

    def __iter__(self) -> Iterator[tuple[int, float]]:
        return zip(self.sites().tolist(), self.values.tolist())


@dataclass(frozen=True)
class PiecewiseMeasure:
    """Closed-form measure: ``left`` for x <= -1, ``origin`` at 0, ``right`` for x >= 1."""

    left: float
    origin: float
    right: float

    def __post_init__(self):
        for name in ("left", "origin", "right"):
            v = getattr(self, name)
            # tiny negative values come from cancellation in the closed forms
            if v < -1e-12:
                raise ValueError(f"{name} branch is negative: {v}")
            object.__setattr__(self, name, max(float(v), 0.0))

    def at(self, x: int) -> float:
        if x == 0:
            return self.origin
        return self.right if x > 0 else self.left

    def profile(self, lo: int, hi: int) -> MeasureProfile:
        return MeasureProfile(lo, [self.at(x) for x in range(lo, hi + 1)])

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.left, self.origin, self.right)


@dataclass(frozen=True)
class MeasureComparison:
    window: Interval
    max_deviation: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tol


def measure_of(state: WaveState) -> MeasureProfile:
    """Per-site squared norm of the amplitude vector."""
    amp = state.amplitudes
    return MeasureProfile(state.xmin, (amp.real**2 + amp.imag**2).sum(axis=1))


def l2_norm(state: WaveState) -> float:
    return float(np.sqrt(measure_of(state).values.sum()))


def compare_measures(
    m1: MeasureProfile, m2: MeasureProfile, window: Interval | tuple[int, int], tol: float
) -> MeasureComparison:
    window = Interval(*window)
    if window.empty:
        raise WindowMismatch("comparison window is empty")
    if not (m1.window.covers(window) and m2.window.covers(window)):
        raise WindowMismatch(f"window {tuple(window)} not covered by both profiles")
    dev = float(np.max(np.abs(m1.restrict(window) - m2.restrict(window))))
    return MeasureComparison(window, dev, tol)
