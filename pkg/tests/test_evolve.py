import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _gen import dense_step_matrix, family2, family3, random_state
from qwlab.coin import CoinMatrix, Diag3Params, build_diag2, build_diag3, build_family, hadamard, random_unitary
from qwlab.coin import Diag2Params
from qwlab.core import Interval, WaveState, l2_norm, measure_of, shift_offsets
from qwlab.errors import SpecMismatch, WindowTooSmall
from qwlab.evolve import evolve, measure_stationarity_check, step, valid_interior

S2, S3 = shift_offsets(2), shift_offsets(3)
R2 = 1 / math.sqrt(2)
EYE2 = CoinMatrix(np.eye(2))


def identity_family(n=2):
    eye = CoinMatrix(np.eye(n))
    return build_family(eye, eye, eye)


def hadamard_family():
    return build_family(EYE2, hadamard(), EYE2)


def dense_evolve(state, family, t):
    s = family.spec.s_max
    lo, hi = state.xmin - t * s, state.xmax + t * s
    vec = state.padded(lo, hi).amplitudes.reshape(-1)
    U = dense_step_matrix(family, lo, hi)
    for _ in range(t):
        vec = U @ vec
    return lo, vec.reshape(-1, family.spec.n)


def test_step_pure_movers():
    fam = identity_family()
    out = step(WaveState.delta(S2, 0, (1, 0)), fam)
    assert np.array_equal(out.at(-1), [1, 0]) and measure_of(out).values.sum() == 1
    out = step(WaveState.delta(S2, 0, (0, 1)), fam)
    assert np.array_equal(out.at(1), [0, 1]) and measure_of(out).values.sum() == 1


def test_step_hadamard_defect():
    out = step(WaveState.delta(S2, 0, (1, 0)), hadamard_family())
    np.testing.assert_allclose(out.at(-1), [R2, 0], atol=1e-15)
    np.testing.assert_allclose(out.at(1), [0, R2], atol=1e-15)
    assert np.all(out.at(0) == 0)


def test_step_three_state_middle_stays():
    sigma, darg = 0.7, 1.9
    u = build_diag3(Diag3Params(sigma, darg))
    out = step(WaveState.delta(S3, 0, (0, 1, 0)), build_family(u, u, u))
    np.testing.assert_allclose(out.at(0), [0, cmath.exp(-1j * sigma), 0], atol=1e-15)
    assert measure_of(out).values.sum() == pytest.approx(1)
    assert abs(measure_of(out).at(0) - 1) < 1e-15


def test_step_spec_mismatch():
    with pytest.raises(SpecMismatch):
        step(WaveState.delta(S3, 0, (1, 0, 0)), hadamard_family())


@pytest.mark.parametrize("n", [2, 3, 4])
def test_step_matches_dense_oracle(n):
    rng = np.random.default_rng(10 + n)
    fam = build_family(random_unitary(n, 1), random_unitary(n, 2), random_unitary(n, 3))
    psi = random_state(rng, n, -4, 5)
    lo, ref = dense_evolve(psi, fam, 6)
    got = evolve(psi, fam, 6)
    assert got.xmin == lo
    np.testing.assert_allclose(got.amplitudes, ref, atol=1e-13)


def test_evolve_examples():
    psi = WaveState.delta(S2, 0, (1, 0))
    assert evolve(psi, hadamard_family(), 0) is psi
    out = evolve(psi, identity_family(), 5)
    mu = measure_of(out)
    assert mu.at(-5) == 1 and mu.values.sum() == 1


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3]))
def test_evolve_preserves_norm(seed, n):
    rng = np.random.default_rng(seed)
    fam = family2(rng, seed) if n == 2 else family3(rng, seed)
    psi = random_state(rng, n)
    assert abs(l2_norm(evolve(psi, fam, 10)) - 1) <= 1e-12


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_evolve_is_linear(seed):
    rng = np.random.default_rng(seed)
    fam = family3(rng, seed)
    p1, p2 = random_state(rng, 3), random_state(rng, 3)
    c = complex(*rng.normal(size=2))
    lhs = evolve(p1 * c + p2, fam, 7).amplitudes
    rhs = (evolve(p1, fam, 7) * c + evolve(p2, fam, 7)).amplitudes
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_evolve_locality():
    fam = build_family(random_unitary(2, 4), random_unitary(2, 5), random_unitary(2, 6))
    out = evolve(WaveState.delta(S2, 3, (0.6, 0.8j)), fam, 4)
    mu = measure_of(out)
    assert all(v == 0 for x, v in mu if abs(x - 3) > 4)


def test_homogeneous_walk_is_translation_invariant():
    u = random_unitary(3, 9)
    fam = build_family(u, u, u)
    rng = np.random.default_rng(1)
    psi = random_state(rng, 3, -2, 2)
    shifted = WaveState(S3, psi.xmin + 7, psi.amplitudes)
    a, b = evolve(psi, fam, 5), evolve(shifted, fam, 5)
    assert b.xmin == a.xmin + 7
    np.testing.assert_allclose(a.amplitudes, b.amplitudes, atol=1e-15)


@pytest.mark.parametrize(
    "window, t, n, expected",
    [((-50, 50), 10, 2, (-40, 40)), ((-50, 50), 10, 3, (-40, 40)), ((-50, 50), 10, 4, (-30, 30))],
)
def test_valid_interior(window, t, n, expected):
    assert valid_interior(window, t, shift_offsets(n)) == Interval(*expected)


def test_valid_interior_empty():
    assert valid_interior((-5, 5), 10, S2).empty


def test_stationarity_check_zero_state():
    rep = measure_stationarity_check(WaveState.zeros(S2, -30, 30), hadamard_family(), 20)
    assert rep.passed and rep.max_deviation == 0 and rep.first_failure is None


def test_stationarity_check_hadamard_delta_fails():
    psi = WaveState.delta(S2, 0, (1, 0), window=(-10, 10))
    rep = measure_stationarity_check(psi, hadamard_family(), 2)
    assert not rep.passed
    assert rep.first_failure == 1
    assert rep.deviations[0] == pytest.approx(1.0)


def test_stationarity_check_window_too_small():
    with pytest.raises(WindowTooSmall):
        measure_stationarity_check(WaveState.zeros(S2, -5, 5), hadamard_family(), 10)


def test_stationarity_check_constant_eigenvector():
    psi = WaveState(S2, -30, np.ones((61, 2), dtype=complex))
    fam = build_family(*(build_diag2(Diag2Params(0.0, 0.0)),) * 3)
    rep = measure_stationarity_check(psi, fam, 20, 1e-15)
    assert rep.passed and len(rep.deviations) == 20
    assert rep.interiors[-1] == Interval(-10, 10)
