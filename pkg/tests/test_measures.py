import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heun_spectra.measures import (
    ArcsineSlice,
    DiscreteMeasure,
    balayage_gap,
    build_Mi,
    cauchy,
    ct_ode_residual,
    ct_square_residual,
    derivative_potential_check,
    potential,
    shifted_cubic,
)
from heun_spectra.poly import Polynomial

from conftest import BASE_CUBIC, REAL3

S3 = 1 / math.sqrt(3)
delta0 = DiscreteMeasure([0j], [1.0])
pair = DiscreteMeasure([1, -1], [0.5, 0.5])
points = st.complex_numbers(min_magnitude=1.5, max_magnitude=50, allow_nan=False, allow_infinity=False)


def test_measure_validation_and_readonly():
    with pytest.raises(ValueError):
        DiscreteMeasure([0, 1], [1.0])
    m = DiscreteMeasure.root_counting([1, 2, 3, 4])
    assert m.total_mass == 1.0
    with pytest.raises(ValueError):
        m.weights[0] = 3.0


@given(points)
def test_cauchy_closed_forms(z):
    assert cauchy(delta0, z) == pytest.approx(1 / z, rel=1e-14)
    assert cauchy(pair, z) == pytest.approx(z / (z * z - 1), rel=1e-12)


def test_cauchy_lame_measure():
    m = DiscreteMeasure([S3], [1.0])
    assert cauchy(m, 2) == pytest.approx(1 / (2 - S3), rel=1e-15)


def test_proximity_error():
    with pytest.raises(ValueError):
        cauchy(delta0, 1e-13)
    with pytest.raises(ValueError):
        potential(pair, 1 + 1e-14)


def test_potential_closed_forms():
    assert potential(delta0, 3 + 4j) == pytest.approx(math.log(5))
    assert potential(pair, 3) == pytest.approx((math.log(2) + math.log(4)) / 2)
    m = DiscreteMeasure.root_counting([0.3, -1j, 1 + 1j])
    z = 1e6 * np.exp(0.7j)
    assert abs(potential(m, z) - math.log(abs(z))) < 1e-5


def test_potential_gradient_matches_cauchy():
    m = DiscreteMeasure([0.2, -0.5j, 1 + 0.4j], [0.5, 0.3, 0.2])
    z, h = 1.7 + 1.1j, 1e-5
    ux = (potential(m, z + h) - potential(m, z - h)) / (2 * h)
    uy = (potential(m, z + 1j * h) - potential(m, z - 1j * h)) / (2 * h)
    assert (ux - 1j * uy) / 2 == pytest.approx(cauchy(m, z) / 2, abs=1e-8)


def test_ct_square_residual_lame_n1():
    # V / v1 = z - t for the n = 1 Lame pair t = 1/sqrt(3)
    Q = Polynomial.from_roots(REAL3)
    Vt = Polynomial([-S3, 1])
    m = DiscreteMeasure([S3], [1.0])
    expected = abs(1 / (3 - S3) ** 2 - (3 - S3) / 24)
    got = ct_square_residual(m, Vt, Q, 3)
    assert got == pytest.approx(expected, rel=1e-14)
    assert got > 0


@given(points)
def test_ct_ode_residual_delta(z):
    Q = Polynomial([0, -1, 0, 1])
    assert abs(ct_ode_residual(delta0, Q, z) + 1 / z**2) < 1e-12 * max(1, abs(1 / z**2))


def test_ct_ode_residual_linear_in_measure():
    Q = Polynomial.from_roots(BASE_CUBIC)
    m = DiscreteMeasure([0.3 - 0.2j, 0.7 - 0.1j], [0.4, 0.6])
    z = 2 + 2j
    inhom = 6.0 / 24.0
    r1 = ct_ode_residual(m, Q, z) - inhom
    r2 = ct_ode_residual(m.scaled(2.0), Q, z) - inhom
    assert r2 == pytest.approx(2 * r1, rel=1e-13)


def test_shifted_cubic_expansion():
    a = BASE_CUBIC
    for i in range(3):
        v, w = shifted_cubic(a, i)
        Q = Polynomial.from_roots(a)
        for z in (0.3, 1 + 2j, -1.5j):
            assert Q(z + a[i]) == pytest.approx(z**3 + v * z**2 + w * z, abs=1e-13)


@given(st.floats(0, 1))
def test_arcsine_slice_invariants(tau):
    v, w = shifted_cubic(BASE_CUBIC, 1)
    sl = ArcsineSlice(tau, v, w, 16)
    s = (1 - tau) ** 2
    assert sl.center == pytest.approx(-v * s, abs=1e-15)
    assert sl.psi == pytest.approx(-w * (1 - s) * s, abs=1e-15)
    assert sl.half_length**2 == pytest.approx(4 * sl.psi, abs=1e-14)


def test_arcsine_slice_endpoints():
    a = BASE_CUBIC
    for i in range(3):
        v, w = shifted_cubic(a, i)
        end = ArcsineSlice(1.0, v, w, 8).points() + a[i]
        assert np.allclose(end, a[i], atol=1e-15)
        start = ArcsineSlice(0.0, v, w, 8).points() + a[i]
        j, k = [m for m in range(3) if m != i]
        assert np.allclose(start, a[j] + a[k] - a[i], atol=1e-14)


def test_build_Mi_mass_and_self_gap():
    M = build_Mi(BASE_CUBIC, 0, tau_nodes=40, slice_nodes=20)
    assert len(M) == 800
    assert M.total_mass == pytest.approx(1.0, abs=1e-14)
    ring = [10 * np.exp(2j * np.pi * k / 16) for k in range(16)]
    assert balayage_gap(M, M, ring) == 0.0


def test_derivative_potential_z_power():
    p = Polynomial([0] * 6 + [1])
    grid = [x + 1j * y for x in np.linspace(-2, 2, 9) for y in np.linspace(-2, 2, 9) if abs(x + 1j * y) > 0.1]
    rep = derivative_potential_check(p, grid, roots_p=[0] * 6, roots_dp=[0] * 5)
    assert np.allclose(rep.u, rep.u_prime, atol=1e-15)
    assert rep.passed


def test_derivative_potential_quadratic_closed_forms():
    p = Polynomial([-1, 0, 1])
    xs = np.linspace(-2.05, 2.05, 20)
    grid = [x + 1j * y for x in xs for y in xs]
    rep = derivative_potential_check(p, grid)
    g = np.array(grid)
    assert np.allclose(rep.u_prime, np.log(np.abs(g)), atol=1e-13)
    assert np.allclose(rep.u, 0.5 * np.log(np.abs(g**2 - 1)), atol=1e-13)
    # at finite degree the inequality is only asymptotic: u' <= u exactly where
    # |z|^2 <= |z^2 - 1|, so the report must flag the points off that region
    holds = np.abs(g) ** 2 <= np.abs(g**2 - 1)
    assert np.all(rep.u_prime[holds] <= rep.u[holds] + 1e-12)
    assert np.all(rep.u_prime[~holds] > rep.u[~holds])
    assert rep.max_excess > 0
    assert not rep.passed_inequality
