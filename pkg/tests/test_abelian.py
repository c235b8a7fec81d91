import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heun_spectra.abelian import (
    ChebRule,
    CubicRoots,
    analytic_branch,
    f_jk,
    f_jk_prime,
    loop_identities,
    side_integral,
    tail_integral,
    third_index,
)
from heun_spectra.errors import BranchAmbiguityError, UnsupportedConfiguration

from conftest import EQUILATERAL, BASE_CUBIC, REAL3, SCALENE

SIDES = [(1, 2), (2, 0), (0, 1)]
CUBICS = [BASE_CUBIC, EQUILATERAL, *SCALENE]


@pytest.mark.parametrize("a", CUBICS)
def test_value_at_opposite_root(a):
    r = CubicRoots(a)
    for j, k in SIDES:
        i = third_index(j, k)
        assert abs(f_jk(r, r.a[i], j, k, ChebRule(400)) - math.pi) < 1e-10


@pytest.mark.parametrize("a", CUBICS)
def test_loop_identities(a):
    r = CubicRoots(a)
    r_pi, r_2pi = loop_identities(r, r.centroid)
    assert r_pi < 1e-10
    assert r_2pi < 1e-8


def test_dual_route_against_principal_branch():
    # inside the triangle near a_i the continued branch and the cut-plane
    # principal branch agree
    r = CubicRoots(BASE_CUBIC)
    for j, k in SIDES:
        i = third_index(j, k)
        b = r.a[i] + 0.3 * (r.centroid - r.a[i])
        assert abs(f_jk(r, b, j, k, ChebRule(400)) - side_integral(r, b, j, k)) < 1e-12


def test_analytic_branch_at_infinity_and_on_side():
    r = CubicRoots(BASE_CUBIC)
    b = 0.6 - 0.3j
    z = 1e6 * np.exp(0.4j)
    assert analytic_branch(r, b, 1, 2, z) * z == pytest.approx(-1j, abs=1e-5)
    # squares to (b - z)/Q(z) everywhere off the cuts
    for z in (2 + 1j, -1 - 1j, 0.5 + 2j):
        val = analytic_branch(r, b, 1, 2, z)
        assert val**2 == pytest.approx((b - z) / r.Q(z), rel=1e-12)


def test_tail_plus_side_reproduces_pi_only_for_interior_b():
    r = CubicRoots(BASE_CUBIC)
    b = r.centroid
    for j, k in SIDES:
        total = f_jk(r, b, j, k, ChebRule(400)) + tail_integral(r, b, j, k)
        assert abs(total - math.pi) < 1e-10


def test_derivative_against_finite_differences():
    r = CubicRoots(BASE_CUBIC)
    b = 0.55 - 0.35j
    for j, k in SIDES:
        d = f_jk_prime(r, b, j, k, ChebRule(400))
        for h in (1e-3, 1e-4):
            fd = (f_jk(r, b + h, j, k, ChebRule(400)) - f_jk(r, b - h, j, k, ChebRule(400))) / (2 * h)
            assert abs(fd - d) < 10 * h * h * (1 + abs(d)) + 1e-9


def test_derivative_finite_at_opposite_root():
    r = CubicRoots(BASE_CUBIC)
    d = f_jk_prime(r, r.a[0], 1, 2)
    assert np.isfinite(d) and abs(d) > 0


def test_derivative_nonvanishing_and_ratio_nonreal():
    r = CubicRoots(BASE_CUBIC)
    rng = np.random.default_rng(7)
    for _ in range(10):
        w = rng.dirichlet([2, 2, 2])
        b = complex(np.dot(w, r.a))
        ds = [f_jk_prime(r, b, j, k, ChebRule(200)) for j, k in SIDES]
        assert min(abs(d) for d in ds) > 1e-3
        for m in range(3):
            ratio = ds[m] / ds[(m + 1) % 3]
            assert abs(ratio.imag) > 1e-6


def test_sign_flip_leaves_zero_set():
    r = CubicRoots(BASE_CUBIC)
    for b in (0.4 - 0.2j, 0.8 - 0.5j):
        for j, k in SIDES:
            assert f_jk(r, b, j, k, sign=-1.0) == pytest.approx(-f_jk(r, b, j, k), abs=1e-14)


def test_rule_convergence():
    r = CubicRoots(SCALENE[2])
    b = r.centroid
    coarse = f_jk(r, b, 0, 1, ChebRule(50, adaptive=False))
    fine = f_jk(r, b, 0, 1, ChebRule(800, adaptive=False))
    mid = f_jk(r, b, 0, 1, ChebRule(400, adaptive=False))
    assert abs(mid - fine) <= abs(coarse - fine) + 1e-15
    assert abs(mid - fine) < 1e-12


@given(
    st.complex_numbers(min_magnitude=0.2, max_magnitude=5, allow_nan=False, allow_infinity=False),
    st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
)
def test_affine_invariance(c, d):
    # the integrand has weight zero: f is invariant under z -> c z + d
    r = CubicRoots(BASE_CUBIC)
    b = 0.6 - 0.3j
    rr = r.affine(c, d)
    for j, k in SIDES:
        assert f_jk(rr, c * b + d, j, k) == pytest.approx(f_jk(r, b, j, k), abs=1e-11)


def test_errors():
    with pytest.raises(UnsupportedConfiguration):
        f_jk(CubicRoots(REAL3), 0.5j, 0, 1)
    r = CubicRoots(BASE_CUBIC)
    with pytest.raises(BranchAmbiguityError):
        f_jk(r, 0.5 + 0j, 0, 1)  # b on the side (a_0, a_1)
    with pytest.raises(BranchAmbiguityError):
        f_jk_prime(r, r.a[1], 1, 2)
    with pytest.raises(BranchAmbiguityError):
        loop_identities(r, 3 + 3j)
    with pytest.raises(ValueError):
        ChebRule(4)
    with pytest.raises(ValueError):
        third_index(1, 1)
