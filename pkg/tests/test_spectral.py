import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heun_spectra.errors import DegenerateLeadingCoefficient, SpectralError
from heun_spectra.poly import Polynomial, Triangle, hull_distance
from heun_spectra.spectral import (
    HeunOperator,
    build_pencil,
    leading_v1,
    polya_check,
    solve,
    spectral_roots,
    stieltjes_measure,
    stieltjes_roots,
)

from conftest import BASE_CUBIC, REAL3

S3 = 1 / math.sqrt(3)


def test_leading_v1():
    op0 = HeunOperator.from_roots(BASE_CUBIC)
    assert leading_v1(op0, 7) == -42
    assert leading_v1(op0, 1) == 0
    lame = HeunOperator.from_roots(REAL3, "lame")
    assert leading_v1(lame, 1) == pytest.approx(-1.5)


def test_operator_validation():
    with pytest.raises(ValueError):
        HeunOperator(Polynomial([0, 1, 1]))
    with pytest.raises(ValueError):
        HeunOperator(Polynomial([0, -1, 0, 2]))
    with pytest.raises(ValueError):
        HeunOperator.from_roots(REAL3, Polynomial([1, 0, 0, 1]))


def test_pencil_lame_n1():
    op = HeunOperator.from_roots(REAL3, "lame")
    np.testing.assert_allclose(build_pencil(op, 1), [[0, -0.5], [-1.5, 0]], atol=1e-15)


def test_pencil_zero_for_p0_n1():
    op = HeunOperator.from_roots(BASE_CUBIC)
    assert not np.any(build_pencil(op, 1))


def test_pencil_bandwidth():
    op = HeunOperator.from_roots((0.2 + 0.1j, -1, 1.3j), Polynomial([0.5, -1j, 2]))
    A = build_pencil(op, 6)
    r, c = np.nonzero(A)
    assert np.all(r - c <= 1) and np.all(c - r <= 2)


def test_pencil_matches_operator_action():
    op = HeunOperator.from_roots(BASE_CUBIC, "lame")
    n = 5
    A = build_pencil(op, n)
    v1 = leading_v1(op, n)
    for m in range(n + 1):
        S = Polynomial(np.eye(n + 1)[m])
        image = op.Q * S.deriv(2) + op.P * S.deriv(1) + Polynomial([0, v1]) * S
        np.testing.assert_allclose(image.padded(n + 2)[: n + 1], A[:, m], atol=1e-12)
        assert abs(image.coeff(n + 1)) < 1e-12


def test_lame_n1_hand_solution():
    op = HeunOperator.from_roots(REAL3, "lame")
    res = solve(op, 1)
    assert len(res.pairs) == 2
    lo, hi = res.pairs
    assert abs(lo.t + S3) < 1e-10 and abs(hi.t - S3) < 1e-10
    assert np.allclose(lo.S.coefficients, [-S3, 1], atol=1e-10)
    assert np.allclose(hi.S.coefficients, [S3, 1], atol=1e-10)
    assert np.allclose(lo.V.coefficients, [-math.sqrt(3) / 2, -1.5], atol=1e-10)
    assert np.allclose(spectral_roots(res), [-S3, S3], atol=1e-10)
    nu = stieltjes_measure(lo)
    assert np.allclose(nu.points, [S3]) and nu.total_mass == 1


def test_degenerate_v1_rejected():
    with pytest.raises(DegenerateLeadingCoefficient, match="degenerate leading coefficient"):
        solve(HeunOperator.from_roots(BASE_CUBIC), 1)


def test_degree_cap():
    with pytest.raises(SpectralError):
        solve(HeunOperator.from_roots(BASE_CUBIC), 301)


@pytest.mark.parametrize("n", [5, 10, 24])
def test_count_and_residual_base_cubic(n):
    res = solve(HeunOperator.from_roots(BASE_CUBIC), n)
    assert sum(p.multiplicity for p in res.pairs) == n + 1
    assert len(res.t_roots) == n + 1
    assert all(p.residual <= 1e-8 for p in res.pairs)
    assert all(p.S.degree == n and p.S.leading == 1 for p in res.pairs)
    assert res.measure.total_mass == 1.0
    sp = Polynomial.from_roots(res.t_roots)
    assert abs(sp(res.t_roots[0])) < 1e-10


def test_base_n24_against_multiprecision_pencil():
    # independent route: eigenvalues of the monomial-basis pencil at 60 digits
    op = HeunOperator.from_roots(BASE_CUBIC)
    n = 24
    A = build_pencil(op, n)
    mpmath.mp.dps = 60
    try:
        ev = mpmath.eig(mpmath.matrix(A.tolist()), left=False, right=False)
    finally:
        mpmath.mp.dps = 15
    v1 = leading_v1(op, n)
    # v0 = -lambda and t = -v0 / v1
    oracle = [complex(lam) / v1 for lam in ev]
    res = solve(op, n)
    for t in res.t_roots:
        assert min(abs(t - o) for o in oracle) < 1e-10


def test_base_n24_inside_hull_neighbourhood():
    res = solve(HeunOperator.from_roots(BASE_CUBIC), 24)
    tri = Triangle(BASE_CUBIC)
    assert len(res.t_roots) == 25
    assert max(hull_distance(tri, t) for t in res.t_roots) < 0.05
    assert len(res.pairs) == 25
    assert all(len(stieltjes_measure(p)) == 24 for p in res.pairs)


def test_real_lame_n8_stieltjes_counts():
    op = HeunOperator.from_roots(REAL3, "lame")
    res = solve(op, 8)
    assert len(res.pairs) == 9
    for p in res.pairs:
        assert abs(p.t.imag) < 1e-9 and -1 < p.t.real < 1
    counts = sorted(sum(1 for z in stieltjes_roots(p) if -1 < z.real < 0 and abs(z.imag) < 1e-9) for p in res.pairs)
    assert counts == list(range(9))
    assert polya_check(op, res, 1e-9) is True


def test_polya_not_applicable_for_zero_p():
    op = HeunOperator.from_roots(BASE_CUBIC)
    assert polya_check(op, solve(op, 4)) is None


def test_polya_base_cubic_lame_n10():
    op = HeunOperator.from_roots(BASE_CUBIC, "lame")
    assert polya_check(op, solve(op, 10), 1e-9) is True


def test_polya_rejects_repeated_roots():
    op = HeunOperator(Polynomial.from_roots([0, 0, 1]), Polynomial([0, 1]))
    with pytest.raises(ValueError):
        polya_check(op, None)


def test_confinement_improves_with_n():
    op = HeunOperator.from_roots(BASE_CUBIC)
    tri = Triangle(BASE_CUBIC)
    d = [max(hull_distance(tri, t) for t in solve(op, n).t_roots) for n in (12, 24, 48)]
    assert d[0] > d[2]


nonzero = st.builds(complex, st.floats(0.3, 2), st.floats(-2, 2))
shift = st.builds(complex, st.floats(-2, 2), st.floats(-2, 2))


@settings(max_examples=15)
@given(nonzero, shift, st.integers(2, 9))
def test_affine_equivariance(c, d, n):
    # under w = c z + d: P -> c^2 P((w-d)/c), V -> c V((w-d)/c), t -> c t + d
    rts = (0.1 + 0.2j, 1.1 - 0.3j, 0.4 - 1.2j)
    P = Polynomial([0.3 - 0.1j, 0.7, 1.2 + 0.4j])
    base = solve(HeunOperator.from_roots(rts, P), n)
    inv = Polynomial([-d / c, 1 / c])
    Pw = Polynomial([0j])
    power = Polynomial([1])
    for k in range(3):
        Pw = Pw + P.coeff(k) * power
        power = power * inv
    moved = solve(HeunOperator.from_roots([c * r + d for r in rts], c * c * Pw), n)
    expect = sorted((c * t + d for t in base.t_roots), key=lambda z: (z.real, z.imag))
    for t in moved.t_roots:
        assert min(abs(t - e) for e in expect) < 1e-8 * max(1, abs(c))


@settings(max_examples=10)
@given(st.integers(2, 12), st.floats(0.2, 2.0))
def test_real_case_reality(n, gap):
    op = HeunOperator.from_roots((-1, -1 + gap, 1 + gap), "lame")
    res = solve(op, n)
    for t in res.t_roots:
        assert abs(t.imag) < 1e-9 and -1 < t.real < 1 + gap


def test_equilateral_symmetric_spectrum():
    # Q = z^3 - 1 up to rounding: the spectrum is invariant under t -> omega t,
    # and the first certification attempt fails until the eigenvalue balls shrink
    eq = tuple(complex(math.cos(2 * math.pi * k / 3), math.sin(2 * math.pi * k / 3)) for k in range(3))
    res = solve(HeunOperator.from_roots(eq), 24)
    assert res.provenance["certified"]
    assert sum(p.multiplicity for p in res.pairs) == 25
    assert max(p.residual for p in res.pairs) < 1e-12
    omega = complex(math.cos(2 * math.pi / 3), math.sin(2 * math.pi / 3))
    ts = np.array(res.t_roots)
    assert max(np.min(np.abs(ts - omega * t)) for t in ts) < 1e-8


def test_approximate_roots_resolve_a_double_root():
    from flint import acb_poly

    from heun_spectra import _arb

    p = acb_poly([2, -3, 0, 1])  # (z - 1)^2 (z + 2)
    with pytest.raises(ValueError):
        _arb.isolate_roots(p, 200, 400, 1e-30)
    rts = sorted(_arb.to_complex(r).real for r in _arb.approximate_roots(p, 200))
    assert rts == pytest.approx([-2, 1, 1], abs=1e-25)
