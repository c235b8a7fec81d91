"""Van Vleck and Stieltjes polynomials of the Heun equation.

For a monic cubic ``Q`` and ``deg P <= 2`` we look for linear ``V`` such that
``Q S'' + P S' + V S = 0`` has a polynomial solution of degree ``n``.  The
leading coefficient of ``V`` is forced by ``n``; the constant term is an
eigenvalue of the linear map ``S -> Q S'' + P S' + v1 z S`` on polynomials of
degree ``<= n``.

The eigenvalues of that map are exponentially ill-conditioned in any
monomial representation (a relative perturbation of 1e-16 in the matrix
entries moves them by O(1) already at n = 50).  ``solve`` therefore expands
around a root of ``Q``, where the matrix is tridiagonal, builds the
characteristic polynomial by the continuant recurrence in ball arithmetic and
isolates its roots with certified error bounds, raising the working precision
until the bounds are below double-precision resolution.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from flint import acb, acb_poly

from . import _arb
from .errors import DegenerateLeadingCoefficient, DegreeDropError, SpectralError
from .measures import DiscreteMeasure
from .poly import Polynomial, Triangle, derivative, hull_distance, roots, sort_lex

__all__ = [
    "HeunOperator",
    "VanVleckPair",
    "SpectrumResult",
    "leading_v1",
    "build_pencil",
    "solve",
    "spectral_roots",
    "stieltjes_roots",
    "stieltjes_measure",
    "polya_check",
    "stieltjes_derivative_roots",
    "nearest_pair",
    "MAX_DEGREE",
]

MAX_DEGREE = 300
RESIDUAL_TOL = 1e-8


def _as_P(P, Q: Polynomial) -> Polynomial:
    if isinstance(P, Polynomial):
        return P
    if P is None or (isinstance(P, str) and P == "zero"):
        return Polynomial()
    if isinstance(P, str) and P == "lame":
        return 0.5 * derivative(Q)
    return Polynomial(P)


@dataclass(frozen=True)
class HeunOperator:
    """Coefficient pair of ``Q S'' + P S' + V S = 0``; ``Q`` monic cubic, ``deg P <= 2``."""

    Q: Polynomial
    P: Polynomial = field(default_factory=Polynomial)
    roots: tuple = field(init=False, compare=False)

    def __post_init__(self):
        if self.Q.degree != 3:
            raise ValueError(f"Q must be cubic, got degree {self.Q.degree}")
        if abs(self.Q.leading - 1.0) > 1e-12:
            raise ValueError("Q must be monic")
        P = _as_P(self.P, self.Q)
        if P.degree > 2:
            raise ValueError(f"P must have degree <= 2, got {P.degree}")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "roots", tuple(roots(self.Q)))

    @classmethod
    def from_roots(cls, rts, P="zero") -> "HeunOperator":
        """Operator with ``Q = prod (z - a_i)``; ``P`` is ``"zero"``, ``"lame"`` or coefficients."""
        rts = [complex(r) for r in rts]
        Q = Polynomial.from_roots(rts)
        op = cls(Q, _as_P(P, Q))
        # keep the caller's roots exactly, the spectral solve expands around them
        object.__setattr__(op, "roots", tuple(rts))
        return op

    @property
    def triangle(self) -> Triangle:
        return Triangle(self.roots)

    def p2(self) -> complex:
        return self.P.coeff(2)


@dataclass(frozen=True)
class VanVleckPair:
    """One Van Vleck polynomial ``V = v1 z + v0`` with its monic Stieltjes polynomial."""

    v1: complex
    v0: complex
    t: complex
    S: Polynomial
    multiplicity: int
    residual: float
    # Stieltjes polynomial in powers of (z - shift), kept in ball arithmetic
    exact: acb_poly | None = field(default=None, repr=False, compare=False)
    shift: complex = field(default=0j, repr=False, compare=False)
    precision: int = field(default=53, repr=False, compare=False)

    @property
    def V(self) -> Polynomial:
        return Polynomial([self.v0, self.v1])

    @property
    def degree(self) -> int:
        return self.S.degree


@dataclass(frozen=True)
class SpectrumResult:
    n: int
    pairs: tuple
    t_roots: tuple
    measure: DiscreteMeasure
    provenance: dict = field(default_factory=dict, compare=False)


def leading_v1(op: HeunOperator, n: int) -> complex:
    """Leading coefficient of V that cancels the z**(n+1) term."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return -(n * (n - 1) + op.p2() * n) + 0j


def build_pencil(op: HeunOperator, n: int) -> np.ndarray:
    """Matrix of ``S -> Q S'' + P S' + v1 z S`` on the basis 1, z, ..., z**n.

    Column ``m`` holds the image of ``z**m``.  The matrix has one subdiagonal
    and two superdiagonals.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    q = op.Q.padded(4)
    p = op.P.padded(3)
    v1 = leading_v1(op, n)
    A = np.zeros((n + 1, n + 1), dtype=complex)
    for m in range(n + 1):
        if m >= 2:
            for l in range(4):
                r = m - 2 + l
                if r <= n:
                    A[r, m] += m * (m - 1) * q[l]
        if m >= 1:
            for l in range(3):
                r = m - 1 + l
                if r <= n:
                    A[r, m] += m * p[l]
        if m + 1 <= n:
            A[m + 1, m] += v1
    return A


def _tridiagonal(op: HeunOperator, n: int):
    """Entries of the same map in powers of x = z - a_1 (ball arithmetic).

    Because a_1 is a root of Q the cubic has no constant term in x and the
    matrix becomes tridiagonal.
    """
    a = complex(op.roots[0])
    A = _arb.to_acb(a)
    d2 = _arb.to_acb(op.roots[1]) - A
    d3 = _arb.to_acb(op.roots[2]) - A
    s2 = -(d2 + d3)
    s1 = d2 * d3
    p0, p1, p2 = (_arb.to_acb(c) for c in op.P.padded(3))
    p0s = p0 + p1 * A + p2 * A * A
    p1s = p1 + 2 * p2 * A
    v1 = -(acb(n * (n - 1)) + p2 * n)
    sub = [acb(m * (m - 1)) + p2 * m + v1 for m in range(n)]
    diag = [acb(m * (m - 1)) * s2 + p1s * m for m in range(n + 1)]
    sup = [acb((m + 1) * m) * s1 + p0s * (m + 1) for m in range(n)]
    return sub, diag, sup, v1, a


def _charpoly(sub, diag, sup) -> acb_poly:
    lam = acb_poly([0, 1])
    prev = acb_poly([1])
    cur = acb_poly([diag[0]]) - lam
    for m in range(1, len(diag)):
        prev, cur = cur, (acb_poly([diag[m]]) - lam) * cur - (sub[m - 1] * sup[m - 1]) * prev
    return cur


def _stieltjes_shifted(sub, diag, sup, lam: acb) -> list[acb]:
    """Monic eigenvector by backward recurrence, coefficients of powers of x."""
    n = len(diag) - 1
    s = [acb(0)] * (n + 2)
    s[n] = acb(1)
    for m in range(n, 0, -1):
        if sub[m - 1].contains(0):
            raise DegreeDropError(f"subdiagonal entry {m - 1} vanishes; deg S < {n}")
        acc = (diag[m] - lam) * s[m]
        if m < n:
            acc += sup[m] * s[m + 1]
        s[m - 1] = -acc / sub[m - 1]
    return s[: n + 1]


def _clusters(ts: list[complex], tol: float) -> list[list[int]]:
    parent = list(range(len(ts)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(ts)):
        for j in range(i + 1, len(ts)):
            if abs(ts[i] - ts[j]) <= tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(len(ts)):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _residual(op: HeunOperator, S: Polynomial, v1: complex, v0: complex) -> float:
    QS2 = op.Q * S.deriv(2)
    total = QS2 + op.P * S.deriv(1) + Polynomial([v0, v1]) * S
    denom = float(np.max(np.abs(QS2.coefficients))) if not QS2.is_zero else 1.0
    if total.is_zero:
        return 0.0
    return float(np.max(np.abs(total.coefficients))) / (denom or 1.0)


def _eigenvalues(op, n, prec, refine=False):
    """Certified eigenvalues at ``prec`` bits, or ``None`` if isolation fails."""
    with _arb.working_precision(prec):
        sub, diag, sup, v1, a = _tridiagonal(op, n)
        cp = _charpoly(sub, diag, sup)
    v1c = _arb.to_complex(v1)
    scale = abs(v1c) * max(1.0, max(abs(x - a) for x in op.roots))
    # retries refine further: the backward recurrence for S amplifies the
    # radius of the eigenvalue ball, and only a tighter ball shrinks it
    tol = scale * (2.0 ** (-prec / 2) if refine else 1e-18)
    try:
        lams = _arb.isolate_roots(cp, prec, maxprec=2 * prec, tol=tol)
    except ValueError:
        return None
    worst = max(_arb.radius(lam) / scale for lam in lams)
    return lams if worst <= 1e-14 else None


def _eigenvalues_approx(op, n, prec):
    """Uncertified eigenvalues, for characteristic polynomials with repeated roots."""
    with _arb.working_precision(prec):
        sub, diag, sup, _, _ = _tridiagonal(op, n)
        cp = _charpoly(sub, diag, sup)
    return _arb.approximate_roots(cp, prec)


def _assemble(op, n, prec, lams, cluster_tol, strict):
    with _arb.working_precision(prec):
        sub, diag, sup, v1, a = _tridiagonal(op, n)
    v1c = _arb.to_complex(v1)
    ts = [a + _arb.to_complex(lam) / v1c for lam in lams]
    diam = max((abs(x - y) for x in ts for y in ts), default=0.0) or 1.0
    groups = _clusters(ts, cluster_tol * diam)
    pairs = []
    with _arb.working_precision(prec):
        A = _arb.to_acb(a)
        for g in groups:
            lam = sum((lams[i] for i in g), acb(0)) / len(g)
            Sx = acb_poly(_stieltjes_shifted(sub, diag, sup, lam))
            Sz = Sx(acb_poly([-A, 1]))
            cz = [_arb.to_complex(Sz[k]) for k in range(n + 1)]
            top = max(abs(c) for c in cz) or 1.0
            if strict and max(_arb.radius(Sz[k]) for k in range(n + 1)) > 1e-12 * top:
                return None
            S = Polynomial(cz)
            t = sum(ts[i] for i in g) / len(g)
            v0 = -v1c * t
            pairs.append(
                VanVleckPair(
                    v1=v1c,
                    v0=v0,
                    t=t,
                    S=S,
                    multiplicity=len(g),
                    residual=_residual(op, S, v1c, v0),
                    exact=Sx,
                    shift=a,
                    precision=prec,
                )
            )
    return pairs


def solve(op: HeunOperator, n: int, cluster_tol: float = 1e-7) -> SpectrumResult:
    """All Van Vleck / Stieltjes pairs of degree ``n``.

    Eigenvalues closer than ``cluster_tol`` times the spectral diameter are
    merged into one pair whose multiplicity is the cluster size.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > MAX_DEGREE:
        raise SpectralError(f"n = {n} exceeds the supported maximum {MAX_DEGREE}")
    v1 = leading_v1(op, n)
    if v1 == 0:
        raise DegenerateLeadingCoefficient(
            "degenerate leading coefficient: v1 = 0, V is constant and t is undefined"
        )
    prec = 4 * n + 64
    attempts = []
    pairs = None
    while pairs is None and prec <= 16 * n + 1024:
        attempts.append(prec)
        lams = _eigenvalues(op, n, prec, refine=len(attempts) > 1)
        if lams is not None:
            pairs = _assemble(op, n, prec, lams, cluster_tol, strict=True)
        if pairs is None:
            prec = int(prec * 1.5)
    certified = pairs is not None
    if not certified:
        # isolation keeps failing on repeated eigenvalues (symmetric cubics)
        prec = attempts[-1]
        pairs = _assemble(op, n, prec, _eigenvalues_approx(op, n, prec), cluster_tol, strict=False)

    pairs.sort(key=lambda p: (p.t.real, p.t.imag))
    total = sum(p.multiplicity for p in pairs)
    if total != n + 1:
        raise SpectralError(f"found {total} eigenvalues, expected {n + 1}")
    bad = [p.t for p in pairs if p.residual > RESIDUAL_TOL]
    if bad:
        raise SpectralError(f"residual above {RESIDUAL_TOL:g} for t = {bad[:3]}")
    t_roots = tuple(sort_lex(p.t for p in pairs for _ in range(p.multiplicity)))
    w = np.full(n + 1, 1.0 / (n + 1))
    measure = DiscreteMeasure(np.array(t_roots), w, tag=f"mu_{n}")
    return SpectrumResult(
        n=n,
        pairs=tuple(pairs),
        t_roots=t_roots,
        measure=measure,
        provenance={
            "precision_bits": prec,
            "attempts": attempts,
            "certified": certified,
            "cluster_tol": cluster_tol,
            "residual_tol": RESIDUAL_TOL,
        },
    )


def spectral_roots(res: SpectrumResult) -> list[complex]:
    return list(res.t_roots)


def _ball_roots(exact, shift, prec, degree, lead_next) -> list[complex]:
    # the coefficient balls inherit the radius of the eigenvalue ball, which
    # blocks refinement; their midpoints differ from S far below double precision
    scale = 1.0 + abs(lead_next) / max(degree, 1)
    with _arb.working_precision(prec):
        mid = acb_poly([acb(exact[k].mid()) for k in range(degree + 1)])
    for _ in range(3):
        try:
            rts = _arb.isolate_roots(mid, prec, maxprec=4 * prec, tol=1e-18 * scale)
        except ValueError:
            prec *= 2
            continue
        return sort_lex(shift + _arb.to_complex(r) for r in rts)
    raise SpectralError(f"root isolation of a degree-{degree} Stieltjes polynomial failed")


def stieltjes_roots(pair: VanVleckPair) -> list[complex]:
    """Roots of the Stieltjes polynomial, isolated in ball arithmetic when available."""
    if pair.exact is None:
        return roots(pair.S)
    return _ball_roots(pair.exact, pair.shift, pair.precision, pair.degree, pair.S.coeff(pair.degree - 1))


def stieltjes_derivative_roots(pair: VanVleckPair) -> list[complex]:
    """Roots of ``S'``, from the ball-arithmetic coefficients when available."""
    dS = derivative(pair.S)
    if pair.exact is None:
        return roots(dS)
    d = pair.degree - 1
    lead_next = pair.S.coeff(pair.degree - 1) * d / pair.degree
    with _arb.working_precision(pair.precision):
        dx = pair.exact.derivative()
    return _ball_roots(dx, pair.shift, pair.precision, d, lead_next)


def stieltjes_measure(pair: VanVleckPair) -> DiscreteMeasure:
    n = pair.degree
    if n < 1:
        raise ValueError("Stieltjes polynomial must have degree >= 1")
    pts = np.array(stieltjes_roots(pair))
    return DiscreteMeasure(pts, np.full(n, 1.0 / n), tag="nu")


def polya_check(op: HeunOperator, res: SpectrumResult, tol: float = 1e-9):
    """Polya's inclusion test.

    Returns ``None`` (not applicable) unless every residue of ``P/Q`` is real
    and positive; otherwise whether every ``t`` and every Stieltjes root lies
    within ``tol`` of the convex hull of the roots of ``Q``.
    """
    a = op.roots
    if min(abs(a[0] - a[1]), abs(a[1] - a[2]), abs(a[0] - a[2])) <= 1e-12 * max(map(abs, a), default=1):
        raise ValueError("Q has a repeated root")
    dQ = derivative(op.Q)
    residues = [op.P(x) / dQ(x) for x in a]
    if not all(r.real > tol and abs(r.imag) <= tol for r in residues):
        return None
    tri = Triangle(a)
    for pair in res.pairs:
        if hull_distance(tri, pair.t) > tol:
            return False
        if any(hull_distance(tri, z) > tol for z in stieltjes_roots(pair)):
            return False
    return True


def nearest_pair(res: SpectrumResult, target: complex) -> VanVleckPair:
    """The pair whose Van Vleck root is closest to ``target``."""
    return min(res.pairs, key=lambda p: abs(p.t - target))
