"""Dense complex polynomials, Aberth root finding and triangle geometry."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import RootFindingError

__all__ = [
    "Polynomial",
    "Triangle",
    "evaluate",
    "derivative",
    "roots",
    "hull_distance",
    "sort_lex",
    "segment_distance",
]

ZERO_DEGREE = -1  # degree marker of the zero polynomial


def _trim(c: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(c)
    if nz.size == 0:
        return np.zeros(0, dtype=complex)
    return c[: nz[-1] + 1]


@dataclass(frozen=True, eq=False)
class Polynomial:
    """Polynomial with complex coefficients, ``coefficients[k]`` multiplies ``z**k``.

    Trailing zeros are trimmed on construction; the zero polynomial has an
    empty coefficient vector and degree ``ZERO_DEGREE``.
    """

    coefficients: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    def __post_init__(self):
        c = _trim(np.atleast_1d(np.asarray(self.coefficients, dtype=complex)).copy())
        c.flags.writeable = False
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def from_roots(cls, rts, leading=1.0) -> "Polynomial":
        c = np.array([1.0 + 0j])
        for r in rts:
            c = np.convolve(c, [-complex(r), 1.0])
        return cls(leading * c)

    @classmethod
    def constant(cls, value) -> "Polynomial":
        return cls([value])

    @property
    def degree(self) -> int:
        return self.coefficients.size - 1 if self.coefficients.size else ZERO_DEGREE

    @property
    def is_zero(self) -> bool:
        return self.coefficients.size == 0

    @property
    def leading(self) -> complex:
        return complex(self.coefficients[-1]) if self.coefficients.size else 0j

    def coeff(self, k: int) -> complex:
        return complex(self.coefficients[k]) if 0 <= k < self.coefficients.size else 0j

    def padded(self, size: int) -> np.ndarray:
        out = np.zeros(size, dtype=complex)
        out[: self.coefficients.size] = self.coefficients
        return out

    def monic(self) -> "Polynomial":
        return Polynomial(self.coefficients / self.coefficients[-1])

    def __call__(self, z):
        return evaluate(self, z)

    def deriv(self, order: int = 1) -> "Polynomial":
        p = self
        for _ in range(order):
            p = derivative(p)
        return p

    def __add__(self, other):
        other = _as_poly(other)
        size = max(self.coefficients.size, other.coefficients.size)
        return Polynomial(self.padded(size) + other.padded(size))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-self.coefficients)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            if self.is_zero or other.is_zero:
                return Polynomial()
            return Polynomial(np.convolve(self.coefficients, other.coefficients))
        return Polynomial(self.coefficients * complex(other))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return np.array_equal(self.coefficients, other.coefficients)

    def __repr__(self):
        return f"Polynomial(degree={self.degree}, coefficients={self.coefficients.tolist()})"


def _as_poly(x) -> Polynomial:
    return x if isinstance(x, Polynomial) else Polynomial([x])


def evaluate(p: Polynomial, z):
    """Horner evaluation; ``z`` may be a scalar or an array."""
    z = np.asarray(z, dtype=complex)
    acc = np.zeros_like(z)
    for c in p.coefficients[::-1]:
        acc = acc * z + c
    return complex(acc) if acc.ndim == 0 else acc


def derivative(p: Polynomial) -> Polynomial:
    if p.degree <= 0:
        return Polynomial()
    k = np.arange(1, p.coefficients.size)
    return Polynomial(p.coefficients[1:] * k)


def sort_lex(values) -> list[complex]:
    """Sort complex numbers by (real, imaginary)."""
    return sorted((complex(v) for v in values), key=lambda v: (v.real, v.imag))


def _fujiwara_bound(c: np.ndarray) -> float:
    # c ordered low -> high, c[-1] != 0
    n = c.size - 1
    lead = abs(c[-1])
    terms = [(abs(c[n - k]) / lead) ** (1.0 / k) for k in range(1, n + 1)]
    terms[-1] = (abs(c[0]) / (2 * lead)) ** (1.0 / n)
    return 2.0 * max(terms)


def roots(p: Polynomial, tol: float = 1e-14, max_iter: int = 500) -> list[complex]:
    """All roots of ``p`` by Aberth-Ehrlich simultaneous iteration.

    Exact zero roots (vanishing low-order coefficients) are split off first.
    The start points lie on a circle of Fujiwara-bound radius with angles
    ``2*pi*k/n + 0.4``, so the routine is fully deterministic.  Returns the
    roots sorted by (real, imaginary).
    """
    if p.degree < 1:
        raise ValueError("roots() needs a polynomial of degree >= 1")
    c = p.coefficients
    nz = int(np.flatnonzero(c)[0])
    zero_roots = [0j] * nz
    c = c[nz:]
    n = c.size - 1
    if n == 0:
        return sort_lex(zero_roots)
    if n == 1:
        return sort_lex(zero_roots + [-c[0] / c[1]])

    dc = c[1:] * np.arange(1, n + 1)
    radius = _fujiwara_bound(c)
    x = radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))
    scale = np.abs(c)

    def horner(coef, pts):
        acc = np.zeros_like(pts)
        for a in coef[::-1]:
            acc = acc * pts + a
        return acc

    converged = np.zeros(n, dtype=bool)
    for _ in range(max_iter):
        pv = horner(c, x)
        dv = horner(dc, x)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pv / dv
            diff = x[:, None] - x[None, :]
            np.fill_diagonal(diff, np.inf)
            s = np.sum(1.0 / diff, axis=1)
            corr = ratio / (1.0 - ratio * s)
        corr = np.where(np.isfinite(corr), corr, 0.0)
        corr[pv == 0] = 0.0
        corr[converged] = 0.0
        x = x - corr
        # converged: tiny correction, or residual already at the rounding floor
        floor = 4 * n * np.finfo(float).eps * horner(scale, np.abs(x))
        converged |= (np.abs(corr) <= tol * (1.0 + np.abs(x))) | (np.abs(pv) <= floor)
        if converged.all():
            break
    else:
        absx = np.abs(x)
        bound = horner(scale, absx)
        resid = float(np.max(np.abs(horner(c, x)) / np.where(bound > 0, bound, 1.0)))
        raise RootFindingError(
            f"Aberth iteration did not converge in {max_iter} sweeps",
            best=sort_lex(zero_roots + list(x)),
            residual=resid,
        )
    return sort_lex(zero_roots + list(x))


def segment_distance(z: complex, a: complex, b: complex) -> float:
    d = b - a
    L2 = (d * d.conjugate()).real
    if L2 == 0.0:
        return abs(z - a)
    s = ((z - a) * d.conjugate()).real / L2
    s = min(1.0, max(0.0, s))
    return abs(z - (a + s * d))


@dataclass(frozen=True)
class Triangle:
    """Convex hull of three distinct points, possibly degenerate to a segment."""

    vertices: tuple
    rel_tol: float = 1e-12
    collinear: bool = field(init=False)

    def __post_init__(self):
        v = tuple(complex(x) for x in self.vertices)
        if len(v) != 3:
            raise ValueError("a triangle needs exactly three vertices")
        if len({v[0], v[1], v[2]}) != 3:
            raise ValueError("triangle vertices must be pairwise distinct")
        object.__setattr__(self, "vertices", v)
        e1, e2 = v[1] - v[0], v[2] - v[0]
        cross = (e1.conjugate() * e2).imag
        object.__setattr__(self, "collinear", abs(cross) <= self.rel_tol * abs(e1) * abs(e2))

    @property
    def diameter(self) -> float:
        a, b, c = self.vertices
        return max(abs(a - b), abs(b - c), abs(c - a))

    @property
    def centroid(self) -> complex:
        return sum(self.vertices) / 3

    def contains(self, z: complex, strict: bool = False) -> bool:
        if self.collinear:
            return False if strict else hull_distance(self, z) == 0.0
        a, b, c = self.vertices
        signs = []
        for p, q in ((a, b), (b, c), (c, a)):
            signs.append(((q - p).conjugate() * (z - p)).imag)
        orient = ((b - a).conjugate() * (c - a)).imag
        signs = [s * math.copysign(1.0, orient) for s in signs]
        return all(s > 0 for s in signs) if strict else all(s >= 0 for s in signs)

    def boundary_distance(self, z: complex) -> float:
        a, b, c = self.vertices
        return min(segment_distance(z, a, b), segment_distance(z, b, c), segment_distance(z, c, a))


def hull_distance(tri: Triangle, z: complex) -> float:
    """Euclidean distance from ``z`` to the convex hull of the triangle vertices."""
    z = complex(z)
    if not tri.collinear and tri.contains(z):
        return 0.0
    return tri.boundary_distance(z)
