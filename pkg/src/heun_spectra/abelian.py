"""Abelian integrals along the sides of the root triangle.

For a permutation ``(i, j, k)`` of ``(0, 1, 2)``::

    f_jk(b) = int_{a_j}^{a_k} sqrt((b - t) / ((t - a_1)(t - a_2)(t - a_3))) dt

With ``t = m + h cos(theta)`` (``m``, ``h`` the midpoint and half-length of
the side) the endpoint factor ``1/sqrt((t - a_j)(a_k - t))`` becomes the
Chebyshev weight and, up to a global sign,

    f_jk(b) = int_0^pi sqrt((t - b) / (t - a_i)) dtheta,

which is integrated with the Gauss-Chebyshev (midpoint-in-angle) rule.  The
square root is followed continuously from node to node; the global sign is
fixed by continuation in ``b`` from ``b = a_i``, where the integrand is 1 and
the value is ``+pi``.

Indices are 0-based throughout: root ``a_i`` is ``roots.a[i]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import BranchAmbiguityError, RefineRuleError, UnsupportedConfiguration
from .poly import Polynomial, Triangle, segment_distance

__all__ = [
    "CubicRoots",
    "ChebRule",
    "f_jk",
    "f_jk_prime",
    "side_integral",
    "tail_integral",
    "loop_identities",
    "analytic_branch",
    "third_index",
    "HOMOTOPY_CHECKPOINTS",
    "GUARD",
]

HOMOTOPY_CHECKPOINTS = 32
GUARD = 1e-9
MAX_NODES = 1600


@dataclass(frozen=True)
class CubicRoots:
    """The three roots of ``Q``, pairwise distinct."""

    a: tuple
    collinear: bool = field(init=False)

    def __post_init__(self):
        a = tuple(complex(x) for x in self.a)
        tri = Triangle(a)  # validates distinctness
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "collinear", tri.collinear)

    @property
    def triangle(self) -> Triangle:
        return Triangle(self.a)

    @property
    def diameter(self) -> float:
        return self.triangle.diameter

    @property
    def centroid(self) -> complex:
        return sum(self.a) / 3

    @property
    def Q(self) -> Polynomial:
        return Polynomial.from_roots(self.a)

    def affine(self, c: complex, d: complex) -> "CubicRoots":
        return CubicRoots(tuple(c * x + d for x in self.a))


@dataclass(frozen=True)
class ChebRule:
    """Gauss-Chebyshev rule with ``m`` nodes; ``adaptive`` doubles ``m`` until converged."""

    m: int = 200
    adaptive: bool = True
    rel_tol: float = 1e-13

    def __post_init__(self):
        if self.m < 8:
            raise ValueError("a Chebyshev rule needs at least 8 nodes")

    def angles(self) -> np.ndarray:
        return _angles(self.m)

    def doubled(self) -> "ChebRule":
        return ChebRule(2 * self.m, self.adaptive, self.rel_tol)


@lru_cache(maxsize=16)
def _angles(m: int) -> np.ndarray:
    th = (2 * np.arange(1, m + 1) - 1) * np.pi / (2 * m)
    th.flags.writeable = False
    return th


def third_index(j: int, k: int) -> int:
    if j == k or not {j, k} <= {0, 1, 2}:
        raise ValueError(f"invalid side ({j}, {k})")
    return 3 - j - k


def _check(roots: CubicRoots, b: complex, j: int, k: int) -> int:
    if roots.collinear:
        raise UnsupportedConfiguration("collinear roots: the abelian integrals are not defined")
    i = third_index(j, k)
    aj, ak = roots.a[j], roots.a[k]
    L = abs(ak - aj)
    for p in (b, roots.a[i]):
        if _on_open_segment(p, aj, ak, GUARD * L):
            raise BranchAmbiguityError(f"point {p} lies on the integration segment ({aj}, {ak})")
    return i


def _on_open_segment(p: complex, a: complex, b: complex, guard: float) -> bool:
    if segment_distance(p, a, b) > guard:
        return False
    return abs(p - a) > guard and abs(p - b) > guard


def _segments_cross(p: complex, q: complex, a: complex, b: complex) -> bool:
    def orient(u, v, w):
        return ((v - u).conjugate() * (w - u)).imag

    d1, d2 = orient(a, b, p), orient(a, b, q)
    d3, d4 = orient(p, q, a), orient(p, q, b)
    return d1 * d2 < 0 and d3 * d4 < 0


def _continuous_sqrt(g: np.ndarray) -> np.ndarray:
    """Square root of each row of ``g`` continued along the last axis."""
    steps = np.angle(g[..., 1:] / g[..., :-1])
    if np.any(np.abs(steps) > np.pi / 2):
        raise RefineRuleError("argument jumps by more than pi/2 between nodes")
    arg = np.angle(g[..., :1]) + np.concatenate(
        [np.zeros(g.shape[:-1] + (1,)), np.cumsum(steps, axis=-1)], axis=-1
    )
    return np.sqrt(np.abs(g)) * np.exp(0.5j * arg)


def _branch_values(roots: CubicRoots, b: complex, j: int, k: int, m: int, sign: float) -> tuple:
    """Nodes ``t`` and the continued values of ``sqrt((t - b)/(t - a_i))``."""
    i = third_index(j, k)
    aj, ak, ai = roots.a[j], roots.a[k], roots.a[i]
    mid, half = (aj + ak) / 2, (ak - aj) / 2
    # t runs from a_k (theta = 0) to a_j (theta = pi)
    t = mid + half * np.cos(_angles(m))
    path = ai + (b - ai) * np.linspace(0.0, 1.0, HOMOTOPY_CHECKPOINTS + 1)
    g = (t[None, :] - path[:, None]) / (t[None, :] - ai)
    rows = _continuous_sqrt(g)
    # fix each row's sign by continuity in b, starting from the all-ones row at b = a_i
    s = 1.0 if np.real(rows[0, 0]) > 0 else -1.0
    rows[0] *= s
    for r in range(1, rows.shape[0]):
        if np.real(np.vdot(rows[r - 1], rows[r])) < 0:
            rows[r] *= -1.0
    return t, sign * rows[-1], ai


def _with_refinement(fn, rule: ChebRule):
    m = rule.m
    while True:
        try:
            val = fn(m)
        except RefineRuleError:
            if m >= MAX_NODES:
                raise
            m *= 2
            continue
        if not rule.adaptive:
            return val
        while m < MAX_NODES:
            try:
                finer = fn(2 * m)
            except RefineRuleError:
                m *= 2
                val = None
                break
            if abs(finer - val) <= rule.rel_tol * max(1.0, abs(finer)):
                return finer
            m *= 2
            val = finer
        else:
            return val
        if val is None:
            continue


def f_jk(roots: CubicRoots, b: complex, j: int, k: int, rule: ChebRule = ChebRule(), sign: float = 1.0) -> complex:
    """Abelian integral along side ``(a_j, a_k)``, normalised so that ``f_jk(a_i) = +pi``.

    ``sign = -1`` selects the opposite global branch (used to check that the
    zero set of ``Im f_jk`` does not depend on the branch).
    """
    b = complex(b)
    i = _check(roots, b, j, k)
    if _segments_cross(roots.a[i], b, roots.a[j], roots.a[k]):
        raise BranchAmbiguityError("continuation path from a_i to b crosses the integration segment")

    def value(m):
        _, vals, _ = _branch_values(roots, b, j, k, m, sign)
        return complex(np.pi / m * np.sum(vals))

    return _with_refinement(value, rule)


def f_jk_prime(roots: CubicRoots, b: complex, j: int, k: int, rule: ChebRule = ChebRule(), sign: float = 1.0) -> complex:
    """Derivative of :func:`f_jk` in ``b`` by differentiation under the integral.

    Finite at ``b = a_i``; singular only at the endpoints ``a_j``, ``a_k``.

    In the angle variable this is ``-1/2 int_0^pi dtheta / (sqrt(g) (t - a_i))``
    with the same branch of ``sqrt(g)`` as in ``f_jk``.
    """
    b = complex(b)
    i = _check(roots, b, j, k)
    if min(abs(b - roots.a[j]), abs(b - roots.a[k])) <= GUARD * roots.diameter:
        raise BranchAmbiguityError("b coincides with an endpoint of the side; the derivative is singular")
    if _segments_cross(roots.a[i], b, roots.a[j], roots.a[k]):
        raise BranchAmbiguityError("continuation path from a_i to b crosses the integration segment")

    def value(m):
        t, vals, ai = _branch_values(roots, b, j, k, m, sign)
        return complex(-0.5 * np.pi / m * np.sum(1.0 / (vals * (t - ai))))

    return _with_refinement(value, rule)


def analytic_branch(roots: CubicRoots, b: complex, j: int, k: int, z) -> np.ndarray:
    """Single-valued branch of ``sqrt((b - z)/Q(z))`` cut along ``[b, a_i]`` and ``[a_j, a_k]``.

    Built from principal square roots only, behaves like ``-i/z`` at infinity.
    """
    i = third_index(j, k)
    aj, ak, ai = roots.a[j], roots.a[k], roots.a[i]
    mid, half = (aj + ak) / 2, (ak - aj) / 2
    z = np.asarray(z, dtype=complex)
    w = z - mid
    return -1j * np.sqrt((z - b) / (z - ai)) / (w * np.sqrt(1.0 - (half / w) ** 2))


def side_integral(roots: CubicRoots, b: complex, j: int, k: int, m: int = 400) -> complex:
    """``int_{a_j}^{a_k}`` of :func:`analytic_branch` taken on the right bank of the cut.

    Independent closed-form route to :func:`f_jk` (no continuation, principal
    roots only), valid while ``[b, a_i]`` does not meet the side.
    """
    i = third_index(j, k)
    aj, ak, ai = roots.a[j], roots.a[k], roots.a[i]
    t = (aj + ak) / 2 + (ak - aj) / 2 * np.cos(_angles(m))
    return complex(np.pi / m * np.sum(np.sqrt((t - b) / (t - ai))))


def tail_integral(roots: CubicRoots, b: complex, j: int, k: int, m: int = 400) -> complex:
    """``int_b^{a_i}`` of :func:`analytic_branch` along the right bank of ``[b, a_i]``.

    With ``t = b + d (1 - cos theta)/2``, ``d = a_i - b``, the boundary value
    is ``sqrt(s/(1-s)) / W(t)`` where ``W(t) = (t - m) sqrt(1 - h^2/(t - m)^2)``,
    and the endpoint singularities cancel against ``dt``.
    """
    i = third_index(j, k)
    aj, ak, ai = roots.a[j], roots.a[k], roots.a[i]
    mid, half = (aj + ak) / 2, (ak - aj) / 2
    d = ai - b
    th = _angles(m)
    t = b + d * (1 - np.cos(th)) / 2
    w = t - mid
    W = w * np.sqrt(1.0 - (half / w) ** 2)
    return complex(np.pi / m * np.sum(d * (1 - np.cos(th)) / 2 / W))


def loop_identities(roots: CubicRoots, b: complex, rule: ChebRule = ChebRule(400)) -> tuple[float, float]:
    """Residuals of the two interior identities at ``b``.

    ``r_pi = max_i |f_jk(b) + int_b^{a_i} - pi|`` and
    ``r_2pi = |f_12(b) + f_20(b) + f_01(b) - 2 pi|`` (sides in cyclic order).
    """
    b = complex(b)
    if not roots.triangle.contains(b, strict=True):
        raise BranchAmbiguityError("b must lie strictly inside the root triangle")
    sides = [(1, 2), (2, 0), (0, 1)]
    vals = [f_jk(roots, b, j, k, rule) for j, k in sides]
    r_pi = 0.0
    for (j, k), v in zip(sides, vals):
        tail = tail_integral(roots, b, j, k, rule.m)
        r_pi = max(r_pi, abs(v + tail - np.pi))
    r_2pi = abs(sum(vals) - 2 * np.pi)
    return float(r_pi), float(r_2pi)
