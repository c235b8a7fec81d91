"""The limit locus: curves ``gamma_i = {Im f_jk = 0}``, their triple point and Gamma_Q.

For root index ``i`` the curve ``gamma_i`` uses the opposite side ``(j, k)``
with ``j < k``.  ``Gamma_i`` is the piece of ``gamma_i`` from ``a_i`` to the
common point ``b_0`` of the three curves.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .abelian import ChebRule, CubicRoots, f_jk, f_jk_prime
from .errors import BranchAmbiguityError, HeunSpectraError, RefineRuleError, TraceError
from .poly import segment_distance

__all__ = [
    "LocusArc",
    "GammaQ",
    "side_of",
    "im_f",
    "trace_gamma",
    "find_b0",
    "grid_b0",
    "build_gamma_q",
    "distance_to_locus",
    "unique_b_on_line",
    "point_at_fraction",
    "project_onto",
    "arc_midpoint",
]

NEWTON_TOL = 1e-12


def side_of(i: int) -> tuple[int, int]:
    """The side ``(j, k)``, ``j < k``, opposite root ``i``."""
    j, k = sorted({0, 1, 2} - {i})
    return j, k


def im_f(roots: CubicRoots, b: complex, i: int, rule: ChebRule = ChebRule()) -> float:
    j, k = side_of(i)
    return f_jk(roots, b, j, k, rule).imag


@dataclass(frozen=True, eq=False)
class LocusArc:
    """Polyline approximation of ``Gamma_i`` starting at ``a_i``."""

    i: int
    points: np.ndarray
    arc_tol: float

    @property
    def length(self) -> float:
        return float(np.sum(np.abs(np.diff(self.points))))


@dataclass(frozen=True, eq=False)
class GammaQ:
    arcs: tuple
    b0: complex
    degenerate: bool = False

    def polylines(self) -> list[np.ndarray]:
        return [a.points for a in self.arcs]

    def to_json(self) -> dict:
        return {
            "b0": [self.b0.real, self.b0.imag],
            "arcs": [[[z.real, z.imag] for z in a.points] for a in self.arcs],
        }


def _newton_onto(roots, p, i, rule, arc_tol, max_iter=12):
    j, k = side_of(i)
    for _ in range(max_iter):
        f = f_jk(roots, p, j, k, rule)
        if abs(f.imag) < arc_tol:
            return p
        d = f_jk_prime(roots, p, j, k, rule)
        if abs(d) < 1e-12:
            raise TraceError("stalled trace: |f'| vanishes", last_point=p)
        # move along i * conj(f') / |f'|, where Im f grows at rate |f'|
        p = p - f.imag / abs(d) * (1j * d.conjugate() / abs(d))
    raise TraceError("corrector did not converge", last_point=p, diagnostics={"residual": abs(f.imag)})


def trace_gamma(
    roots: CubicRoots,
    i: int,
    step: float | None = None,
    arc_tol: float = 1e-10,
    stop=None,
    rule: ChebRule = ChebRule(),
    max_vertices: int | None = None,
) -> LocusArc:
    """Predictor-corrector trace of ``gamma_i`` from ``a_i`` into the triangle.

    ``stop(p_prev, p_cur)`` may return a replacement end point (or ``None`` to
    continue); without it the trace runs until it comes within one step of
    the boundary of the triangle.
    """
    if roots.collinear:
        raise HeunSpectraError("trace_gamma needs non-collinear roots")
    diam = roots.diameter
    step = diam / 200 if step is None else step
    max_vertices = max_vertices or int(8 * diam / step) + 10
    j, k = side_of(i)
    tri = roots.triangle
    p = roots.a[i]
    pts = [p]
    inside = False
    d = f_jk_prime(roots, p, j, k, rule)
    v = d.conjugate() / abs(d)
    if not tri.contains(p + 1e-3 * diam * v):
        v = -v
    while len(pts) < max_vertices:
        h = step
        while True:
            try:
                q = _newton_onto(roots, p + h * v, i, rule, arc_tol)
            except (TraceError, BranchAmbiguityError, RefineRuleError) as exc:
                if h < step / 8:
                    raise TraceError("corrector divergence", last_point=p, diagnostics={"cause": str(exc)})
                h /= 2
                continue
            if step / 4 <= abs(q - p) <= 2 * step or h < step / 8:
                break
            h /= 2
        if stop is not None:
            end = stop(p, q)
            if end is not None:
                if abs(end - pts[-1]) < step / 4 and len(pts) > 1:
                    pts.pop()
                pts.append(end)
                return LocusArc(i, np.array(pts), arc_tol)
        margin = tri.boundary_distance(q) if tri.contains(q) else 0.0
        inside = inside or margin > 2 * step
        if stop is None and inside and margin < step:
            # the integrand degenerates on the far side; stop one step short of it
            return LocusArc(i, np.array(pts + [q]), arc_tol)
        if not tri.contains(q):
            raise TraceError("trace left the triangle before the stopping condition fired", last_point=q)
        dq = f_jk_prime(roots, q, j, k, rule)
        if abs(dq) < 1e-12:
            raise TraceError("stalled trace: |f'| vanishes", last_point=q)
        w = dq.conjugate() / abs(dq)
        v = w if (w * v.conjugate()).real >= 0 else -w
        pts.append(q)
        p = q
    raise TraceError("vertex cap reached", last_point=p)


def _companion_stop(roots, i, rule, arc_tol, b0):
    """Stop when the companion condition of ``gamma_{i+1}`` changes sign."""
    c = (i + 1) % 3

    def stop(p, q):
        fp, fq = im_f(roots, p, c, rule), im_f(roots, q, c, rule)
        if fp == 0.0:
            return p
        if np.sign(fp) == np.sign(fq):
            return None
        lo, hi = p, q
        for _ in range(60):
            mid = _newton_onto(roots, (lo + hi) / 2, i, rule, arc_tol)
            if np.sign(im_f(roots, mid, c, rule)) == np.sign(fp):
                lo = mid
            else:
                hi = mid
            if abs(hi - lo) < arc_tol:
                break
        crossing = (lo + hi) / 2
        if b0 is not None and abs(crossing - b0) > 1e-6 * roots.diameter:
            raise TraceError("companion crossing disagrees with b0", last_point=crossing,
                             diagnostics={"b0": b0, "crossing": crossing})
        return b0 if b0 is not None else crossing

    return stop


def _F(roots, b, rule):
    return np.array([im_f(roots, b, 0, rule), im_f(roots, b, 1, rule)])


def find_b0(roots: CubicRoots, newton_tol: float = NEWTON_TOL, rule: ChebRule = ChebRule(400)) -> complex:
    """Common point of the three curves by 2-D Newton from the centroid.

    Falls back to :func:`grid_b0` if Newton leaves the triangle or stalls.
    """
    if roots.collinear:
        raise HeunSpectraError("find_b0 needs non-collinear roots")
    tri = roots.triangle
    b = roots.centroid
    for _ in range(40):
        F = _F(roots, b, rule)
        if np.max(np.abs(F)) < newton_tol and abs(im_f(roots, b, 2, rule)) < newton_tol:
            return b
        J = np.empty((2, 2))
        for r, i in enumerate((0, 1)):
            j, k = side_of(i)
            d = f_jk_prime(roots, b, j, k, rule)
            J[r] = [d.imag, d.real]
        dx, dy = np.linalg.solve(J, -F)
        b = b + complex(dx, dy)
        if not tri.contains(b, strict=True):
            break
    return _polish(roots, grid_b0(roots), newton_tol, rule)


def _polish(roots, b, newton_tol, rule):
    for _ in range(10):
        F = _F(roots, b, rule)
        if np.max(np.abs(F)) < newton_tol:
            break
        J = np.empty((2, 2))
        for r, i in enumerate((0, 1)):
            d = f_jk_prime(roots, b, *side_of(i), rule)
            J[r] = [d.imag, d.real]
        b = b + complex(*np.linalg.solve(J, -F))
    return b


def grid_b0(roots: CubicRoots, tol: float | None = None, rule: ChebRule = ChebRule(400, adaptive=False)) -> complex:
    """Quadtree search for the common zero of ``Im f`` on two sides.

    A cell survives while both functions change sign over a 3x3 sample
    pattern.  Uses only function values, no derivatives.
    """
    diam = roots.diameter
    tol = 1e-10 * diam if tol is None else tol
    noise = 1e-13
    tri = roots.triangle
    xs = [z.real for z in roots.a]
    ys = [z.imag for z in roots.a]
    cells = []
    n0 = 8
    hx = (max(xs) - min(xs)) / n0
    hy = (max(ys) - min(ys)) / n0
    for a in range(n0):
        for c in range(n0):
            cells.append((min(xs) + a * hx, min(ys) + c * hy, hx, hy))

    def sample(x, y):
        z = complex(x, y)
        if not tri.contains(z) or min(abs(z - r) for r in roots.a) < 1e-12 * diam:
            return None
        try:
            return _F(roots, z, rule)
        except HeunSpectraError:
            return None

    cache = {}

    def value(x, y):
        key = (x, y)
        if key not in cache:
            cache[key] = sample(x, y)
        return cache[key]

    def changes(x0, y0, wx, wy):
        vals = [value(x0 + a * wx / 2, y0 + c * wy / 2) for a in range(3) for c in range(3)]
        vals = [v for v in vals if v is not None]
        if len(vals) < 2:
            return False
        V = np.array(vals)
        # values below the quadrature noise floor count as either sign
        return all((V[:, r] <= noise).any() and (V[:, r] >= -noise).any() for r in range(2))

    while True:
        cells = [c for c in cells if changes(*c)]
        if not cells:
            raise HeunSpectraError("grid bisection found no sign-consistent cell; quadrature failure")
        if max(max(c[2], c[3]) for c in cells) < tol:
            break
        cells = [
            (x + a * wx / 2, y + c * wy / 2, wx / 2, wy / 2)
            for (x, y, wx, wy) in cells
            for a in range(2)
            for c in range(2)
        ]
        if len(cells) > 4096:
            raise HeunSpectraError("grid bisection does not localise; quadrature failure")
    centers = [complex(x + wx / 2, y + wy / 2) for (x, y, wx, wy) in cells]
    return sum(centers) / len(centers)


def _degenerate(roots: CubicRoots) -> GammaQ:
    a = roots.a
    u = (a[1] - a[0]) / abs(a[1] - a[0])
    order = sorted(range(3), key=lambda r: ((a[r] - a[0]) / u).real)
    lo, mid, hi = order
    arcs = [None] * 3
    arcs[lo] = LocusArc(lo, np.array([a[lo], a[mid]]), 0.0)
    arcs[hi] = LocusArc(hi, np.array([a[hi], a[mid]]), 0.0)
    arcs[mid] = LocusArc(mid, np.array([a[mid]]), 0.0)
    return GammaQ(tuple(arcs), a[mid], degenerate=True)


def build_gamma_q(
    roots: CubicRoots,
    step: float | None = None,
    arc_tol: float = 1e-10,
    rule: ChebRule = ChebRule(),
    newton_tol: float = NEWTON_TOL,
) -> GammaQ:
    """Three arcs ``a_i -> b_0``; collinear roots give the segment split at the middle root."""
    if roots.collinear:
        return _degenerate(roots)
    b0 = find_b0(roots, newton_tol=newton_tol)
    arcs = tuple(
        trace_gamma(roots, i, step, arc_tol, stop=_companion_stop(roots, i, rule, arc_tol, b0), rule=rule)
        for i in range(3)
    )
    return GammaQ(arcs, b0)


def distance_to_locus(gq: GammaQ, z: complex) -> float:
    best = np.inf
    for arc in gq.arcs:
        p = arc.points
        if p.size == 1:
            best = min(best, abs(z - p[0]))
        for a, b in zip(p[:-1], p[1:]):
            best = min(best, segment_distance(z, a, b))
    return float(best)


def _clip_line(tri_pts, b, u):
    """Parameter interval of ``b + s u`` inside the triangle."""
    lo, hi = -np.inf, np.inf
    a = tri_pts
    orient = ((a[1] - a[0]).conjugate() * (a[2] - a[0])).imag
    for p, q in ((a[0], a[1]), (a[1], a[2]), (a[2], a[0])):
        e = q - p
        # inside: sign(orient) * cross(e, z - p) >= 0
        c0 = np.sign(orient) * (e.conjugate() * (b - p)).imag
        c1 = np.sign(orient) * (e.conjugate() * u).imag
        if abs(c1) < 1e-300:
            if c0 < 0:
                return None
            continue
        s = -c0 / c1
        if c1 > 0:
            lo = max(lo, s)
        else:
            hi = min(hi, s)
    return (lo, hi) if lo < hi else None


def unique_b_on_line(roots: CubicRoots, b_ref: complex, j: int, k: int, rule: ChebRule = ChebRule(400)) -> complex:
    """Point of the line through ``b_ref`` parallel to ``(a_j, a_k)`` where ``Im f_jk = 0``."""
    if roots.collinear:
        raise HeunSpectraError("unique_b_on_line needs non-collinear roots")
    u = (roots.a[k] - roots.a[j]) / abs(roots.a[k] - roots.a[j])
    span = _clip_line(roots.a, complex(b_ref), u)
    if span is None:
        raise HeunSpectraError("reference point is outside the triangle")
    diam = roots.diameter
    lo, hi = span[0] + 1e-9 * diam, span[1] - 1e-9 * diam

    def g(s):
        return f_jk(roots, b_ref + s * u, j, k, rule).imag

    glo, ghi = g(lo), g(hi)
    if np.sign(glo) == np.sign(ghi):
        raise HeunSpectraError("no sign change of Im f_jk along the line; quadrature inconsistency")
    for _ in range(200):
        mid = (lo + hi) / 2
        gm = g(mid)
        if gm == 0.0:
            lo = hi = mid
            break
        if np.sign(gm) == np.sign(glo):
            lo, glo = mid, gm
        else:
            hi = mid
        if hi - lo < 1e-15 * diam:
            break
    return complex(b_ref + (lo + hi) / 2 * u)


def point_at_fraction(arc: LocusArc, frac: float) -> complex:
    """Point at fraction ``frac`` of the arclength of a polyline."""
    p = arc.points
    seg = np.abs(np.diff(p))
    target = frac * seg.sum()
    acc = 0.0
    for a, b, L in zip(p[:-1], p[1:], seg):
        if acc + L >= target:
            return complex(a + (b - a) * ((target - acc) / L if L else 0.0))
        acc += L
    return complex(p[-1])


def project_onto(roots: CubicRoots, p: complex, i: int, rule: ChebRule = ChebRule(400), tol: float = 1e-13) -> complex:
    """Newton projection of a nearby point onto ``gamma_i`` (``|Im f| < tol``)."""
    return _newton_onto(roots, complex(p), i, rule, tol)


def arc_midpoint(roots: CubicRoots, gq: GammaQ, i: int, rule: ChebRule = ChebRule(400)) -> complex:
    """Arclength midpoint of ``Gamma_i``, corrected back onto the exact curve."""
    arc = next(a for a in gq.arcs if a.i == i)
    p = point_at_fraction(arc, 0.5)
    if gq.degenerate:
        return p
    return project_onto(roots, p, i, rule)
