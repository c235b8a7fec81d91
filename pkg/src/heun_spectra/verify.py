"""Acceptance suite: the twelve numerical checks behind the package's claims.

Each check returns a :class:`CriterionResult` holding the measured values and
a pass/fail flag.  Checks that concern "the operator" run on the operator of
the :class:`SuiteConfig` (by default ``Q = z(z-1)(z-1+i)``, ``P = 0``); the
others use fixed reference inputs.  Spectral solves are cached so criteria
sharing a degree reuse one solve.
"""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from .abelian import ChebRule, CubicRoots, f_jk, loop_identities
from .errors import HeunSpectraError
from .locus import (
    arc_midpoint,
    build_gamma_q,
    distance_to_locus,
    find_b0,
    grid_b0,
    im_f,
    side_of,
)
from .measures import (
    DiscreteMeasure,
    balayage_gap,
    build_Mi,
    ct_ode_residual,
    ct_square_residual,
    derivative_potential_check,
)
from .poly import Polynomial, hull_distance
from .qdiff import QuadDiff, admits_positive, classify, enumerate_measures, heun_qdiff, singular_graph
from .spectral import (
    HeunOperator,
    nearest_pair,
    polya_check,
    solve,
    stieltjes_derivative_roots,
    stieltjes_roots,
    stieltjes_measure,
)

__all__ = [
    "BASE_CUBIC",
    "EQUILATERAL",
    "SCALENE",
    "TWO_FACES",
    "SuiteConfig",
    "CriterionResult",
    "SuiteReport",
    "CRITERIA",
    "run_criterion",
    "run_suite",
    "cached_solve",
]

BASE_CUBIC = (0j, 1 + 0j, 1 - 1j)
EQUILATERAL = tuple(complex(math.cos(2 * math.pi * k / 3), math.sin(2 * math.pi * k / 3)) for k in range(3))
SCALENE = (
    (0j, 2 + 0j, 0.3 + 1.1j),
    (-1 - 0.2j, 1.5 + 0.1j, 0.2 + 2j),
    (0.1 + 0.1j, 3 + 0.5j, 1 - 1.7j),
)
REAL3 = (-1 + 0j, 0j, 1 + 0j)
# zeros at +-1 and four simple poles: two bounded faces sharing one dividing edge
TWO_FACES = QuadDiff((1, -1), (0.5 + 0.5j, 0.5 - 0.5j, -0.5 + 0.5j, -0.5 - 0.5j))

PASS, FAIL, NOT_APPLICABLE = "pass", "fail", "n/a"


@dataclass(frozen=True)
class SuiteConfig:
    """Operator and tolerances of a verification run."""

    roots: tuple = BASE_CUBIC
    P: object = "zero"
    cluster_tol: float = 1e-7
    criteria: tuple = tuple(range(1, 13))

    def operator(self) -> HeunOperator:
        return HeunOperator.from_roots(self.roots, _P_arg(self.P))


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    status: str
    measured: dict
    seconds: float = field(default=0.0, compare=False)
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.status != FAIL

    def line(self) -> str:
        tag = {PASS: "PASS", FAIL: "FAIL", NOT_APPLICABLE: "N/A "}[self.status]
        extra = f"  error: {self.error}" if self.error else ""
        return f"[{tag}] criterion {self.number:2d} {self.title} ({self.seconds:.2f} s){extra}"

    def to_json(self) -> dict:
        d = asdict(self)
        d.pop("seconds")
        d["measured"] = _jsonable(self.measured)
        return d


@dataclass(frozen=True)
class SuiteReport:
    config: SuiteConfig
    results: tuple
    seconds: float = field(default=0.0, compare=False)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def summary(self) -> str:
        lines = [r.line() for r in self.results]
        n_fail = sum(r.status == FAIL for r in self.results)
        lines.append(f"{len(self.results) - n_fail}/{len(self.results)} criteria passed in {self.seconds:.1f} s")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "config": _jsonable(asdict(self.config)),
            "passed": self.passed,
            "criteria": [r.to_json() for r in self.results],
        }


def _P_arg(P):
    return P if isinstance(P, str) else list(P)


def _P_key(P):
    return P if isinstance(P, str) else tuple(complex(c) for c in P)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    return x


@lru_cache(maxsize=64)
def _solve_cached(roots: tuple, P, n: int, cluster_tol: float):
    return solve(HeunOperator.from_roots(roots, _P_arg(P)), n, cluster_tol=cluster_tol)


def cached_solve(cfg: SuiteConfig, n: int):
    """``solve`` for the suite operator, memoised on (roots, P, n, cluster_tol)."""
    return _solve_cached(tuple(complex(a) for a in cfg.roots), _P_key(cfg.P), n, cfg.cluster_tol)


@lru_cache(maxsize=8)
def _gamma(roots: tuple):
    r = CubicRoots(roots)
    return r, build_gamma_q(r)


def _outcome(ok: bool) -> str:
    return PASS if ok else FAIL


# --- criteria ---------------------------------------------------------------


def exact_count(cfg: SuiteConfig) -> dict:
    out = {}
    ok = True
    start = time.perf_counter()
    for n in (5, 10, 24):
        res = cached_solve(cfg, n)
        count = sum(p.multiplicity for p in res.pairs)
        worst = max(p.residual for p in res.pairs)
        out[f"n={n}"] = {"count": count, "max_residual": worst}
        ok &= count == n + 1 and worst <= 1e-8
    elapsed = time.perf_counter() - start
    out["within_5s"] = elapsed < 5.0
    return {"ok": ok and elapsed < 5.0, "measured": out}


def lame_n1(cfg: SuiteConfig) -> dict:
    op = HeunOperator.from_roots(REAL3, "lame")
    res = solve(op, 1)
    s3 = 1 / math.sqrt(3)
    pairs = sorted(res.pairs, key=lambda p: p.t.real)
    expected = (-s3, s3)
    t_err = max(abs(p.t - e) for p, e in zip(pairs, expected))
    # hand solution: comparing coefficients in (3z^2 - 1)/2 - (3/2)(z - t) S = 0 gives S = z + t
    s_err = max(float(np.max(np.abs(p.S.coefficients - np.array([e, 1])))) for p, e in zip(pairs, expected))
    ts = [p.t for p in pairs]
    return {"ok": t_err < 1e-10 and s_err < 1e-10 and len(res.pairs) == 2,
            "measured": {"t": ts, "t_error": t_err, "S_error": s_err}}


def integral_identities(cfg: SuiteConfig) -> dict:
    start = time.perf_counter()
    worst_pi = worst_loop = 0.0
    rule = ChebRule(400)
    for a in (BASE_CUBIC, EQUILATERAL, *SCALENE):
        r = CubicRoots(a)
        for i in range(3):
            j, k = side_of(i)
            worst_pi = max(worst_pi, abs(f_jk(r, r.a[i], j, k, rule) - math.pi))
        worst_loop = max(worst_loop, loop_identities(r, r.centroid, rule)[1])
    elapsed = time.perf_counter() - start
    return {"ok": worst_pi < 1e-10 and worst_loop < 1e-8 and elapsed < 2.0,
            "measured": {"max_f_at_opposite_root_error": worst_pi, "max_loop_error": worst_loop,
                         "within_2s": elapsed < 2.0}}


def triple_point(cfg: SuiteConfig) -> dict:
    b_eq = find_b0(CubicRoots(EQUILATERAL))
    r = CubicRoots(BASE_CUBIC)
    b0 = find_b0(r)
    resid = max(abs(im_f(r, b0, i, ChebRule(400))) for i in range(3))
    inside = r.triangle.contains(b0, strict=True) and r.triangle.boundary_distance(b0) > 0
    oracle = grid_b0(r)
    gap = abs(oracle - b0)
    return {"ok": abs(b_eq) < 1e-10 and resid < 1e-10 and inside and gap < 1e-8,
            "measured": {"equilateral_b0": abs(b_eq), "b0": b0, "max_residual": resid,
                         "strictly_inside": inside, "grid_oracle_gap": gap}}


def support_convergence(cfg: SuiteConfig) -> dict:
    start = time.perf_counter()
    r, gq = _gamma(tuple(complex(a) for a in cfg.roots))
    dist = {}
    for n in (12, 48, 96):
        res = cached_solve(cfg, n)
        dist[n] = max(distance_to_locus(gq, t) for t in res.t_roots)
    elapsed = time.perf_counter() - start
    d = [dist[n] for n in (12, 48, 96)]
    ok = d[0] > d[1] > d[2] and d[2] < 0.05 * r.diameter and elapsed < 60.0
    return {"ok": ok, "measured": {"max_distance": {f"n={n}": v for n, v in dist.items()},
                                   "bound": 0.05 * r.diameter, "within_60s": elapsed < 60.0}}


def kpsi_structure(cfg: SuiteConfig) -> dict:
    r, gq = _gamma(BASE_CUBIC)
    tol = 1e-6 * r.diameter
    out = {}
    ok = True
    for i in range(3):
        b = arc_midpoint(r, gq, i)
        g = singular_graph(heun_qdiff(r, b))
        ids = {s.pos: s.id for s in g.vertices}
        j, k = side_of(i)
        shape = (
            len(g.edges) == 3
            and len(g.edges_between(ids[r.a[j]], ids[r.a[k]])) == 1
            and len(g.edges_between(ids[r.a[i]], ids[b])) == 1
            and len(g.edges_between(ids[b], ids[b])) == 1
        )
        gap = g.max_gap()
        out[f"gamma_{i + 1}"] = {"b": b, "is_strebel": g.is_strebel, "edges": len(g.edges),
                                 "expected_shape": shape, "max_gap": gap}
        ok &= g.is_strebel and shape and gap < tol
    g = singular_graph(heun_qdiff(r, gq.b0))
    zero = next(s.id for s in g.vertices if s.kind == "zero")
    tripod = len(g.edges) == 3 and all(zero in e.endpoints for e in g.edges)
    out["b0"] = {"is_strebel": g.is_strebel, "edges": len(g.edges), "three_edges_to_b0": tripod,
                 "max_gap": g.max_gap()}
    ok &= g.is_strebel and tripod and g.max_gap() < tol
    return {"ok": ok, "measured": out}


def signed_measures(cfg: SuiteConfig) -> dict:
    r, gq = _gamma(BASE_CUBIC)
    qd = heun_qdiff(r, arc_midpoint(r, gq, 0))
    g = classify(singular_graph(qd))
    specs = enumerate_measures(qd, g)
    masses = [s.discretize().total_mass for s in specs]
    n_pos = sum(s.all_positive for s in specs)
    on_locus = {"specs": len(specs), "masses": masses, "all_positive": n_pos, "admits_positive": admits_positive(g)}
    ok9 = len(specs) == 2 and all(abs(m - 1) < 1e-4 for m in masses) and n_pos == 1 and admits_positive(g)
    g2 = classify(singular_graph(TWO_FACES))
    specs2 = enumerate_measures(TWO_FACES, g2)
    two_faces = {"specs": len(specs2), "admits_positive": admits_positive(g2)}
    ok2 = len(specs2) == 4 and not admits_positive(g2)
    return {"ok": ok9 and ok2, "measured": {"on_locus": on_locus, "two_faces": two_faces}}


def _far_points(r: CubicRoots, count: int = 8) -> list[complex]:
    radius = max(abs(a - r.centroid) for a in r.a) + 1.0
    return [r.centroid + radius * np.exp(2j * np.pi * k / count) for k in range(count)]


def limit_law(cfg: SuiteConfig) -> dict:
    r, gq = _gamma(tuple(complex(a) for a in cfg.roots))
    if gq.degenerate:
        return {"status": NOT_APPLICABLE, "measured": {"reason": "collinear roots: the arcs of the locus are not defined"}}
    op = cfg.operator()
    bt = arc_midpoint(r, gq, 0)
    Vt = Polynomial([-bt, 1])
    pts = _far_points(r)
    min_dist = min(hull_distance(r.triangle, z) for z in pts)
    worst = {}
    for n in (25, 200):
        m = stieltjes_measure(nearest_pair(cached_solve(cfg, n), bt))
        worst[n] = max(ct_square_residual(m, Vt, op.Q, z) for z in pts)
    qd = heun_qdiff(r, bt)
    specs = [s for s in enumerate_measures(qd, classify(singular_graph(qd))) if s.all_positive]
    spec_res = max(ct_square_residual(specs[0].discretize(), Vt, op.Q, z) for z in pts) if specs else math.inf
    ok = min_dist >= 1 and worst[200] < 0.5 * worst[25] and spec_res < 1e-3
    return {"ok": ok, "measured": {"b_tilde": bt, "min_distance_to_hull": min_dist,
                                   "residual": {f"n={n}": v for n, v in worst.items()},
                                   "ratio": worst[200] / worst[25], "positive_spec_residual": spec_res}}


def ct_equation(cfg: SuiteConfig) -> dict:
    op = cfg.operator()
    pts = (5 + 0j, 5j, -4 - 4j)
    vals = {n: [abs(ct_ode_residual(cached_solve(cfg, n).measure, op.Q, z)) for z in pts] for n in (25, 200)}
    decrease = all(b < a for a, b in zip(vals[25], vals[200]))
    Q = Polynomial([0, -1, 0, 1])
    delta = DiscreteMeasure([0j], [1.0])
    closed = max(abs(ct_ode_residual(delta, Q, z) + 1 / z**2) for z in pts)
    return {"ok": decrease and closed < 1e-12,
            "measured": {"residual": {f"n={n}": v for n, v in vals.items()}, "delta_closed_form_error": closed}}


def balayage(cfg: SuiteConfig) -> dict:
    r = CubicRoots(cfg.roots)
    ring = [r.centroid + 10 * r.diameter * np.exp(2j * np.pi * k / 32) for k in range(32)]
    M = [build_Mi(r.a, i, tau_nodes=400, slice_nodes=200) for i in range(3)]
    pair_gaps = {f"M{i + 1}-M{j + 1}": balayage_gap(M[i], M[j], ring) for i in range(3) for j in range(i + 1, 3)}
    mu = {n: balayage_gap(M[0], cached_solve(cfg, n).measure, ring) for n in (25, 200)}
    ok = max(pair_gaps.values()) < 1e-4 and mu[200] < mu[25]
    return {"ok": ok, "measured": {"pairwise": pair_gaps, "M1-mu": {f"n={n}": v for n, v in mu.items()}}}


def real_stieltjes(cfg: SuiteConfig) -> dict:
    op = HeunOperator.from_roots(REAL3, "lame")
    res = solve(op, 8)
    ts = [p.t for p in res.pairs for _ in range(p.multiplicity)]
    real = all(abs(t.imag) < 1e-9 and -1 < t.real < 1 for t in ts)
    counts = []
    for p in res.pairs:
        rs = stieltjes_roots(p)
        counts.append(sum(1 for z in rs if abs(z.imag) < 1e-9 and -1 < z.real < 0))
    polya = polya_check(op, res, tol=1e-9)
    ok = len(ts) == 9 and real and sorted(counts) == list(range(9)) and polya is True
    return {"ok": ok, "measured": {"t": ts, "counts_in_(-1,0)": counts, "polya": polya}}


def potential_inequality(cfg: SuiteConfig) -> dict:
    r, gq = _gamma(tuple(complex(a) for a in cfg.roots))
    target = r.centroid if gq.degenerate else arc_midpoint(r, gq, 0)
    pair = nearest_pair(cached_solve(cfg, 100), target)
    rs = stieltjes_roots(pair)
    rd = stieltjes_derivative_roots(pair)
    avoid = np.array(rs + rd)
    half = 2 * r.diameter
    xs = np.linspace(r.centroid.real - half, r.centroid.real + half, 30)
    ys = np.linspace(r.centroid.imag - half, r.centroid.imag + half, 30)
    grid = [complex(x, y) for x in xs for y in ys if np.min(np.abs(avoid - complex(x, y))) > 1e-2]
    rep = derivative_potential_check(pair.S, grid, roots_p=rs, roots_dp=rd)
    return {"ok": rep.passed,
            "measured": {"grid_points": len(grid), "far_points": int(rep.far.sum()),
                         "max_excess": rep.max_excess, "max_far_gap": rep.max_far_gap,
                         "inequality": rep.passed_inequality, "far_field": rep.passed_far_field}}


CRITERIA = {
    1: ("exact Van Vleck count", exact_count),
    2: ("Lame n = 1 by hand", lame_n1),
    3: ("integral identities", integral_identities),
    4: ("triple point b0", triple_point),
    5: ("support convergence to the locus", support_convergence),
    6: ("structure of the singular graph", kpsi_structure),
    7: ("signed-measure enumeration", signed_measures),
    8: ("limit law C^2 = V/Q", limit_law),
    9: ("Cauchy-transform equation residual", ct_equation),
    10: ("balayage of M_i", balayage),
    11: ("real Stieltjes case", real_stieltjes),
    12: ("derivative potential inequality", potential_inequality),
}


def run_criterion(number: int, cfg: SuiteConfig) -> CriterionResult:
    title, fn = CRITERIA[number]
    start = time.perf_counter()
    try:
        out = fn(cfg)
        status = out.get("status") or _outcome(out["ok"])
        measured, error = out["measured"], None
    except HeunSpectraError as exc:
        status, measured, error = FAIL, {}, f"{type(exc).__name__}: {exc}"
    return CriterionResult(number, title, status, measured, time.perf_counter() - start, error)


def run_suite(cfg: SuiteConfig = SuiteConfig(), progress=None) -> SuiteReport:
    """Run the selected criteria in order; ``progress`` receives each result as it lands."""
    start = time.perf_counter()
    results = []
    for number in cfg.criteria:
        res = run_criterion(number, cfg)
        results.append(res)
        if progress is not None:
            progress(res)
    return SuiteReport(cfg, tuple(results), time.perf_counter() - start)
