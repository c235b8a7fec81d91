import cmath
import math

import numpy as np
import pytest

from heun_spectra.abelian import CubicRoots
from heun_spectra.errors import NotStrebelError, TraceError, UnsupportedConfiguration
from heun_spectra.locus import arc_midpoint, build_gamma_q, point_at_fraction, project_onto
from heun_spectra.measures import cauchy
from heun_spectra.qdiff import (
    HORIZONTAL,
    VERTICAL,
    QuadDiff,
    SingularPoint,
    TraceControls,
    admits_positive,
    classify,
    enumerate_measures,
    heun_qdiff,
    launch_directions,
    singular_graph,
    trace,
    trace_from,
)
from heun_spectra.qdiff.graph import INCONCLUSIVE, hausdorff
from heun_spectra.qdiff.trace import CLOSED, HIT, _heading_field

from conftest import EQUILATERAL, BASE_CUBIC, REAL3

TWO_FACES = QuadDiff((1, -1), (0.5 + 0.5j, 0.5 - 0.5j, -0.5 + 0.5j, -0.5 - 0.5j))


@pytest.fixture(scope="module")
def base():
    r = CubicRoots(BASE_CUBIC)
    return r, build_gamma_q(r)


def _pole(qd, pos):
    return next(s for s in qd.singular if s.kind == "pole" and abs(s.pos - pos) < 1e-14)


def _classified(qd):
    return classify(singular_graph(qd))


# --- local theory -----------------------------------------------------------


def test_cancellation():
    qd = heun_qdiff(REAL3, 0)
    assert qd.zeros == ()
    for z in (2 + 1j, -0.3j, 3.0):
        assert qd.R(z) == pytest.approx(-1 / ((z - 1) * (z + 1)), rel=1e-14)
    qd = heun_qdiff(BASE_CUBIC, 0.5 - 0.2j)
    z = 2 + 3j
    assert qd.R(z) == pytest.approx((0.5 - 0.2j - z) / (z * (z - 1) * (z - 1 + 1j)), rel=1e-14)


def test_validation():
    with pytest.raises(ValueError):
        QuadDiff((0,), (1, 2))
    with pytest.raises(UnsupportedConfiguration):
        QuadDiff((), (1, 1))
    with pytest.raises(UnsupportedConfiguration):
        launch_directions(TWO_FACES, SingularPoint(0, 1, "zero", order=2))


def test_equilateral_zero_directions_symmetric():
    qd = heun_qdiff(EQUILATERAL, 0)
    zero = qd.singular[0]
    dirs = sorted(launch_directions(qd, zero), key=cmath.phase)
    for a, b in zip(dirs, dirs[1:] + dirs[:1]):
        assert b == pytest.approx(a * cmath.exp(2j * math.pi / 3), abs=1e-14)


def test_pole_direction_formula_points_inside():
    r = CubicRoots(BASE_CUBIC)
    b = r.centroid
    qd = heun_qdiff(r, b)
    (d,) = launch_directions(qd, _pole(qd, 0))
    # angle of (a_i - a_j) + angle of (a_k - a_j) - angle of (b - a_j), at a_j = 0
    expected = cmath.exp(1j * (cmath.phase(1) + cmath.phase(1 - 1j) - cmath.phase(b)))
    assert d == pytest.approx(expected, abs=1e-14)
    assert r.triangle.contains(1e-3 * d, strict=True)
    (v,) = launch_directions(qd, _pole(qd, 0), VERTICAL)
    assert v == pytest.approx(-d, abs=1e-14)
    assert not r.triangle.contains(1e-3 * v)


def test_zero_direction_formulas():
    r = CubicRoots(BASE_CUBIC)
    b = 0.6 - 0.3j
    qd = heun_qdiff(r, b)
    zero = qd.singular[0]
    phis = sum(cmath.phase(a - b) for a in r.a)
    horiz = [cmath.exp(1j * (phis + 2 * math.pi * m) / 3) for m in range(3)]
    vert = [cmath.exp(1j * (phis + math.pi * (1 + 2 * m)) / 3) for m in range(3)]
    got_h = launch_directions(qd, zero)
    got_v = launch_directions(qd, zero, VERTICAL)
    for d in got_h:
        assert min(abs(d - h) for h in horiz) < 1e-13
        assert (qd.R(b + 1e-6 * d) * d * d).real > 0  # R dz^2 > 0 along horizontal rays
    for d in got_v:
        assert min(abs(d - v) for v in vert) < 1e-13
        assert (qd.R(b + 1e-6 * d) * d * d).real < 0


# --- tracing ----------------------------------------------------------------


def test_straight_segment_when_b_is_a_root():
    r = CubicRoots(BASE_CUBIC)
    qd = heun_qdiff(r, r.a[0])
    s = _pole(qd, 1)
    seg = trace_from(qd, s, 0, launch_directions(qd, s)[0])
    assert seg.terminal == HIT
    assert qd.singular[seg.target].pos == 1 - 1j
    assert np.max(np.abs(seg.points.real - 1)) < 1e-9
    assert seg.w[-1].real == pytest.approx(math.pi, abs=1e-7)


def test_trace_on_locus_hits_opposite_root(base):
    r, gq = base
    for i in range(3):
        b = arc_midpoint(r, gq, i)
        qd = heun_qdiff(r, b)
        j, k = [m for m in range(3) if m != i]
        s = _pole(qd, r.a[j])
        seg = trace_from(qd, s, 0, launch_directions(qd, s)[0])
        assert seg.terminal == HIT
        assert qd.singular[seg.target].pos == r.a[k]
        assert seg.gap < 1e-6 * qd.diameter
        assert np.min(np.abs(seg.points - b)) > 1e-3 * r.diameter


def test_off_locus_trajectory_leaves_triangle():
    r = CubicRoots(BASE_CUBIC)
    qd = heun_qdiff(r, 0.6 - 0.2j)
    left = False
    for s in qd.singular[1:]:
        seg = trace_from(qd, s, 0, launch_directions(qd, s)[0], controls=TraceControls(max_length=5))
        left |= any(not r.triangle.contains(p) for p in seg.points[1:])
    assert left


def test_far_b_trajectory_leaves_triangle():
    r = CubicRoots(BASE_CUBIC)
    qd = heun_qdiff(r, 3 + 2j)
    ctl = TraceControls(max_length=5)
    outs = []
    for s in qd.singular:
        if s.kind != "pole":
            continue
        seg = trace_from(qd, s, 0, launch_directions(qd, s)[0], controls=ctl)
        outs.append(any(not r.triangle.contains(p) for p in seg.points[1:]))
    assert any(outs)


def test_level_conservation(base):
    r, gq = base
    qd = heun_qdiff(r, arc_midpoint(r, gq, 0))
    for s in qd.singular:
        for n, d in enumerate(launch_directions(qd, s)):
            seg = trace_from(qd, s, n, d)
            body = seg.w[1:-1]
            assert np.max(np.abs(body.imag - body[0].imag)) < 1e-6 * seg.length


def test_closed_trajectory_near_infinity():
    r = CubicRoots(BASE_CUBIC)
    qd = heun_qdiff(r, 0.6 - 0.2j)
    rh = max(abs(a - r.centroid) for a in r.a)
    z = r.centroid + 3 * rh * cmath.exp(0.3j)
    seg = trace(qd, z, _heading_field(qd, z, HORIZONTAL))
    assert seg.terminal == CLOSED
    assert np.ptp(seg.w.imag) < 1e-10


def test_vertical_trajectories_escape():
    r = CubicRoots(BASE_CUBIC)
    qd = heun_qdiff(r, r.centroid)
    s = _pole(qd, 1)
    seg = trace_from(qd, s, 0, launch_directions(qd, s, VERTICAL)[0], VERTICAL)
    assert seg.terminal == "escaped"
    assert np.ptp(seg.w.real[1:]) < 1e-9


def test_step_collapse_error():
    qd = heun_qdiff(BASE_CUBIC, 0.5 - 0.3j)
    with pytest.raises(TraceError):
        trace(qd, qd.singular[1].pos, 1 + 0j)


def test_reversibility(base):
    r, gq = base
    qd = heun_qdiff(r, arc_midpoint(r, gq, 1))
    g = singular_graph(qd)
    assert g.diagnostics["reversibility"] < 1e-5
    loop = next(e for e in g.edges if e.endpoints == (0, 0))
    other = trace_from(qd, qd.singular[0], loop.head[1], launch_directions(qd, qd.singular[0])[loop.head[1]])
    assert hausdorff(loop.polyline, other.points) < 1e-5 * qd.diameter


# --- graph structure --------------------------------------------------------


def test_structure_on_locus_midpoints(base):
    r, gq = base
    for i in range(3):
        b = arc_midpoint(r, gq, i)
        g = _classified(heun_qdiff(r, b))
        assert g.is_strebel and g.d == 2 and g.euler_ok
        assert g.max_gap() < 1e-6 * r.diameter
        j, k = [m for m in range(3) if m != i]
        ids = {s.pos: s.id for s in g.vertices}
        zero = ids[b]
        assert len(g.edges) == 3
        (jk,) = g.edges_between(ids[r.a[j]], ids[r.a[k]])
        (ib,) = g.edges_between(ids[r.a[i]], zero)
        (loop,) = g.edges_between(zero, zero)
        assert loop.dividing and not jk.dividing and not jk.preventing
        assert not ib.dividing and not ib.preventing
        assert sorted(f.depth for f in g.faces) == [0, 1]
        assert jk.w_length + ib.w_length == pytest.approx(math.pi, abs=1e-6)
        assert loop.w_length == pytest.approx(2 * jk.w_length, abs=1e-6)


def test_structure_sampled_along_locus(base):
    r, gq = base
    fracs = [0.1, 0.3, 0.5, 0.7, 0.9]
    for i, f in [(0, fracs[0]), (0, fracs[3]), (1, fracs[1]), (1, fracs[2]), (1, fracs[4]),
                 (2, fracs[0]), (2, fracs[1]), (2, fracs[2]), (2, fracs[3]), (0, fracs[4])]:
        b = project_onto(r, point_at_fraction(gq.arcs[i], f), i)
        g = singular_graph(heun_qdiff(r, b))
        assert g.is_strebel, (i, f)
        assert len(g.edges) == 3 and g.d == 2
        assert g.max_gap() < 1e-6 * r.diameter


def test_tripod_at_b0(base):
    r, gq = base
    g = _classified(heun_qdiff(r, gq.b0))
    assert g.is_strebel and g.d == 1 and g.euler_ok
    assert sorted(sorted(e.endpoints) for e in g.edges) == [[0, 1], [0, 2], [0, 3]]
    assert admits_positive(g)


def test_single_edge_case():
    g = _classified(heun_qdiff(BASE_CUBIC, 0))
    assert g.is_strebel and g.d == 1 and len(g.edges) == 1
    (e,) = g.edges
    assert not e.dividing and not e.preventing
    assert admits_positive(g)


def test_two_faces_topology():
    g = _classified(TWO_FACES)
    assert g.is_strebel and g.d == 3 and g.euler_ok
    depths = sorted(f.depth for f in g.faces)
    assert depths == [0, 1, 1]
    middle = [e for e in g.edges if e.dividing
              and g.faces[g.dart_face[(e.id, 1)]].bounded and g.faces[g.dart_face[(e.id, -1)]].bounded]
    assert len(middle) == 1
    assert not admits_positive(g)


def test_off_locus_is_inconclusive():
    qd = heun_qdiff(BASE_CUBIC, 0.6 - 0.2j)
    g = singular_graph(qd, TraceControls(max_length=5))
    assert g.status == INCONCLUSIVE and not g.is_strebel
    assert g.offending
    with pytest.raises(NotStrebelError):
        classify(g)


def test_json_dump(base):
    r, gq = base
    g = _classified(heun_qdiff(r, gq.b0))
    data = g.to_json()
    assert set(data) == {"vertices", "edges", "faces", "is_strebel"}
    assert {v["kind"] for v in data["vertices"]} == {"zero", "pole"}
    assert set(data["edges"][0]) == {"id", "endpoints", "polyline", "dividing", "preventing"}
    assert data["faces"] == [{"id": 0, "depth": 0}]


# --- measures ---------------------------------------------------------------


def _ct_oracle(qd, spec, pts):
    m = spec.discretize(2000)
    return max(abs(cauchy(m, z) ** 2 + qd.R(z)) for z in pts)


TEST_POINTS = (3 + 3j, -2 + 4j, 5, -3 - 3j, 3.4j)


def test_measures_on_locus(base):
    r, gq = base
    qd = heun_qdiff(r, arc_midpoint(r, gq, 0))
    g = _classified(qd)
    specs = enumerate_measures(qd, g, 2000)
    assert len(specs) == 2
    assert sum(s.all_positive for s in specs) == 1
    pos = next(s for s in specs if s.all_positive)
    ids = {s.pos: s.id for s in g.vertices}
    supported = {tuple(sorted(g.edges[e].endpoints)) for e, _ in pos.support_edges}
    assert supported == {tuple(sorted((ids[1], ids[1 - 1j]))), tuple(sorted((ids[0], 0)))}
    for s in specs:
        assert abs(s.discretize().total_mass - 1) < 1e-4
        assert _ct_oracle(qd, s, TEST_POINTS) < 1e-4


def test_two_faces_measures():
    g = _classified(TWO_FACES)
    specs = enumerate_measures(TWO_FACES, g)
    assert len(specs) == 4
    assert not any(s.all_positive for s in specs)
    for s in specs:
        assert abs(s.discretize().total_mass - 1) < 1e-4
        assert _ct_oracle(TWO_FACES, s, TEST_POINTS) < 1e-4
    assert len({s.support_edges for s in specs}) == 4


def test_tripod_measure(base):
    r, gq = base
    qd = heun_qdiff(r, gq.b0)
    (spec,) = enumerate_measures(qd, _classified(qd))
    assert spec.all_positive and len(spec.support_edges) == 3
    assert _ct_oracle(qd, spec, TEST_POINTS) < 1e-4


def test_degenerate_case_is_arcsine_measure():
    qd = heun_qdiff(BASE_CUBIC, 0)
    (spec,) = enumerate_measures(qd, _classified(qd))
    m = spec.discretize(2000)
    for z in TEST_POINTS:
        exact = 1 / cmath.sqrt((z - 1) * (z - 1 + 1j))
        exact = exact if (exact * z).real > 0 else -exact
        assert abs(cauchy(m, z) - exact) < 1e-5


def test_positive_iff_unique_positive_spec(base):
    r, gq = base
    for qd in (TWO_FACES, heun_qdiff(r, gq.b0), heun_qdiff(r, arc_midpoint(r, gq, 2)), heun_qdiff(r, r.a[1])):
        g = _classified(qd)
        specs = enumerate_measures(qd, g)
        assert len(specs) == 2 ** (g.d - 1)
        assert admits_positive(g) == (sum(s.all_positive for s in specs) == 1)
