"""The singular graph ``K_Psi``: edges, faces, depths and edge labels.

Edges are singular trajectories joining two half-edges, where a half-edge is
a pair (singular point id, launch direction index).  Faces come from the
usual half-edge traversal with the face kept on the left; each connected
component contributes one clockwise outer cycle (the one of least signed
area) and its counter-clockwise cycles bound faces.  Components nested in a
bounded face become holes of that face.

For a Strebel graph with ``C`` components the planar Euler relation reads
``V - E + F = 1 + C`` (``F`` counts the unbounded face).
"""
from __future__ import annotations

import dataclasses
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ..errors import NotStrebelError, TraceError
from .core import HORIZONTAL, QuadDiff, launch_directions
from .trace import ESCAPED, EXHAUSTED, HIT, TraceControls, TrajectorySegment, trace_from

__all__ = ["Edge", "Face", "SingularGraph", "singular_graph", "classify", "admits_positive", "hausdorff",
           "STREBEL", "INCONCLUSIVE", "NOT_STREBEL"]

STREBEL, INCONCLUSIVE, NOT_STREBEL = "strebel", "inconclusive", "not_strebel"


@dataclass(frozen=True, eq=False)
class Edge:
    """A singular trajectory from half-edge ``tail`` to half-edge ``head``."""

    id: int
    tail: tuple
    head: tuple
    segment: TrajectorySegment
    dividing: bool | None = None
    preventing: bool | None = None

    @property
    def endpoints(self) -> tuple[int, int]:
        return self.tail[0], self.head[0]

    @property
    def polyline(self) -> np.ndarray:
        return self.segment.points

    @property
    def w_length(self) -> float:
        """``|int sqrt(R) dz|`` along the edge: the change of the canonical coordinate."""
        return float(abs(self.segment.w[-1] - self.segment.w[0]))


@dataclass(frozen=True)
class Face:
    """``boundary`` is the enclosing cycle (empty for the unbounded face); darts are ``(edge, +-1)``."""

    id: int
    boundary: tuple
    holes: tuple
    depth: int

    @property
    def bounded(self) -> bool:
        return bool(self.boundary)


@dataclass(frozen=True, eq=False)
class SingularGraph:
    qd: QuadDiff
    kind: str
    status: str
    segments: tuple
    edges: tuple = ()
    faces: tuple = ()
    dart_face: dict = field(default_factory=dict)
    components: int = 0
    classified: bool = False
    diagnostics: dict = field(default_factory=dict)

    @property
    def vertices(self) -> tuple:
        return self.qd.singular

    @property
    def is_strebel(self) -> bool:
        return self.status == STREBEL

    @property
    def d(self) -> int:
        """Number of complementary domains, the unbounded one included."""
        return len(self.faces)

    @property
    def bounded_faces(self) -> list[Face]:
        return [f for f in self.faces if f.bounded]

    @property
    def euler_ok(self) -> bool:
        return len(self.vertices) - len(self.edges) + len(self.faces) == 1 + self.components

    @property
    def offending(self) -> list[TrajectorySegment]:
        return [s for s in self.segments if s.terminal != HIT]

    def edge(self, eid: int) -> Edge:
        return self.edges[eid]

    def edges_between(self, u: int, v: int) -> list[Edge]:
        return [e for e in self.edges if sorted(e.endpoints) == sorted((u, v))]

    def max_gap(self) -> float:
        return max((s.gap for s in self.segments if s.terminal == HIT), default=0.0)

    def to_json(self) -> dict:
        return {
            "vertices": [
                {"id": v.id, "pos": [v.pos.real, v.pos.imag], "kind": v.kind} for v in self.vertices
            ],
            "edges": [
                {
                    "id": e.id,
                    "endpoints": list(e.endpoints),
                    "polyline": [[p.real, p.imag] for p in e.polyline],
                    "dividing": bool(e.dividing),
                    "preventing": bool(e.preventing),
                }
                for e in self.edges
            ],
            "faces": [{"id": f.id, "depth": f.depth} for f in self.faces],
            "is_strebel": self.is_strebel,
        }


def _arrival_index(dirs: list[complex], arrival: complex) -> int:
    return int(np.argmax([(arrival * np.conj(d)).real for d in dirs]))


def _to_polyline(pts: np.ndarray, poly: np.ndarray) -> np.ndarray:
    """Distance from each point to the polyline ``poly``."""
    a, b = poly[:-1][None, :], poly[1:][None, :]
    z = pts[:, None]
    d = b - a
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.clip(((z - a) * np.conj(d)).real / np.abs(d) ** 2, 0.0, 1.0)
    t = np.nan_to_num(t)
    return np.min(np.abs(z - (a + t * d)), axis=1)


def hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """Hausdorff distance between two polylines (vertices against segments)."""
    return float(max(_to_polyline(a, b).max(), _to_polyline(b, a).max()))


def _reversed(seg: TrajectorySegment) -> TrajectorySegment:
    w = seg.w[::-1]
    return dataclasses.replace(seg, points=seg.points[::-1], w=w - w[0])


def _signed_area(poly: np.ndarray) -> float:
    x, y = poly.real, poly.imag
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _inside(z: complex, poly: np.ndarray) -> bool:
    """Even-odd ray casting."""
    x, y = poly.real, poly.imag
    x1, y1 = np.roll(x, -1), np.roll(y, -1)
    cond = (y > z.imag) != (y1 > z.imag)
    with np.errstate(divide="ignore", invalid="ignore"):
        xc = x + (z.imag - y) * (x1 - x) / (y1 - y)
    return bool(np.count_nonzero(cond & (z.real < xc)) % 2)


def _crossings(edges: list[Edge], margin: float) -> list[tuple[int, int]]:
    """Pairs of edges whose polylines cross away from the singular points."""
    bad = []
    segs = []
    for e in edges:
        p = e.polyline
        ends = np.array([p[0], p[-1]])
        keep = np.min(np.abs(p[:, None] - ends[None, :]), axis=1) > margin
        keep = keep[:-1] & keep[1:]
        segs.append((p[:-1][keep], p[1:][keep]))

    def orient(a, b, c):
        return ((b - a).conj() * (c - a)).imag

    for m in range(len(edges)):
        for n in range(m + 1, len(edges)):
            a0, a1 = segs[m]
            b0, b1 = segs[n]
            if not a0.size or not b0.size:
                continue
            A0, A1 = a0[:, None], a1[:, None]
            B0, B1 = b0[None, :], b1[None, :]
            hit = (orient(A0, A1, B0) * orient(A0, A1, B1) < 0) & (orient(B0, B1, A0) * orient(B0, B1, A1) < 0)
            if hit.any():
                bad.append((m, n))
    return bad


def _build_edges(qd: QuadDiff, segs: dict, dirs: dict, diam: float) -> tuple[list[Edge], float]:
    used: dict = {}
    edges: list[Edge] = []
    worst = 0.0
    for he in sorted(segs):
        if he in used:
            continue
        seg = segs[he]
        head = (seg.target, _arrival_index(dirs[seg.target], seg.arrival))
        if head == he or head in used:
            raise TraceError("singular trajectories do not pair up into edges",
                             last_point=seg.points[-1], diagnostics={"half_edge": he, "arrival": head})
        back = segs.get(head)
        if back is None or back.target != he[0] or _arrival_index(dirs[he[0]], back.arrival) != he[1]:
            raise TraceError("trajectory traced from the other end does not return",
                             last_point=seg.points[-1], diagnostics={"half_edge": he, "arrival": head})
        worst = max(worst, hausdorff(seg.points, back.points) / diam)
        used[he] = used[head] = len(edges)
        edges.append(Edge(len(edges), he, head, seg))
    return edges, worst


def _faces(qd: QuadDiff, edges: list[Edge], dirs: dict):
    # rotation system: half-edges at each vertex sorted counter-clockwise
    at = {}
    for e in edges:
        at.setdefault(e.tail, (e.id, +1))
        at.setdefault(e.head, (e.id, -1))
    rot = {}
    for v in qd.singular:
        hes = [(v.id, n) for n in range(len(dirs[v.id])) if (v.id, n) in at]
        rot[v.id] = sorted(hes, key=lambda h: np.angle(dirs[h[0]][h[1]]))

    def head_of(dart):
        e = edges[dart[0]]
        return e.head if dart[1] > 0 else e.tail

    def out_dart(he):
        e = edges[at[he][0]]
        return (e.id, +1) if e.tail == he else (e.id, -1)

    def nxt(dart):
        h = head_of(dart)
        ring = rot[h[0]]
        return out_dart(ring[(ring.index(h) - 1) % len(ring)])  # clockwise neighbour

    seen, cycles = set(), []
    for e in edges:
        for s in (+1, -1):
            d = (e.id, s)
            if d in seen:
                continue
            cyc = []
            while d not in seen:
                seen.add(d)
                cyc.append(d)
                d = nxt(d)
            cycles.append(tuple(cyc))

    def poly(cyc):
        parts = [edges[i].polyline if s > 0 else edges[i].polyline[::-1] for i, s in cyc]
        return np.concatenate(parts)

    # connected components of the vertex set
    parent = {v.id: v.id for v in qd.singular}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edges:
        a, b = find(e.endpoints[0]), find(e.endpoints[1])
        parent[a] = b
    comp_of_cycle = [find(edges[c[0][0]].endpoints[0]) for c in cycles]
    comps = sorted({find(v.id) for v in qd.singular})
    polys = [poly(c) for c in cycles]
    areas = [_signed_area(p) for p in polys]

    outer = {}
    for k, c in enumerate(comp_of_cycle):
        if c not in outer or areas[k] < areas[outer[c]]:
            outer[c] = k
    bounded = [k for k in range(len(cycles)) if outer.get(comp_of_cycle[k]) != k]
    # face 0 is unbounded; bounded faces in order of discovery
    face_of_cycle = {k: n + 1 for n, k in enumerate(bounded)}
    holes = {0: []}
    for n in range(len(bounded)):
        holes[n + 1] = []
    for c in comps:
        if c not in outer:
            continue  # isolated vertex (cannot happen for a Strebel graph)
        probe = qd.singular[c].pos
        best, host = np.inf, 0
        for k in bounded:
            if comp_of_cycle[k] != c and areas[k] < best and _inside(probe, polys[k]):
                best, host = areas[k], face_of_cycle[k]
        holes[host].append(cycles[outer[c]])
        face_of_cycle[outer[c]] = host

    dart_face = {}
    for k, cyc in enumerate(cycles):
        for d in cyc:
            dart_face[d] = face_of_cycle[k]

    # depth by breadth-first search across dividing edges from the unbounded face
    nf = len(bounded) + 1
    adj = {f: set() for f in range(nf)}
    for e in edges:
        f, g = dart_face[(e.id, 1)], dart_face[(e.id, -1)]
        if f != g:
            adj[f].add(g)
            adj[g].add(f)
    depth = {0: 0}
    queue = deque([0])
    while queue:
        f = queue.popleft()
        for g in sorted(adj[f]):
            if g not in depth:
                depth[g] = depth[f] + 1
                queue.append(g)
    faces = [Face(0, (), tuple(holes[0]), 0)]
    for k in bounded:
        f = face_of_cycle[k]
        faces.append(Face(f, cycles[k], tuple(holes[f]), depth.get(f, -1)))
    faces.sort(key=lambda f: f.id)
    return faces, dart_face, len([c for c in comps if c in outer])


def singular_graph(qd: QuadDiff, controls: TraceControls = TraceControls(), kind: str = HORIZONTAL) -> SingularGraph:
    """Trace every singular trajectory of ``qd`` and assemble ``K_Psi``.

    A trajectory that runs out of length gives status ``inconclusive``, one
    that escapes gives ``not_strebel``; in both cases the segments are kept
    and no faces are built.
    """
    dirs = {s.id: launch_directions(qd, s, kind) for s in qd.singular}
    segs = {}
    for s in qd.singular:
        for n, d in enumerate(dirs[s.id]):
            segs[(s.id, n)] = trace_from(qd, s, n, d, kind, controls)
    seg_list = tuple(segs[k] for k in sorted(segs))
    terminals = {s.terminal for s in seg_list}
    if terminals != {HIT}:
        status = NOT_STREBEL if ESCAPED in terminals and EXHAUSTED not in terminals else INCONCLUSIVE
        return SingularGraph(qd, kind, status, seg_list)
    diam = qd.diameter
    edges, rev = _build_edges(qd, segs, dirs, diam)
    crossing = _crossings(edges, controls.r_cap * diam)
    if crossing:
        raise TraceError("singular trajectories cross", last_point=edges[crossing[0][0]].polyline[0],
                         diagnostics={"pairs": crossing})
    faces, dart_face, comps = _faces(qd, edges, dirs)
    return SingularGraph(qd, kind, STREBEL, seg_list, tuple(edges), tuple(faces), dart_face, comps,
                         diagnostics={"reversibility": rev})


def classify(graph: SingularGraph) -> SingularGraph:
    """Label each edge dividing / preventing."""
    if not graph.is_strebel:
        raise NotStrebelError(f"cannot classify a graph with status {graph.status}")
    faces = {f.id: f for f in graph.faces}
    labelled = []
    for e in graph.edges:
        f, g = graph.dart_face[(e.id, 1)], graph.dart_face[(e.id, -1)]
        dividing = f != g
        preventing = False
        if not dividing:
            preventing = (e.id, 1) in faces[f].boundary
        labelled.append(dataclasses.replace(e, dividing=dividing, preventing=preventing))
    return dataclasses.replace(graph, edges=tuple(labelled), classified=True)


def admits_positive(graph: SingularGraph) -> bool:
    """No dividing edge between domains of equal depth and no preventing edge."""
    if not graph.classified:
        graph = classify(graph)
    depth = {f.id: f.depth for f in graph.faces}
    for e in graph.edges:
        if e.dividing:
            if depth[graph.dart_face[(e.id, 1)]] == depth[graph.dart_face[(e.id, -1)]]:
                return False
        elif e.preventing:
            return False
    return True
