"""Real measures on ``K_Psi`` whose Cauchy transform squares to ``U_1/U_2``.

Every bounded domain carries one bit: the gradient of the canonical
potential runs either from its outer boundary inwards (``IN``) or outwards
(``OUT``); the unbounded domain is always ``OUT`` because the transform
decays like ``1/z``.  On each side of an edge the gradient then points away
from or towards the edge.  Away on both sides gives a positive density,
towards on both sides a negative one, and mixed sides drop the edge.

The line density is ``(1/pi) |sqrt(U_1/U_2)|`` per unit arclength, so an
edge carries mass ``|Delta w| / pi`` with ``w`` the canonical coordinate.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ..measures import DiscreteMeasure
from .core import QuadDiff
from .graph import Edge, SingularGraph, classify

__all__ = ["SignedMeasureSpec", "enumerate_measures", "edge_points", "IN", "OUT"]

IN, OUT = 1, 0


@dataclass(frozen=True, eq=False)
class SignedMeasureSpec:
    graph: SingularGraph
    branch_choice: tuple  # one bit per bounded face, in face-id order
    support_edges: tuple  # (edge id, +1 | -1)
    points_per_edge: int = 2000

    @property
    def all_positive(self) -> bool:
        return all(s > 0 for _, s in self.support_edges)

    @property
    def edge_masses(self) -> dict:
        return {e: s * self.graph.edges[e].w_length / math.pi for e, s in self.support_edges}

    @property
    def total_mass(self) -> float:
        return math.fsum(self.edge_masses.values())

    def discretize(self, points_per_edge: int | None = None) -> DiscreteMeasure:
        points_per_edge = points_per_edge or self.points_per_edge
        pts, wts = [], []
        for eid, sign in self.support_edges:
            e = self.graph.edges[eid]
            frac = (np.arange(points_per_edge) + 0.5) / points_per_edge
            pts.append(edge_points(self.graph.qd, e, frac))
            wts.append(np.full(points_per_edge, sign * e.w_length / math.pi / points_per_edge))
        if not pts:
            return DiscreteMeasure(np.zeros(0, complex), np.zeros(0), tag="signed")
        return DiscreteMeasure(np.concatenate(pts), np.concatenate(wts), tag="signed")

    def describe(self) -> dict:
        return {
            "branch_choice": ["in" if b == IN else "out" for b in self.branch_choice],
            "support": [{"edge": e, "sign": "+" if s > 0 else "-"} for e, s in self.support_edges],
            "edge_masses": {str(k): v for k, v in self.edge_masses.items()},
            "total_mass": self.total_mass,
            "all_positive": self.all_positive,
        }


def edge_points(qd: QuadDiff, e: Edge, frac) -> np.ndarray:
    """Points at the given fractions of the canonical length of an edge.

    Linear interpolation in ``w`` between traced vertices, except on the
    chords touching a singular point, where ``z - p`` follows the local power
    law (``w^2`` at a simple pole, ``w^(2/3)`` at a simple zero).
    """
    seg = e.segment
    z = seg.points
    s = np.abs(seg.w - seg.w[0])
    s = np.maximum.accumulate(s)
    target = np.asarray(frac, dtype=float) * s[-1]
    idx = np.clip(np.searchsorted(s, target, side="right") - 1, 0, len(s) - 2)
    lo, hi = s[idx], s[idx + 1]
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(hi > lo, (target - lo) / (hi - lo), 0.0)
    out = z[idx] + (z[idx + 1] - z[idx]) * t
    expo = {"pole": 2.0, "zero": 2.0 / 3.0}
    tail_v, head_v = qd.singular[e.tail[0]], qd.singular[e.head[0]]
    first = idx == 0
    if first.any():
        k = expo[tail_v.kind]
        out[first] = z[0] + (z[1] - z[0]) * (target[first] / s[1]) ** k
    last = idx == len(s) - 2
    if last.any():
        k = expo[head_v.kind]
        span = s[-1] - s[-2]
        if span > 0:
            out[last] = z[-1] + (z[-2] - z[-1]) * ((s[-1] - target[last]) / span) ** k
    return out


def _side(graph: SingularGraph, dart, bits: dict) -> str:
    f = graph.dart_face[dart]
    face = graph.faces[f]
    on_outer = dart in face.boundary
    b = bits[f]
    return "away" if (b == IN and on_outer) or (b == OUT and not on_outer) else "toward"


def enumerate_measures(qd: QuadDiff, graph: SingularGraph, points_per_edge: int = 2000) -> list[SignedMeasureSpec]:
    """All ``2^(d-1)`` sign patterns; ``points_per_edge`` is the default for discretisation."""
    if not graph.classified:
        graph = classify(graph)
    bounded = [f.id for f in graph.bounded_faces]
    specs = []
    for choice in itertools.product((OUT, IN), repeat=len(bounded)):
        bits = {0: OUT, **dict(zip(bounded, choice))}
        support = []
        for e in graph.edges:
            a = _side(graph, (e.id, 1), bits)
            b = _side(graph, (e.id, -1), bits)
            if a == b:
                support.append((e.id, 1 if a == "away" else -1))
        specs.append(SignedMeasureSpec(graph, tuple(choice), tuple(support), points_per_edge))
    return specs
