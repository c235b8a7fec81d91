"""Quadratic differentials: trajectories, singular graphs and signed measures."""
from .core import HORIZONTAL, VERTICAL, QuadDiff, SingularPoint, heun_qdiff, launch_directions
from .trace import TraceControls, TrajectorySegment, trace, trace_from

__all__ = [
    "HORIZONTAL",
    "VERTICAL",
    "QuadDiff",
    "SingularPoint",
    "heun_qdiff",
    "launch_directions",
    "TraceControls",
    "TrajectorySegment",
    "trace",
    "trace_from",
]
from .graph import Edge, Face, SingularGraph, admits_positive, classify, singular_graph
from .measures import SignedMeasureSpec, edge_points, enumerate_measures

__all__ += [
    "Edge",
    "Face",
    "SingularGraph",
    "admits_positive",
    "classify",
    "singular_graph",
    "SignedMeasureSpec",
    "edge_points",
    "enumerate_measures",
]
