"""Discrete measures, Cauchy transforms, potentials and limit-law residuals.

Also builds the averaged arcsine measures ``M_i``: for a root ``a_i`` write
``Q(z + a_i) = z^3 + v_i z^2 + w_i z`` and average, over ``tau`` in [0, 1],
the arcsine measures on the segments centred at ``xi_i(tau)`` with
half-length ``2 sqrt(psi_i(tau))``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .poly import Polynomial, derivative, roots

__all__ = [
    "DiscreteMeasure",
    "ArcsineSlice",
    "cauchy",
    "potential",
    "ct_square_residual",
    "ct_ode_residual",
    "build_Mi",
    "shifted_cubic",
    "balayage_gap",
    "derivative_potential_check",
    "PotentialReport",
    "PROXIMITY",
]

PROXIMITY = 1e-12


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Finitely supported real measure in the plane (negative weights allowed)."""

    points: np.ndarray
    weights: np.ndarray
    tag: str = ""

    def __post_init__(self):
        p = np.atleast_1d(np.asarray(self.points, dtype=complex)).copy()
        w = np.atleast_1d(np.asarray(self.weights, dtype=float)).copy()
        if p.shape != w.shape or p.ndim != 1:
            raise ValueError("points and weights must be 1-D arrays of equal length")
        p.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "weights", w)

    @classmethod
    def root_counting(cls, pts, tag: str = "") -> "DiscreteMeasure":
        pts = np.asarray(list(pts), dtype=complex)
        return cls(pts, np.full(pts.size, 1.0 / pts.size), tag)

    @property
    def total_mass(self) -> float:
        return math.fsum(self.weights)

    def __len__(self):
        return self.points.size

    def scaled(self, factor: float) -> "DiscreteMeasure":
        return DiscreteMeasure(self.points, self.weights * factor, self.tag)


def _offsets(m: DiscreteMeasure, z: complex) -> np.ndarray:
    d = complex(z) - m.points
    if d.size and np.min(np.abs(d)) < PROXIMITY:
        raise ValueError(f"evaluation point {z} lies on the support")
    return d


def cauchy(m: DiscreteMeasure, z: complex) -> complex:
    """``sum w_k / (z - p_k)``."""
    return complex(np.sum(m.weights / _offsets(m, z)))


def _cauchy_derivs(m: DiscreteMeasure, z: complex):
    d = _offsets(m, z)
    C = np.sum(m.weights / d)
    C1 = -np.sum(m.weights / d**2)
    C2 = 2.0 * np.sum(m.weights / d**3)
    return complex(C), complex(C1), complex(C2)


def potential(m: DiscreteMeasure, z: complex) -> float:
    """``sum w_k log|z - p_k|``."""
    return float(np.sum(m.weights * np.log(np.abs(_offsets(m, z)))))


def ct_square_residual(m: DiscreteMeasure, Vt: Polynomial, Q: Polynomial, z: complex) -> float:
    """``|C(z)^2 - Vt(z)/Q(z)|``."""
    qz = Q(z)
    if abs(qz) < PROXIMITY:
        raise ValueError(f"evaluation point {z} is a root of Q")
    return abs(cauchy(m, z) ** 2 - Vt(z) / qz)


def ct_ode_residual(m: DiscreteMeasure, Q: Polynomial, z: complex) -> complex:
    """``Q C'' + Q' C' + (Q''/8) C + Q'''/24`` with analytic derivatives of C."""
    C, C1, C2 = _cauchy_derivs(m, z)
    Q1 = derivative(Q)
    Q2 = derivative(Q1)
    Q3 = derivative(Q2)
    return Q(z) * C2 + Q1(z) * C1 + Q2(z) / 8.0 * C + Q3(z) / 24.0


def shifted_cubic(a, i: int) -> tuple[complex, complex]:
    """``(v_i, w_i)`` with ``Q(z + a_i) = z^3 + v_i z^2 + w_i z``."""
    a = [complex(x) for x in a]
    d = [a[k] - a[i] for k in range(3) if k != i]
    return -(d[0] + d[1]), d[0] * d[1]


@dataclass(frozen=True)
class ArcsineSlice:
    """One arcsine measure of the average defining ``M_i`` (shifted coordinate)."""

    tau: float
    v: complex
    w: complex
    nodes: int
    center: complex = field(init=False)
    half_length: complex = field(init=False)

    def __post_init__(self):
        s = (1.0 - self.tau) ** 2
        psi = -self.w * (1.0 - s) * s
        object.__setattr__(self, "center", -self.v * s)
        object.__setattr__(self, "half_length", 2.0 * np.sqrt(complex(psi)))

    @property
    def psi(self) -> complex:
        s = (1.0 - self.tau) ** 2
        return -self.w * (1.0 - s) * s

    def points(self) -> np.ndarray:
        k = np.arange(1, self.nodes + 1)
        return self.center + self.half_length * np.cos((2 * k - 1) * np.pi / (2 * self.nodes))


def build_Mi(a, i: int, tau_nodes: int = 400, slice_nodes: int = 200) -> DiscreteMeasure:
    """Discretised ``M_i``: midpoint rule in tau, Chebyshev nodes on each slice."""
    a = [complex(x) for x in getattr(a, "a", a)]
    v, w = shifted_cubic(a, i)
    taus = (np.arange(tau_nodes) + 0.5) / tau_nodes
    pts = np.concatenate([ArcsineSlice(t, v, w, slice_nodes).points() for t in taus]) + a[i]
    total = tau_nodes * slice_nodes
    return DiscreteMeasure(pts, np.full(total, 1.0 / total), tag=f"M_{i + 1}")


def balayage_gap(Mi: DiscreteMeasure, mu_n: DiscreteMeasure, ring) -> float:
    """Largest Cauchy-transform difference over the ring points."""
    return max(abs(cauchy(Mi, z) - cauchy(mu_n, z)) for z in ring)


@dataclass(frozen=True)
class PotentialReport:
    u: np.ndarray
    u_prime: np.ndarray
    far: np.ndarray
    max_excess: float
    max_far_gap: float
    passed_inequality: bool
    passed_far_field: bool

    @property
    def passed(self) -> bool:
        return self.passed_inequality and self.passed_far_field


def derivative_potential_check(
    p: Polynomial,
    grid,
    *,
    roots_p=None,
    roots_dp=None,
    ineq_tol: float = 1e-9,
    far_tol: float = 1e-6,
) -> PotentialReport:
    """Compare the potentials of the root-counting measures of ``p`` and ``p'``.

    Checks ``u' <= u + ineq_tol`` at every grid point and ``|u' - u| < far_tol``
    at grid points farther than twice the root radius of ``p``.  Precomputed
    root sets may be passed in when ``p`` is too ill-conditioned for the
    double-precision root finder.
    """
    if p.degree < 2:
        raise ValueError("need deg p >= 2")
    rp = np.asarray(roots(p) if roots_p is None else roots_p, dtype=complex)
    rd = np.asarray(roots(derivative(p)) if roots_dp is None else roots_dp, dtype=complex)
    mu = DiscreteMeasure.root_counting(rp)
    nu = DiscreteMeasure.root_counting(rd)
    grid = np.asarray(list(grid), dtype=complex)
    u = np.array([potential(mu, z) for z in grid])
    up = np.array([potential(nu, z) for z in grid])
    radius = float(np.max(np.abs(rp)))
    far = np.abs(grid) > 2 * radius
    excess = float(np.max(up - u))
    gap = float(np.max(np.abs(up - u)[far])) if far.any() else 0.0
    return PotentialReport(
        u=u,
        u_prime=up,
        far=far,
        max_excess=excess,
        max_far_gap=gap,
        passed_inequality=excess <= ineq_tol,
        passed_far_field=gap < far_tol,
    )
