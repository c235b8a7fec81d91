"""Rational quadratic differentials ``R(z) dz^2`` with ``R = -U_1/U_2``."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import UnsupportedConfiguration
from ..poly import Polynomial, roots as poly_roots

__all__ = ["QuadDiff", "SingularPoint", "heun_qdiff", "launch_directions", "HORIZONTAL", "VERTICAL"]

HORIZONTAL = "horizontal"
VERTICAL = "vertical"

# gauss-legendre nodes on [0, 1] for the singular end-point integrals
_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)
_GL_X = (_GL_X + 1) / 2
_GL_W = _GL_W / 2


@dataclass(frozen=True)
class SingularPoint:
    id: int
    pos: complex
    kind: str  # "zero" | "pole"
    order: int = 1


@dataclass(frozen=True, eq=False)
class QuadDiff:
    """The differential ``-(U_1/U_2) dz^2``, stored by its zeros and poles.

    ``deg U_2 - deg U_1 = 2`` so that infinity is a double pole whose
    neighbourhood is foliated by closed trajectories.
    """

    zeros: tuple
    poles: tuple
    singular: tuple = field(init=False)

    def __post_init__(self):
        zs = tuple(complex(z) for z in self.zeros)
        ps = tuple(complex(p) for p in self.poles)
        if len(ps) - len(zs) != 2:
            raise ValueError("need deg U_2 - deg U_1 = 2")
        pts = list(zs) + list(ps)
        span = max((abs(a - b) for a in pts for b in pts), default=1.0) or 1.0
        for a in range(len(pts)):
            for b in range(a):
                if abs(pts[a] - pts[b]) <= 1e-12 * span:
                    raise UnsupportedConfiguration("zeros and poles must be simple and pairwise distinct")
        object.__setattr__(self, "zeros", zs)
        object.__setattr__(self, "poles", ps)
        sing = [SingularPoint(n, z, "zero") for n, z in enumerate(zs)]
        sing += [SingularPoint(len(zs) + n, p, "pole") for n, p in enumerate(ps)]
        object.__setattr__(self, "singular", tuple(sing))

    @classmethod
    def from_polynomials(cls, U1: Polynomial, U2: Polynomial) -> "QuadDiff":
        if abs(U1.leading - 1) > 1e-12 or abs(U2.leading - 1) > 1e-12:
            raise ValueError("U_1 and U_2 must be monic")
        zs = poly_roots(U1) if U1.degree > 0 else []
        return cls(tuple(zs), tuple(poly_roots(U2)))

    @property
    def U1(self) -> Polynomial:
        return Polynomial.from_roots(self.zeros)

    @property
    def U2(self) -> Polynomial:
        return Polynomial.from_roots(self.poles)

    @property
    def diameter(self) -> float:
        pts = [s.pos for s in self.singular]
        return max(abs(a - b) for a in pts for b in pts)

    @property
    def center(self) -> complex:
        pts = [s.pos for s in self.singular]
        return sum(pts) / len(pts)

    def R(self, z):
        z = np.asarray(z, dtype=complex)
        num = np.ones_like(z)
        for a in self.zeros:
            num = num * (z - a)
        den = np.ones_like(z)
        for p in self.poles:
            den = den * (z - p)
        out = -num / den
        return complex(out) if out.ndim == 0 else out

    def local_coefficient(self, s: SingularPoint) -> complex:
        """``c`` with ``R(z) ~ c (z - p)^{+-1}`` at a simple zero or pole ``p``."""
        others_z = [a for a in self.zeros if a != s.pos]
        others_p = [p for p in self.poles if p != s.pos]
        num = np.prod([s.pos - a for a in others_z]) if others_z else 1.0
        den = np.prod([s.pos - p for p in others_p]) if others_p else 1.0
        return complex(-num / den)

    def endpoint_integral(self, s: SingularPoint, z: complex, root_at_z: complex) -> complex:
        """``int_p^z sqrt(R) dt`` from the singular point ``p`` to ``z``.

        Uses ``t = p + (z - p) u^2``, which makes the integrand smooth for a
        simple zero or pole.  The branch is continued from the value
        ``root_at_z`` of ``sqrt(R)`` at ``z``.
        """
        p = s.pos
        d = z - p
        t = p + d * _GL_X**2
        vals = np.sqrt(self.R(t))
        # continue the branch from u = 1 (at z) down to u -> 0
        end = complex(root_at_z)
        order = np.argsort(-_GL_X)
        prev = end
        for idx in order:
            if (vals[idx] * np.conj(prev)).real < 0:
                vals[idx] = -vals[idx]
            prev = vals[idx]
        return complex(np.sum(_GL_W * vals * 2 * d * _GL_X))


def heun_qdiff(a, b: complex) -> QuadDiff:
    """``R(z) = (b - z)/Q(z)``, cancelling the zero against a coinciding pole."""
    a = [complex(x) for x in getattr(a, "a", a)]
    b = complex(b)
    scale = max(abs(x - y) for x in a for y in a)
    for n, x in enumerate(a):
        if abs(b - x) <= 1e-12 * scale:
            return QuadDiff((), tuple(y for m, y in enumerate(a) if m != n))
    return QuadDiff((b,), tuple(a))


def launch_directions(qd: QuadDiff, s: SingularPoint, kind: str = HORIZONTAL) -> list[complex]:
    """Unit tangent directions of the singular trajectories leaving ``s``.

    With ``R ~ c (z - p)^e`` the ray ``z - p = r e^{i phi}`` is horizontal when
    ``arg c + (e + 2) phi = 0`` and vertical when it equals ``pi`` (mod 2 pi):
    one direction at a simple pole, three at a simple zero.
    """
    if s.order != 1:
        raise UnsupportedConfiguration("only simple zeros and poles are supported")
    c = qd.local_coefficient(s)
    target = 0.0 if kind == HORIZONTAL else np.pi
    e = 1 if s.kind == "zero" else -1
    count = e + 2
    return [complex(np.exp(1j * (target - np.angle(c) + 2 * np.pi * m) / count)) for m in range(count)]
