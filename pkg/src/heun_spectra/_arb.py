"""Thin helpers around python-flint ball arithmetic.

flint keeps its working precision in a process-global context, so every
precision change goes through :func:`working_precision`, which serialises
access with a lock.
"""
from __future__ import annotations

import threading
from contextlib import contextmanager

import mpmath
from flint import acb, acb_poly, arb, ctx

_LOCK = threading.RLock()


@contextmanager
def working_precision(bits: int):
    with _LOCK:
        old = ctx.prec
        ctx.prec = int(bits)
        try:
            yield
        finally:
            ctx.prec = old


def to_acb(z) -> acb:
    z = complex(z)
    return acb(z.real, z.imag)


def to_complex(x: acb) -> complex:
    return complex(x.mid())


def radius(x: acb) -> float:
    return float(x.rad())


def poly_coeffs(p: acb_poly) -> list[acb]:
    return [p[k] for k in range(p.degree() + 1)]


def isolate_roots(p: acb_poly, prec: int, maxprec: int, tol: float) -> list[acb]:
    """Certified root isolation refined to radius ``tol``.

    Raises ``ValueError`` when the precision is insufficient or the input
    has (numerically) repeated roots.
    """
    with working_precision(prec):
        return list(p.roots(tol=tol, maxprec=maxprec))


def _arb_to_mpf(x: arb) -> mpmath.mpf:
    man, exp = x.mid().man_exp()
    return mpmath.ldexp(mpmath.mpf(int(man)), int(exp))


def _mpf_to_arb(x: mpmath.mpf) -> arb:
    sign, man, exp, _ = x._mpf_
    if not man:
        return arb(0)
    return arb(-int(man) if sign else int(man)) * arb(2) ** int(exp)


def approximate_roots(p: acb_poly, prec: int, maxsteps: int = 400) -> list[acb]:
    """Roots of the midpoint polynomial at ``prec`` bits, without certification.

    Used where isolation fails because of genuinely repeated roots: a root of
    multiplicity k is still resolved to about ``prec / k`` bits.
    """
    with working_precision(prec), mpmath.workprec(prec):
        coeffs = [
            mpmath.mpc(_arb_to_mpf(p[k].real), _arb_to_mpf(p[k].imag)) for k in range(p.degree(), -1, -1)
        ]
        rts = mpmath.polyroots(coeffs, maxsteps=maxsteps, extraprec=prec)
        return [acb(_mpf_to_arb(mpmath.mpf(z.real)), _mpf_to_arb(mpmath.mpf(z.imag))) for z in rts]
