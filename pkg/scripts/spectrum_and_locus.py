"""Roots of Sp_24 for Q = z(z-1)(z-1+i), P = 0, drawn over the locus Gamma_Q."""
import argparse
from pathlib import Path

from heun_spectra.abelian import CubicRoots
from heun_spectra.figures import Figure
from heun_spectra.locus import build_gamma_q, distance_to_locus
from heun_spectra.spectral import HeunOperator, solve
from heun_spectra.verify import BASE_CUBIC


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--degree", type=int, default=24)
    parser.add_argument("--out", default="figures")
    args = parser.parse_args()
    r = CubicRoots(BASE_CUBIC)
    gq = build_gamma_q(r)
    res = solve(HeunOperator.from_roots(BASE_CUBIC), args.degree)
    fig = Figure(title=f"Sp_{args.degree} and the locus")
    for arc in gq.arcs:
        fig.polyline(f"gamma_{arc.i + 1}", arc.points, 1.5, "#1f77b4")
    fig.dots("roots_of_Q", r.a, 3.5, "#1f77b4")
    fig.dots(f"Sp_{args.degree}", res.t_roots, 2.0, "black")
    path = Path(args.out) / f"spectrum-sp{args.degree}.svg"
    fig.save(str(path))
    worst = max(distance_to_locus(gq, t) for t in res.t_roots)
    print(f"b0 = {gq.b0:.12g}; max distance of a root to the locus {worst:.3e}; wrote {path}")


if __name__ == "__main__":
    main()
