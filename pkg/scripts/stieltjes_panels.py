"""Zeros of the 25 Stieltjes polynomials of degree 24 for Q = z(z-1)(z-1+i), P = 0.

One SVG per polynomial: small dots are the zeros of S, medium dots the roots
of Q and the large dot the root of V.
"""
import argparse
from pathlib import Path

from heun_spectra.figures import Figure
from heun_spectra.spectral import HeunOperator, solve, stieltjes_roots
from heun_spectra.verify import BASE_CUBIC


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("--degree", type=int, default=24)
    parser.add_argument("--out", default="figures")
    args = parser.parse_args()
    op = HeunOperator.from_roots(BASE_CUBIC)
    res = solve(op, args.degree)
    for k, pair in enumerate(res.pairs):
        fig = Figure(title=f"S number {k + 1} of degree {args.degree}", size=240)
        fig.dots("stieltjes_roots", stieltjes_roots(pair), 1.5, "black")
        fig.dots("roots_of_Q", op.roots, 3.0, "#1f77b4")
        fig.dots("root_of_V", [pair.t], 4.5, "#d62728")
        fig.save(str(Path(args.out) / f"stieltjes-panel{k + 1:02d}.svg"))
    print(f"wrote {len(res.pairs)} panels to {args.out}")


if __name__ == "__main__":
    main()
