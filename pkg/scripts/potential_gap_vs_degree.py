"""How far the derivative-potential comparison is from its limit at finite degree.

For S_n nearest the midpoint of the first arc of the locus, reports the largest
excess of u' over u on the 30 x 30 acceptance grid and the largest far-field
gap, for a range of degrees.  Both shrink with n; neither reaches the
tolerances of the limiting statement (1e-9 and 1e-6) at accessible degrees.
"""
import argparse
import json

import numpy as np

from heun_spectra.abelian import CubicRoots
from heun_spectra.locus import arc_midpoint, build_gamma_q
from heun_spectra.measures import derivative_potential_check
from heun_spectra.spectral import HeunOperator, nearest_pair, solve, stieltjes_derivative_roots, stieltjes_roots
from heun_spectra.verify import BASE_CUBIC


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("--degrees", type=int, nargs="+", default=[12, 25, 50, 100, 200])
    parser.add_argument("--out", default="potential_gap.json")
    args = parser.parse_args()
    r = CubicRoots(BASE_CUBIC)
    bt = arc_midpoint(r, build_gamma_q(r), 0)
    op = HeunOperator.from_roots(BASE_CUBIC)
    half = 2 * r.diameter
    xs = np.linspace(r.centroid.real - half, r.centroid.real + half, 30)
    ys = np.linspace(r.centroid.imag - half, r.centroid.imag + half, 30)
    rows = []
    for n in args.degrees:
        pair = nearest_pair(solve(op, n), bt)
        rs, rd = stieltjes_roots(pair), stieltjes_derivative_roots(pair)
        avoid = np.array(rs + rd)
        grid = [complex(x, y) for x in xs for y in ys if np.min(np.abs(avoid - complex(x, y))) > 1e-2]
        rep = derivative_potential_check(pair.S, grid, roots_p=rs, roots_dp=rd)
        rows.append({"n": n, "max_excess": rep.max_excess, "max_far_gap": rep.max_far_gap,
                     "n_times_far_gap": n * rep.max_far_gap})
        print(f"n = {n:4d}  max excess {rep.max_excess:.3e}  far gap {rep.max_far_gap:.3e}  n * far gap {n * rep.max_far_gap:.3f}")
    with open(args.out, "w") as fh:
        json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
