"""Singular trajectories of the Heun quadratic differential for b on Gamma_3.

Prints the classification (depths, dividing and preventing edges) and the
table of signed measures, and draws the singular graph.
"""
import argparse
import json
from pathlib import Path

from heun_spectra.abelian import CubicRoots
from heun_spectra.figures import Figure
from heun_spectra.locus import build_gamma_q, point_at_fraction, project_onto
from heun_spectra.qdiff import admits_positive, classify, enumerate_measures, heun_qdiff, singular_graph
from heun_spectra.verify import BASE_CUBIC


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("--arc", type=int, default=3, choices=(1, 2, 3))
    parser.add_argument("--fraction", type=float, default=0.5)
    parser.add_argument("--out", default="figures")
    args = parser.parse_args()
    r = CubicRoots(BASE_CUBIC)
    gq = build_gamma_q(r)
    i = args.arc - 1
    b = project_onto(r, point_at_fraction(gq.arcs[i], args.fraction), i)
    qd = heun_qdiff(r, b)
    g = classify(singular_graph(qd))
    fig = Figure(title=f"Singular trajectories, b on arc {args.arc}")
    for e in g.edges:
        fig.polyline(f"edge_{e.id}", e.polyline, 2.0, "black")
    fig.dots("poles", r.a, 3.5, "#1f77b4")
    fig.dots("zero", [b], 4.0, "#d62728")
    path = Path(args.out) / f"trajectories-arc{args.arc}.svg"
    fig.save(str(path))
    print(f"b = {b:.12g}, d = {g.d}, admits_positive = {admits_positive(g)}")
    for e in g.edges:
        print(f"  edge {e.id} {e.endpoints}: dividing={e.dividing} preventing={e.preventing} mass={e.w_length / 3.141592653589793:.6f}")
    for spec in enumerate_measures(qd, g):
        print("  " + json.dumps(spec.describe()))
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
