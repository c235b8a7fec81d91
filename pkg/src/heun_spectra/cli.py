"""Command-line front end.

``heun-spectra <spectrum|locus|trajectories|measures|verify> --config job.json
[--out DIR] [--threads K]``

The job file is a single JSON document; every default is filled in and the
effective configuration is written to ``config.json`` in the output
directory.  Exit codes: 0 success (possibly with warnings), 1 verification
failure, 2 usage or configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .abelian import CubicRoots
from .errors import HeunSpectraError
from .figures import Figure, write_atomic, write_json
from .locus import arc_midpoint, build_gamma_q, point_at_fraction, project_onto
from .measures import DiscreteMeasure, balayage_gap, build_Mi, ct_ode_residual
from .qdiff import (
    HORIZONTAL,
    TraceControls,
    admits_positive,
    classify,
    enumerate_measures,
    heun_qdiff,
    singular_graph,
    trace,
)
from .qdiff.trace import CLOSED
from .spectral import MAX_DEGREE, HeunOperator, solve, stieltjes_roots
from .verify import SuiteConfig, run_suite

__all__ = ["JobConfig", "ConfigError", "load_config", "main"]

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
COMMANDS = ("spectrum", "locus", "trajectories", "measures", "verify")

DEFAULT_TOLERANCES = {"cluster": 1e-7, "arc": 1e-10, "newton": 1e-12, "trace": 1e-9}
DEFAULT_OPTIONS = {
    "b": "b0",
    "closed_samples": 6,
    "max_length": 60.0,
    "points_per_edge": 2000,
    "tau_nodes": 400,
    "slice_nodes": 200,
    "ring_points": 32,
    "criteria": list(range(1, 13)),
}


class ConfigError(ValueError):
    """Malformed or inconsistent job configuration."""


@dataclass(frozen=True)
class JobConfig:
    roots: tuple = ((0.0, 0.0), (1.0, 0.0), (1.0, -1.0))
    P: object = "zero"
    degrees: tuple = (24,)
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    out: str = "out"
    options: dict = field(default_factory=lambda: dict(DEFAULT_OPTIONS))

    @property
    def cubic(self) -> tuple:
        return tuple(complex(*r) for r in self.roots)

    @property
    def P_arg(self):
        if isinstance(self.P, str):
            return self.P
        return [complex(*c) for c in self.P]

    def operator(self) -> HeunOperator:
        return HeunOperator.from_roots(self.cubic, self.P_arg)

    def to_json(self) -> dict:
        return asdict(self)


def _pair(x, what: str) -> tuple:
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return (float(x), 0.0)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
        return (float(x[0]), float(x[1]))
    raise ConfigError(f"{what}: expected a number or a [re, im] pair, got {x!r}")


def parse_config(data: dict) -> JobConfig:
    """Validate a job document and fill in every default."""
    if not isinstance(data, dict):
        raise ConfigError("the job file must contain a JSON object")
    unknown = set(data) - {"roots", "P", "degrees", "tolerances", "out", "options"}
    if unknown:
        raise ConfigError(f"unknown keys: {sorted(unknown)}")
    base = JobConfig()
    roots = data.get("roots", base.roots)
    if not isinstance(roots, (list, tuple)) or len(roots) != 3:
        raise ConfigError("roots: expected three complex numbers")
    roots = tuple(_pair(r, "roots") for r in roots)
    P = data.get("P", base.P)
    if isinstance(P, str):
        if P not in ("zero", "lame"):
            raise ConfigError(f"P: expected 'zero', 'lame' or a coefficient list, got {P!r}")
    elif isinstance(P, (list, tuple)) and len(P) <= 3:
        P = tuple(_pair(c, "P") for c in P)
    else:
        raise ConfigError("P: at most three coefficients (ascending powers)")
    degrees = data.get("degrees", list(base.degrees))
    if not isinstance(degrees, (list, tuple)) or not degrees:
        raise ConfigError("degrees: expected a non-empty list of positive integers")
    if not all(isinstance(n, int) and not isinstance(n, bool) and 1 <= n <= MAX_DEGREE for n in degrees):
        raise ConfigError(f"degrees: each entry must be an integer in [1, {MAX_DEGREE}]")
    tol = dict(DEFAULT_TOLERANCES)
    given = data.get("tolerances", {})
    if not isinstance(given, dict) or set(given) - set(tol):
        raise ConfigError(f"tolerances: allowed keys are {sorted(tol)}")
    for k, v in given.items():
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not v > 0:
            raise ConfigError(f"tolerances.{k}: expected a positive number")
        tol[k] = float(v)
    opts = dict(DEFAULT_OPTIONS)
    given = data.get("options", {})
    if not isinstance(given, dict) or set(given) - set(opts):
        raise ConfigError(f"options: allowed keys are {sorted(opts)}")
    opts.update(given)
    crit = opts["criteria"]
    if not isinstance(crit, list) or not crit or not all(c in range(1, 13) for c in crit):
        raise ConfigError("options.criteria: expected a non-empty list drawn from 1..12")
    out = data.get("out", base.out)
    if not isinstance(out, str):
        raise ConfigError("out: expected a path")
    return JobConfig(roots, P, tuple(degrees), tol, out, opts)


def load_config(path: str) -> JobConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    return parse_config(data)


def _row(z: complex) -> str:
    return f"{float(z.real)!r},{float(z.imag)!r}"


def _map(threads: int, fn, items):
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# --- commands ---------------------------------------------------------------


def cmd_spectrum(cfg: JobConfig, out: Path, threads: int) -> int:
    op = cfg.operator()

    def job(n):
        res = solve(op, n, cluster_tol=cfg.tolerances["cluster"])
        return res, [stieltjes_roots(p) for p in res.pairs]

    for n, (res, sroots) in zip(cfg.degrees, _map(threads, job, cfg.degrees)):
        write_atomic(str(out / f"roots-n{n}.csv"), "re,im\n" + "".join(_row(t) + "\n" for t in res.t_roots))
        lines = ["pair,t_re,t_im,re,im\n"]
        for k, (p, rs) in enumerate(zip(res.pairs, sroots)):
            lines += [f"{k},{_row(p.t)},{_row(z)}\n" for z in rs]
        write_atomic(str(out / f"stieltjes-n{n}.csv"), "".join(lines))
        fig = Figure(title=f"Stieltjes roots, degree {n}")
        fig.dots("stieltjes_roots", [z for rs in sroots for z in rs], 1.2, "black")
        fig.dots("roots_of_Q", op.roots, 3.5, "#1f77b4")
        fig.dots("roots_of_V", res.t_roots, 5.0, "#d62728")
        fig.save(str(out / f"spectrum-n{n}.svg"))
        print(f"n = {n}: {len(res.pairs)} Van Vleck polynomials, certified = {res.provenance['certified']}")
    return EXIT_OK


def _gamma(cfg: JobConfig):
    r = CubicRoots(cfg.cubic)
    gq = build_gamma_q(r, arc_tol=cfg.tolerances["arc"], newton_tol=cfg.tolerances["newton"])
    return r, gq


def cmd_locus(cfg: JobConfig, out: Path, threads: int) -> int:
    r, gq = _gamma(cfg)
    write_json(str(out / "gamma-q.json"), gq.to_json())
    op = cfg.operator()
    results = _map(threads, lambda n: solve(op, n, cluster_tol=cfg.tolerances["cluster"]), cfg.degrees)
    fig = Figure(title="Locus of the Van Vleck roots")
    for arc in gq.arcs:
        fig.polyline(f"gamma_{arc.i + 1}", arc.points, 1.5, "#1f77b4")
    fig.dots("roots_of_Q", r.a, 3.5, "#1f77b4")
    for n, res in zip(cfg.degrees, results):
        fig.dots(f"Sp_{n}", res.t_roots, 1.8, "black")
    fig.save(str(out / "locus.svg"))
    print(f"b0 = {gq.b0:.12g}" + ("  (collinear roots: degenerate segment locus)" if gq.degenerate else ""))
    return EXIT_OK


def _resolve_b(cfg: JobConfig, r: CubicRoots) -> complex:
    spec = cfg.options["b"]
    if spec == "b0":
        return _gamma(cfg)[1].b0
    if isinstance(spec, dict):
        if set(spec) != {"arc", "fraction"} or spec["arc"] not in (1, 2, 3) or not 0 < spec["fraction"] < 1:
            raise ConfigError("options.b: expected {'arc': 1|2|3, 'fraction': value in (0, 1)}")
        _, gq = _gamma(cfg)
        i = spec["arc"] - 1
        if spec["fraction"] == 0.5:
            return arc_midpoint(r, gq, i)
        return project_onto(r, point_at_fraction(gq.arcs[i], spec["fraction"]), i)
    return complex(*_pair(spec, "options.b"))


def _closed_samples(qd, count: int, controls: TraceControls) -> list[np.ndarray]:
    """A few closed trajectories around the singular graph, for display."""
    diam = qd.diameter
    out = []
    for k in range(count):
        z = qd.center + (0.6 + 0.5 * k) * diam
        root = np.sqrt(qd.R(z))
        direction = np.conj(root) / abs(root)
        try:
            seg = trace(qd, z, direction, HORIZONTAL, controls)
        except HeunSpectraError:
            continue
        if seg.terminal == CLOSED:
            out.append(seg.points)
    return out


def cmd_trajectories(cfg: JobConfig, out: Path, threads: int) -> int:
    r = CubicRoots(cfg.cubic)
    b = _resolve_b(cfg, r)
    qd = heun_qdiff(r, b)
    controls = TraceControls(capture_tol=cfg.tolerances["trace"], max_length=float(cfg.options["max_length"]))
    graph = singular_graph(qd, controls)
    report = {"b": [b.real, b.imag], "status": graph.status, "is_strebel": graph.is_strebel}
    fig = Figure(title="Singular trajectories")
    for path in _closed_samples(qd, cfg.options["closed_samples"], controls):
        fig.polyline("closed", path, 0.6, "#aaaaaa")
    code = EXIT_OK
    if graph.is_strebel:
        graph = classify(graph)
        write_json(str(out / "kpsi.json"), graph.to_json())
        specs = enumerate_measures(qd, graph, cfg.options["points_per_edge"])
        report.update(
            d=graph.d,
            depths={str(f.id): f.depth for f in graph.faces},
            edges=[
                {"id": e.id, "endpoints": list(e.endpoints), "dividing": bool(e.dividing),
                 "preventing": bool(e.preventing), "mass": e.w_length / math.pi}
                for e in graph.edges
            ],
            admits_positive=admits_positive(graph),
            max_capture_gap=graph.max_gap(),
            measures=[s.describe() for s in specs],
        )
        for e in graph.edges:
            fig.polyline(f"edge_{e.id}", e.polyline, 2.5, "black")
        print(f"d = {graph.d}, {len(specs)} signed measures, admits_positive = {report['admits_positive']}")
    else:
        write_json(str(out / "kpsi.json"), graph.to_json())
        report["offending"] = [
            {"terminal": s.terminal, "origin": list(s.origin)}
            for s in graph.offending
        ]
        for s in graph.segments:
            fig.polyline("trajectory", s.points, 1.5, "black")
        print(f"warning: the singular graph is {graph.status}; no measures enumerated", file=sys.stderr)
    fig.dots("poles", [s.pos for s in qd.singular if s.kind == "pole"], 3.5, "#1f77b4")
    fig.dots("zeros", [s.pos for s in qd.singular if s.kind == "zero"], 4.0, "#d62728")
    fig.save(str(out / "kpsi.svg"))
    write_json(str(out / "kpsi-report.json"), report)
    return code


def cmd_measures(cfg: JobConfig, out: Path, threads: int) -> int:
    r = CubicRoots(cfg.cubic)
    op = cfg.operator()
    M = [build_Mi(r.a, i, cfg.options["tau_nodes"], cfg.options["slice_nodes"]) for i in range(3)]
    m = cfg.options["ring_points"]
    ring = [r.centroid + 10 * r.diameter * np.exp(2j * np.pi * k / m) for k in range(m)]
    for i, Mi in enumerate(M):
        write_atomic(str(out / f"M{i + 1}.csv"), _measure_csv(Mi))
    results = _map(threads, lambda n: solve(op, n, cluster_tol=cfg.tolerances["cluster"]), cfg.degrees)
    report = {
        "ring_radius": 10 * r.diameter,
        "pairwise_gaps": {f"M{i + 1}-M{j + 1}": balayage_gap(M[i], M[j], ring) for i in range(3) for j in range(i + 1, 3)},
        "degrees": {},
    }
    for n, res in zip(cfg.degrees, results):
        write_atomic(str(out / f"mu-n{n}.csv"), _measure_csv(res.measure))
        report["degrees"][str(n)] = {
            "gap_to_M": [balayage_gap(Mi, res.measure, ring) for Mi in M],
            "ct_residual": {
                f"{z.real:g}{z.imag:+g}i": abs(ct_ode_residual(res.measure, op.Q, z)) for z in (5, 5j, -4 - 4j)
            },
        }
    write_json(str(out / "measures.json"), report)
    print("largest pairwise gap among M_i:", f"{max(report['pairwise_gaps'].values()):.3e}")
    return EXIT_OK


def _measure_csv(m: DiscreteMeasure) -> str:
    rows = "".join(f"{_row(z)},{float(w)!r}\n" for z, w in zip(m.points, m.weights))
    return "re,im,weight\n" + rows


def cmd_verify(cfg: JobConfig, out: Path, threads: int) -> int:
    suite = SuiteConfig(
        roots=cfg.cubic,
        P=cfg.P_arg if isinstance(cfg.P, str) else tuple(cfg.P_arg),
        cluster_tol=cfg.tolerances["cluster"],
        criteria=tuple(cfg.options["criteria"]),
    )
    report = run_suite(suite, progress=lambda res: print(res.line(), flush=True))
    write_json(str(out / "verify.json"), report.to_json())
    n_fail = sum(not r.passed for r in report.results)
    print(f"{len(report.results) - n_fail}/{len(report.results)} criteria passed, runtime {report.seconds:.1f} s")
    return EXIT_OK if report.passed else EXIT_VERIFY


HANDLERS = {
    "spectrum": cmd_spectrum,
    "locus": cmd_locus,
    "trajectories": cmd_trajectories,
    "measures": cmd_measures,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heun-spectra", description=__doc__.split("\n\n")[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON job file (defaults apply when omitted)")
    parser.add_argument("--out", help="output directory (overrides the job file)")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for independent sub-jobs")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = None
    try:
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        cfg = load_config(args.config) if args.config else parse_config({})
        if args.out:
            cfg = replace(cfg, out=args.out)
        out = Path(cfg.out)
        write_json(str(out / "config.json"), cfg.to_json())
        return HANDLERS[args.command](cfg, out, args.threads)
    except ConfigError as exc:
        print(f"heun-spectra: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (HeunSpectraError, ValueError, ArithmeticError) as exc:
        error = {"command": args.command, "error": type(exc).__name__, "message": str(exc)}
        diagnostics = getattr(exc, "diagnostics", None)
        if diagnostics:
            error["diagnostics"] = {k: repr(v) for k, v in diagnostics.items()}
        if out is not None:
            write_json(str(out / "error.json"), error)
        print(f"heun-spectra: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
