"""Command-line front end.

Every subcommand except ``plotdata`` writes one JSON report (schema 1) to
stdout or ``--out``.  Exit codes: 0 success, 1 bad input, 2 a verification
in the report failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from fractions import Fraction
from typing import Sequence

from . import __version__
from .critical import CriticalPoint, SolverConfig, SolverError, filter_in_domain, solve_critical
from .polytope import LatticePolytope, PolytopeError, inflate, log_map, parse_polytope
from .qcoh import BENCHMARKS, MultisetMatch, benchmark_matrix, eigenvalues, match_multisets
from .superpotential import FAMILIES, SuperpotentialError, SuperpotentialSpec, family, toric_superpotential
from .wallcross import (PRESETS, GluingError, classical_neg_map, classical_pos_map, lost_values, monodromy,
                        preset, verify_chart_identity)

log = logging.getLogger("lgwb")

SCHEMA = 1
EXIT_OK, EXIT_INPUT, EXIT_VERIFY = 0, 1, 2
EIGEN_TOL = 1e-8
EXPECTED_MONODROMY = [[1, 0], [1, 1]]


class InputError(Exception):
    pass


# JSON output.  The stdlib encoder prints floats with repr(), which is not a
# fixed number of digits, so the report is serialized by hand.

def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    s = format(x, ".17g")
    if s == "-0":
        s = "0"
    return s


def _dump(obj, indent: int = 0) -> str:
    pad = "  " * (indent + 1)
    end = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_dump(str(k))}: {_dump(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_dump(v) for v in obj) + "]"
        items = [pad + _dump(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(report: dict) -> str:
    return _dump(report) + "\n"


def _c(z: complex) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def _point(p: CriticalPoint) -> dict:
    return {
        "z": [_c(v) for v in p.z],
        "log": list(log_map(p.z)),
        "value": _c(p.value),
        "residual": p.residual,
        "basin_count": p.basin_count,
        "degenerate": p.degenerate,
        "in_domain": p.in_domain,
    }


def _match(m: MultisetMatch) -> dict:
    return {
        "pairs": [{"a": _c(a), "b": _c(b), "distance": d} for a, b, d in m.pairs],
        "max_distance": m.max_distance,
        "unmatched_a": [_c(v) for v in m.unmatched_a],
        "unmatched_b": [_c(v) for v in m.unmatched_b],
        "tol": m.tol,
        "ok": m.ok,
    }


def _config(cfg: SolverConfig) -> dict:
    return {
        "newton_tol": cfg.newton_tol,
        "max_iter": cfg.max_iter,
        "dedup_tol": cfg.dedup_tol,
        "grid_angles": cfg.grid_angles,
        "seed": cfg.rng_seed,
    }


def _report(command: str, input_echo: dict, cfg: SolverConfig | None) -> dict:
    return {
        "schema": SCHEMA,
        "tool_version": __version__,
        "command": command,
        "input_echo": input_echo,
        "config_echo": _config(cfg) if cfg is not None else None,
    }


# Benchmark detection.  Areas are read off the facet offsets: for the
# standard simplex the line class has area sum(offsets); for the square each
# factor's area is the sum of the two opposite offsets.

def _benchmark_areas(P: LatticePolytope, space: str) -> list[float]:
    normals = {nu: off for nu, off in zip(P.normals, P.offsets)}
    n = P.dim
    if space in ("cp1", "cp2", "cp3"):
        k = int(space[2])
        units = [tuple(int(i == j) for j in range(n)) for i in range(n)]
        want = set(units) | {(-1,) * n}
        if n != k or set(normals) != want:
            raise InputError(f"polytope is not the standard {space} simplex")
        return [float(sum(P.offsets, Fraction(0)))]
    if space == "p1p1":
        want = {(1, 0), (0, 1), (-1, 0), (0, -1)}
        if n != 2 or set(normals) != want:
            raise InputError("polytope is not the standard p1p1 square")
        return [float(normals[(1, 0)] + normals[(-1, 0)]), float(normals[(0, 1)] + normals[(0, -1)])]
    raise InputError(f"unknown benchmark {space!r}; choose from {', '.join(BENCHMARKS)}")


def _detect_benchmark(P: LatticePolytope) -> tuple[str, list[float]]:
    for space in BENCHMARKS:
        try:
            return space, _benchmark_areas(P, space)
        except InputError:
            continue
    raise InputError("polytope does not match any benchmark space (cp1, cp2, cp3, p1p1)")


def _eigen_check(space: str, areas: Sequence[float], points: Sequence[CriticalPoint]) -> dict:
    ev = eigenvalues(benchmark_matrix(space, areas))
    m = match_multisets(ev, [p.value for p in points], EIGEN_TOL)
    return {
        "benchmark": space,
        "areas": list(areas),
        "eigenvalues": [_c(v) for v in sorted(ev, key=lambda v: (v.real, v.imag))],
        "match": _match(m),
        "ok": m.ok,
    }


# Subcommands.

def _solver_config(args) -> SolverConfig:
    try:
        return SolverConfig(grid_angles=args.grid_angles, newton_tol=args.newton_tol, max_iter=args.max_iter,
                            dedup_tol=args.dedup_tol, rng_seed=args.seed)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _load_polytope(path: str, k: float | None) -> LatticePolytope:
    try:
        with open(path, encoding="utf-8") as fh:
            P = parse_polytope(fh.read())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    if k is not None:
        try:
            P = inflate(P, k)
        except (PolytopeError, ValueError) as exc:
            raise InputError(str(exc)) from exc
    return P


def _solve(W: SuperpotentialSpec, cfg: SolverConfig) -> list[CriticalPoint]:
    pts = solve_critical(W, cfg)
    if W.domain is not None:
        pts = filter_in_domain(pts, W.domain)
    return pts


def _points_section(report: dict, W: SuperpotentialSpec, pts: list[CriticalPoint]) -> None:
    report["superpotential"] = {
        "variables": list(W.variable_names),
        "text": W.to_text(),
        "parameters": {n: {"definition": b.definition, "value": b.value} for n, b in W.parameter_bindings.items()},
        "chart": W.chart_label,
    }
    report["critical_points"] = [_point(p) for p in pts]
    report["summary"] = {
        "count": len(pts),
        "in_domain": None if W.domain is None else sum(1 for p in pts if p.in_domain),
    }


def cmd_analyze(args) -> tuple[dict, int]:
    cfg = _solver_config(args)
    P = _load_polytope(args.polytope, args.inflate)
    W = toric_superpotential(P, "symbolic")
    pts = _solve(W, cfg)
    report = _report(args.command, {"polytope": P.to_dict(), "inflate": args.inflate}, cfg)
    _points_section(report, W, pts)
    code = EXIT_OK
    check = None
    if args.benchmark:
        check = _eigen_check(args.benchmark, _benchmark_areas(P, args.benchmark), pts)
    elif args.lambda_check:
        space, areas = _detect_benchmark(P)
        check = _eigen_check(space, areas, pts)
    report["eigenvalue_check"] = check
    if check is not None and not check["ok"]:
        code = EXIT_VERIFY
    return report, code


_FAMILY_BENCH = {"cp2_clifford": "cp2", "cp2_chekanov": "cp2", "p1p1_clifford": "p1p1", "p1p1_chekanov": "p1p1"}


def _family_params(args) -> dict:
    name = args.name
    if name.startswith("cp2"):
        return {"lam": args.lam if args.lam is not None else 3 * math.log(10)}
    if name.startswith("p1p1"):
        l1 = args.l1 if args.l1 is not None else 2 * math.log(10)
        return {"lam1": l1, "lam2": args.l2 if args.l2 is not None else l1}
    m = args.m if args.m is not None else 3
    b = args.b if args.b is not None else math.log(10)
    a = args.a if args.a is not None else m * b + 3
    return {"m": m, "a": a, "b": b}


def cmd_family(args) -> tuple[dict, int]:
    cfg = _solver_config(args)
    params = _family_params(args)
    W = family(args.name, "symbolic", **params)
    pts = _solve(W, cfg)
    report = _report(args.command, {"family": args.name, "params": params}, cfg)
    _points_section(report, W, pts)
    check = None
    if args.benchmark or args.lambda_check:
        space = _FAMILY_BENCH.get(args.name)
        if space is None or (args.benchmark and args.benchmark != space):
            raise InputError(f"no eigenvalue benchmark for family {args.name}")
        areas = [params["lam"]] if space == "cp2" else [params["lam1"], params["lam2"]]
        check = _eigen_check(space, areas, pts)
    report["eigenvalue_check"] = check
    return report, EXIT_VERIFY if check is not None and not check["ok"] else EXIT_OK


def cmd_wallcross(args) -> tuple[dict, int]:
    cfg = _solver_config(args)
    lam = args.lam if args.preset != "p1p1" else args.l1
    pr = preset(args.preset, lam=lam, lam2=args.l2, classical=args.classical)
    verdict = verify_chart_identity(pr.src, pr.dst, pr.gluing)
    mono = monodromy(classical_pos_map(), classical_neg_map())
    lost = lost_values(pr.src.numeric(), pr.dst.numeric(), pr.gluing, cfg=cfg)
    echo = {
        "preset": args.preset,
        "classical": args.classical,
        "source": {"chart": pr.src.chart_label, "variables": list(pr.src.variable_names), "text": pr.src.to_text()},
        "target": {"chart": pr.dst.chart_label, "variables": list(pr.dst.variable_names), "text": pr.dst.to_text()},
        "parameters": {n: {"definition": b.definition, "value": b.value}
                       for n, b in {**pr.src.parameter_bindings, **pr.dst.parameter_bindings}.items()},
        "map": pr.gluing.to_text(),
    }
    report = _report(args.command, echo, cfg)
    report["verdicts"] = {
        "gluing": verdict.to_dict(pr.dst.variable_names),
        "monodromy": {"matrix": mono, "expected": EXPECTED_MONODROMY, "ok": mono == EXPECTED_MONODROMY},
        "lost_values": {
            "source_values": [_c(v) for v in lost.src_values],
            "target_values": [_c(v) for v in lost.dst_values],
            "lost_on_source": [_c(v) for v in lost.lost_on_src],
            "lost_on_target": [_c(v) for v in lost.lost_on_dst],
            "unmappable_target_points": [_point(p) for p in lost.unmappable],
            "match": _match(lost.match),
        },
    }
    ok = verdict.identity_holds and mono == EXPECTED_MONODROMY
    return report, EXIT_OK if ok else EXIT_VERIFY


def _cyclic(P: LatticePolytope) -> list[tuple[float, ...]]:
    pts = [v.moment() for v in P.vertices]
    cx = sum(p[0] for p in pts) / len(pts)
    cy = sum(p[1] for p in pts) / len(pts)
    return sorted(pts, key=lambda p: math.atan2(p[1] - cy, p[0] - cx))


def cmd_plotdata(args) -> tuple[str, int]:
    cfg = _solver_config(args)
    if os.path.exists(args.subject):
        P = _load_polytope(args.subject, args.inflate)
        W = toric_superpotential(P, "symbolic")
    elif args.subject in FAMILIES:
        W = family(args.subject, "symbolic", **_family_params(argparse.Namespace(**{**vars(args), "name": args.subject})))
        if W.domain is None:
            raise InputError(f"family {args.subject} has no polytope to plot")
        P = W.domain
        if args.inflate is not None:
            P = inflate(P, args.inflate)
            W = toric_superpotential(P, "symbolic")
    else:
        raise InputError(f"{args.subject} is neither a polytope file nor a family with a polytope")
    if P.dim != 2:
        raise InputError("plotdata needs a 2-dimensional polytope")
    pts = _solve(W, cfg)
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["kind", "index", "x", "y", "in_domain", "value_re", "value_im"])
    loop = _cyclic(P)
    for i, v in enumerate(loop):
        out.writerow(["vertex", i, _fmt_float(v[0]), _fmt_float(v[1]), "", "", ""])
    out.writerow(["close", len(loop), _fmt_float(loop[0][0]), _fmt_float(loop[0][1]), "", "", ""])
    for i, p in enumerate(pts):
        x, y = log_map(p.z)
        out.writerow(["critical", i, _fmt_float(x), _fmt_float(y), str(bool(p.in_domain)).lower(),
                      _fmt_float(p.value.real), _fmt_float(p.value.imag)])
    return buf.getvalue(), EXIT_OK


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("solver")
    g.add_argument("--newton-tol", type=float, default=1e-10)
    g.add_argument("--grid-angles", type=int, default=None)
    g.add_argument("--max-iter", type=int, default=100)
    g.add_argument("--dedup-tol", type=float, default=1e-6)
    g.add_argument("--seed", type=int, default=0)


def _add_family_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("family parameters")
    g.add_argument("--lambda", dest="lam", type=float, default=None, help="line area for cp2 (default 3 ln 10)")
    g.add_argument("--l1", type=float, default=None, help="first factor area for p1p1 (default 2 ln 10)")
    g.add_argument("--l2", type=float, default=None, help="second factor area for p1p1 (default --l1)")
    g.add_argument("--m", type=int, default=None, help="Hirzebruch twist (default 3)")
    g.add_argument("--a", type=float, default=None, help="Hirzebruch zero-section area (default m*b + 3)")
    g.add_argument("--b", type=float, default=None, help="Hirzebruch fiber area (default ln 10)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lgwb", description="Toric superpotentials, critical points and wall-crossing checks.")
    parser.add_argument("--version", action="version", version=f"lgwb {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (("analyze", "superpotential and critical points of a polytope"),
                            ("renormalize", "analyze after inflating the polytope by --inflate")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("polytope", help="polytope JSON file")
        p.add_argument("--inflate", type=float, required=name == "renormalize", default=None,
                       help="add k to every stored offset 2*pi*alpha")
        p.add_argument("--benchmark", choices=BENCHMARKS, default=None)
        p.add_argument("--lambda-check", action="store_true", help="detect the benchmark space and compare eigenvalues")
        p.add_argument("--out", default=None)
        _add_solver_flags(p)

    p = sub.add_parser("family", help="closed-form superpotential families")
    p.add_argument("name", choices=FAMILIES)
    _add_family_flags(p)
    p.add_argument("--benchmark", choices=BENCHMARKS, default=None)
    p.add_argument("--lambda-check", action="store_true")
    p.add_argument("--out", default=None)
    _add_solver_flags(p)

    p = sub.add_parser("wallcross", help="chart gluing, monodromy and lost critical values")
    p.add_argument("preset", choices=PRESETS)
    p.add_argument("--classical", action="store_true", help="use the uncorrected monomial gluing")
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--l1", type=float, default=None)
    p.add_argument("--l2", type=float, default=None)
    p.add_argument("--out", default=None)
    _add_solver_flags(p)

    p = sub.add_parser("plotdata", help="CSV of the polygon outline and Log images of critical points")
    p.add_argument("subject", help="polytope JSON file or a family with a polytope")
    p.add_argument("--inflate", type=float, default=None)
    _add_family_flags(p)
    p.add_argument("--out", default=None)
    _add_solver_flags(p)
    return parser


_COMMANDS = {"analyze": cmd_analyze, "renormalize": cmd_analyze, "family": cmd_family,
             "wallcross": cmd_wallcross, "plotdata": cmd_plotdata}


def _setup_logging() -> None:
    level = os.environ.get("LGWB_LOG")
    if level:
        logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO), stream=sys.stderr,
                            format="%(levelname)s %(name)s: %(message)s")


def main(argv: Sequence[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; usage errors are input errors here.
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        result, code = _COMMANDS[args.command](args)
    except (InputError, PolytopeError, SuperpotentialError, GluingError, SolverError, ValueError) as exc:
        print(f"lgwb: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = result if isinstance(result, str) else dumps(result)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"lgwb: error: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
            return EXIT_INPUT
    else:
        sys.stdout.write(text)
    log.info("%s finished with exit code %d", args.command, code)
    return code


if __name__ == "__main__":
    sys.exit(main())
