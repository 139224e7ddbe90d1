"""Command-line front end: generate families, run checks, build sequences, plot scenes.

Exit codes: 0 holds / found, 1 fails, 2 usage or schema error, 3 inconclusive, 4 stuck.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import families as fam
from .errors import (
    Inconclusive,
    StreamExhausted,
    StuckError,
    TooLarge,
    TransversalLabError,
    UnsupportedCase,
)
from .geometry import KFlat
from .io import (
    FamilyFile,
    SchemaError,
    body_to_json,
    canonical_dumps,
    dumps_family,
    flat_to_json,
    loads_family,
    read_text,
    write_text,
)
from .sequences import FamilyStream, build_exclusion_cone, build_independent, greedy_disjoint_heterochromatic
from .stabbing import min_piercing_number
from .svg import render_svg
from .transversal import has_pq_property, is_k_dependent, transversal
from .verifier import (
    FAILS,
    HOLDS,
    INCONCLUSIVE,
    audit_heterochromatic,
    audit_strict_heterochromatic,
    compactness_check,
    independent_certificate_check,
    piercing_growth,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INCONCLUSIVE, EXIT_STUCK = 0, 1, 2, 3, 4
DEFAULT_SEED = 0
SEED_ENV = "TRANSVERSAL_LAB_SEED"
STUCK = "stuck"


class UsageError(Exception):
    pass


def parse_range(text: str) -> list[int]:
    """'2..12' (inclusive), '3' or '2,5,7'."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a range like 2..12 or a list like 1,2,3, got {text!r}")


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None or env == "":
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}")


def _emit(args, text: str):
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        write_text(args.out, text)


def _report(args, verdict: str, coverage=None, certificates=(), **extra) -> None:
    doc = {
        "command": args.command_name,
        "verdict": verdict,
        "coverage": coverage or {},
        "certificates": list(certificates),
        "seed": args.seed_value,
    }
    doc.update(extra)
    _emit(args, canonical_dumps(doc) + "\n")


def _load(path) -> FamilyFile:
    return loads_family(read_text(path))


def _selected(F: FamilyFile, indices):
    if indices is None:
        return list(F.bodies)
    n = len(F.bodies)
    if any(i < 1 or i > n for i in indices):
        raise UsageError(f"indices must lie in 1..{n}")
    return [F.bodies[i - 1] for i in indices]


def _answer_json(ans) -> dict:
    w = ans.witness
    if w is None:
        wj = None
    elif isinstance(w, KFlat):
        wj = flat_to_json(w)
    else:
        wj = [float(x) for x in np.asarray(w, dtype=float)]
    return {"status": ans.status, "certified": ans.certified, "method": ans.method, "value": ans.value, "witness": wj}


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------


def _gen(args) -> FamilyFile:
    g = args.generator
    bodies, labels = [], []
    params: dict = {}
    if g in ("tangent-rects", "right-triangles", "lifted-rects"):
        make = {
            "tangent-rects": lambda n, i: fam.gen_tangent_rect(fam.TangentRectSpec(n, i)),
            "right-triangles": fam.gen_right_triangles,
            "lifted-rects": fam.gen_lifted_rect,
        }[g]
        params = {"n": args.n, "i": args.i}
        for n in args.n:
            for i in args.i:
                bodies.append(make(n, i))
                labels.append([n, i])
    elif g == "unit-ball-grid":
        params = {"rows": args.rows, "cols": args.cols}
        for n in args.rows:
            size = {1: 1, 2: 4}.get(n)
            for j in args.cols:
                if size is not None and j > size:
                    continue
                bodies.append(fam.gen_unit_ball_grid(n, j))
                labels.append([n, j])
    elif g == "rows":
        params = {"rows": args.rows, "cols": args.cols}
        for n in args.rows:
            for j in args.cols:
                bodies.append(fam.row_ball(n, j))
                labels.append([n, j])
    elif g == "cone-disks":
        params = {"rows": args.rows, "cols": args.cols}
        for n in args.rows:
            for j in args.cols:
                bodies.append(fam.cone_layout_disk(n, j))
                labels.append([n, j])
    elif g == "ball-with-tail":
        params = {"m": args.m}
        for m in args.m:
            bodies.append(fam.gen_ball_with_tail(m))
            labels.append([m, 1])
    elif g == "ai-packing":
        params = {"base": args.base, "margin": args.margin}
        groups, multisets = fam.gen_impossibility_prefix(args.base, args.margin)
        for f, group in enumerate(groups, start=1):
            for j, B in enumerate(group, start=1):
                bodies.append(B)
                labels.append([f, j])
        params["multisets"] = [list(m) for m in multisets]
    else:  # argparse restricts the choices
        raise UsageError(f"unknown generator {g!r}")
    if not bodies:
        raise UsageError("the parameter ranges select no bodies")
    return FamilyFile(bodies[0].dim, bodies, {"name": g, "params": params}, labels)


def cmd_gen(args) -> int:
    _emit(args, dumps_family(_gen(args)))
    return EXIT_OK


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------


def _check_pierce(args) -> int:
    bodies = _selected(_load(args.family), args.indices)
    try:
        count, points = min_piercing_number(bodies, args.k)
    except (TooLarge, UnsupportedCase) as exc:
        _report(args, INCONCLUSIVE, {"bodies": len(bodies)}, [], reason=str(exc))
        return EXIT_INCONCLUSIVE
    certs = [{"piercing_number": count, "points": [[float(x) for x in p] for p in points]}]
    holds = args.m is None or count <= args.m
    _report(args, HOLDS if holds else FAILS, {"bodies": len(bodies)}, certs, m=args.m)
    return EXIT_OK if holds else EXIT_FAIL


def _check_transversal(args) -> int:
    bodies = _selected(_load(args.family), args.indices)
    ans = transversal(args.k, bodies, args.budget, args.seed_value)
    cov = {"bodies": len(bodies), "k": args.k}
    if ans.pierced:
        _report(args, HOLDS, cov, [_answer_json(ans)])
        return EXIT_OK
    if ans.certified_empty:
        _report(args, FAILS, cov, [_answer_json(ans)])
        return EXIT_FAIL
    _report(args, INCONCLUSIVE, cov, [_answer_json(ans)])
    return EXIT_INCONCLUSIVE


def _check_kdep(args) -> int:
    bodies = _selected(_load(args.family), args.indices)
    cov = {"bodies": len(bodies), "k": args.k}
    try:
        cert = is_k_dependent(bodies, args.k, args.budget, args.seed_value, args.threads)
    except Inconclusive as exc:
        _report(args, INCONCLUSIVE, cov, [], unknown=[list(u) for u in exc.unknown])
        return EXIT_INCONCLUSIVE
    if cert is None:
        _report(args, FAILS, cov, [])
        return EXIT_FAIL
    idx = list(cert.indices)
    if args.indices is not None:
        idx = [args.indices[i - 1] for i in idx]
    _report(args, HOLDS, cov, [{"indices": idx, "flat": flat_to_json(cert.flat) if isinstance(cert.flat, KFlat)
                                else [float(x) for x in np.asarray(cert.flat)]}])
    return EXIT_OK


def _check_pq(args) -> int:
    bodies = _selected(_load(args.family), args.indices)
    cov = {"bodies": len(bodies), "p": args.p, "q": args.q, "k": args.k}
    try:
        holds, bad = has_pq_property(bodies, args.p, args.q, args.k, args.budget, args.seed_value)
    except Inconclusive as exc:
        _report(args, INCONCLUSIVE, cov, [], unknown=[list(u) for u in exc.unknown])
        return EXIT_INCONCLUSIVE
    if holds:
        _report(args, HOLDS, cov, [])
        return EXIT_OK
    _report(args, FAILS, cov, [], counterexample=list(bad))
    return EXIT_FAIL


def _check_audit(args) -> int:
    F = _load(args.family)
    groups = F.families()
    if args.mode == "strict":
        rep = audit_strict_heterochromatic(groups, args.k, args.budget, args.seed_value, args.threads)
    else:
        rep = audit_heterochromatic(groups, args.k, args.budget, args.seed_value, args.length, args.threads)
    extra = {"property": rep.property, "params": rep.params, "unknown": [list(map(list, u)) for u in rep.unknown]}
    if rep.counterexample is not None:
        extra["counterexample"] = [list(p) for p in rep.counterexample]
    _report(args, rep.verdict, rep.coverage, [], **extra)
    return {HOLDS: EXIT_OK, FAILS: EXIT_FAIL}.get(rep.verdict, EXIT_INCONCLUSIVE)


def _check_growth(args) -> int:
    bodies = _load(args.family).bodies
    if max(args.sizes) > len(bodies):
        raise UsageError(f"sizes exceed the {len(bodies)} bodies in the file")
    curve = piercing_growth(bodies, args.sizes, args.k)
    cert = {"sizes": list(curve.sizes), "exact": list(curve.exact), "lower": list(curve.lower),
            "upper": list(curve.upper), "k": curve.k}
    verdict = HOLDS if all(e is not None for e in curve.exact) else INCONCLUSIVE
    _report(args, verdict, {"sizes": len(curve.sizes)}, [cert])
    return EXIT_OK if verdict == HOLDS else EXIT_INCONCLUSIVE


def _check_escape(args) -> int:
    doc = json.loads(read_text(args.points))
    pts = doc["points"] if isinstance(doc, dict) else doc
    try:
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    except (ValueError, TypeError):
        raise SchemaError("points must be a list of [x, y] pairs")
    cert = fam.escape_rectangle(pts)
    _report(args, HOLDS, {"points": len(pts)}, [{
        "n0": cert.n0, "i0": cert.i0, "delta": cert.delta, "lambda": cert.lam,
        "clearance": cert.clearance, "margin": cert.margin, "rect": body_to_json(cert.rect),
    }])
    return EXIT_OK


def _check_compactness(args) -> int:
    bodies = _selected(_load(args.family), args.indices)
    cov = {"bodies": len(bodies), "t": args.t, "m": args.m, "k": args.k}
    try:
        rep = compactness_check(bodies, args.t, args.m, args.k)
    except Inconclusive:
        _report(args, INCONCLUSIVE, cov, [])
        return EXIT_INCONCLUSIVE
    extra = {"hypothesis_holds": rep.hypothesis_holds, "whole_pierceable": rep.whole_pierceable,
             "contradiction": rep.contradiction}
    if rep.failing_subset is not None:
        extra["failing_subset"] = list(rep.failing_subset)
    verdict = FAILS if rep.contradiction else HOLDS
    _report(args, verdict, cov, [], **extra)
    return EXIT_FAIL if rep.contradiction else EXIT_OK


def _check_independent(args) -> int:
    bodies = _selected(_load(args.family), args.indices)
    try:
        rep = independent_certificate_check(bodies, args.k)
    except Inconclusive as exc:
        _report(args, INCONCLUSIVE, {"bodies": len(bodies)}, [], unknown=[list(u) for u in exc.unknown])
        return EXIT_INCONCLUSIVE
    extra = {"counterexample": list(rep.counterexample)} if rep.counterexample else {}
    _report(args, rep.verdict, rep.coverage, [], **extra)
    return EXIT_OK if rep.verdict == HOLDS else EXIT_FAIL


CHECKS = {
    "pierce": _check_pierce,
    "transversal": _check_transversal,
    "kdep": _check_kdep,
    "pq": _check_pq,
    "audit": _check_audit,
    "growth": _check_growth,
    "escape": _check_escape,
    "compactness": _check_compactness,
    "independent": _check_independent,
}


def cmd_check(args) -> int:
    return CHECKS[args.check](args)


# ---------------------------------------------------------------------------
# build
# ---------------------------------------------------------------------------


def _streams(F: FamilyFile):
    """One stream per family label, plus a map from body identity to its (family, member) label."""
    labels = F.labels or [[i + 1, 1] for i in range(len(F.bodies))]
    groups: dict[int, list] = {}
    where = {}
    for (f, j), B in zip(labels, F.bodies):
        groups.setdefault(int(f), []).append(B)
        where[id(B)] = [int(f), int(j)]
    streams = [FamilyStream.from_list(f, groups[f], name=f"F{f}") for f in sorted(groups)]
    return streams, where


def _sequence_file(F: FamilyFile, bodies, where, extra) -> str:
    labels = [where[id(B)] for B in bodies]
    dim = bodies[0].dim if bodies else F.dim
    return dumps_family(FamilyFile(dim, list(bodies), {"name": "sequence", "params": {}}, labels, extra))


def cmd_build(args) -> int:
    F = _load(args.streams)
    streams, where = _streams(F)
    if args.M < 0:
        raise UsageError("M must be non-negative")
    try:
        if args.kind == "disjoint-hetero":
            chain = greedy_disjoint_heterochromatic(streams, args.M)
            bodies = chain.bodies
            certs = [{"pairwise_disjoint": True, "length": len(bodies)}]
        else:
            if F.dim != 2:
                raise UsageError("independent-k1-d2 needs planar streams")
            direction = tuple(args.direction)
            state = build_independent(streams, args.M, 1, direction)
            bodies = state.bodies
            certs = []
            for m in range(1, len(bodies)):
                prefix = type(state)(state.chosen[:m], 1, direction)
                cone = build_exclusion_cone(prefix)
                certs.append({"step": m + 1, "cone": {"apex": list(cone.apex), "axis": list(cone.axis),
                                                       "half_angle": cone.half_angle}})
            if len(bodies) >= 3:
                rep = independent_certificate_check(bodies, 1)
                certs.append({"triples_certified_empty": rep.coverage["count"]})
    except (StuckError, StreamExhausted) as exc:
        diag = {"reason": str(exc)}
        if isinstance(exc, StreamExhausted):
            diag["family"] = exc.family
        else:
            diag.update({k: v for k, v in exc.diagnostics.items() if isinstance(v, (int, float, str))})
        _emit(args, canonical_dumps({"command": "build", "verdict": STUCK, "diagnostics": diag,
                                     "seed": args.seed_value}) + "\n")
        return EXIT_STUCK
    _emit(args, _sequence_file(F, bodies, where, {"certificates": certs, "kind": args.kind}))
    return EXIT_OK


# ---------------------------------------------------------------------------
# plot
# ---------------------------------------------------------------------------


def cmd_plot(args) -> int:
    F = _load(args.family)
    heights = None
    if F.dim == 3:
        heights = [float(np.mean([b.reference_point()[2]])) for b in F.bodies]
    elif F.dim != 2:
        raise UsageError("plotting supports dimensions 2 and 3")
    highlight = args.highlight or (F.generator or {}).get("name") == "sequence"
    _emit(args, render_svg(F.bodies, highlight, args.unit_circle, args.axes, heights))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _common(p):
    p.add_argument("--seed", type=int, default=None, help=f"random seed (default ${SEED_ENV} or {DEFAULT_SEED})")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="worker threads (default: all cores)")
    p.add_argument("--out", default=None, help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="transversal-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a family file")
    g.add_argument("generator", choices=["tangent-rects", "right-triangles", "lifted-rects", "unit-ball-grid",
                                         "ball-with-tail", "ai-packing", "rows", "cone-disks"])
    g.add_argument("--n", type=parse_range, default=parse_range("2..12"))
    g.add_argument("--i", type=parse_range, default=parse_range("1..4"))
    g.add_argument("--rows", type=parse_range, default=None)
    g.add_argument("--cols", type=parse_range, default=None)
    g.add_argument("--m", type=parse_range, default=parse_range("1..6"))
    g.add_argument("--base", type=int, default=3, help="number of base disks for ai-packing")
    g.add_argument("--margin", type=float, default=10.0, help="packing margin around the base disks")
    _common(g)
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("check", help="run a check and write a JSON report")
    c.add_argument("check", choices=sorted(CHECKS))
    c.add_argument("--family", help="family file")
    c.add_argument("--points", help="point-set file for escape")
    c.add_argument("--k", type=int, default=0)
    c.add_argument("--indices", type=parse_range, default=None, help="1-based body indices")
    c.add_argument("--p", type=int, default=None)
    c.add_argument("--q", type=int, default=None)
    c.add_argument("--m", type=int, default=None)
    c.add_argument("--t", type=int, default=None)
    c.add_argument("--sizes", type=parse_range, default=None)
    c.add_argument("--mode", choices=["strict", "hetero"], default="strict")
    c.add_argument("--length", type=int, default=None)
    c.add_argument("--budget", type=int, default=None)
    _common(c)
    c.set_defaults(func=cmd_check)

    b = sub.add_parser("build", help="build a sequence from family streams")
    b.add_argument("kind", choices=["disjoint-hetero", "independent-k1-d2"])
    b.add_argument("--streams", required=True)
    b.add_argument("--M", type=int, required=True)
    b.add_argument("--direction", type=float, nargs=2, default=(1.0, 0.0))
    _common(b)
    b.set_defaults(func=cmd_build)

    p = sub.add_parser("plot", help="render a family or sequence file as SVG")
    p.add_argument("--family", required=True)
    p.add_argument("--unit-circle", action="store_true")
    p.add_argument("--axes", action="store_true")
    p.add_argument("--highlight", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_plot)
    return parser


_REQUIRED = {
    "pierce": ("family",), "transversal": ("family",), "kdep": ("family",), "pq": ("family", "p", "q"),
    "audit": ("family",), "growth": ("family", "sizes"), "escape": ("points",), "compactness": ("family", "t", "m"),
    "independent": ("family",),
}
_GEN_DEFAULTS = {"unit-ball-grid": ("3..6", "1..8"), "rows": ("1..12", "1..12"), "cone-disks": ("1..6", "1..24")}


def _normalize(args):
    if args.command == "gen" and args.generator in _GEN_DEFAULTS:
        rows, cols = _GEN_DEFAULTS[args.generator]
        args.rows = args.rows or parse_range(rows)
        args.cols = args.cols or parse_range(cols)
    if args.command == "check":
        missing = [f"--{n}" for n in _REQUIRED[args.check] if getattr(args, n) is None]
        if missing:
            raise UsageError(f"check {args.check} needs {', '.join(missing)}")
        if args.budget is None:
            args.budget = 1000 if args.check == "audit" else 64
    if args.threads < 1:
        raise UsageError("--threads must be at least 1")
    args.command_name = args.command + (f" {args.check}" if args.command == "check" else "")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.seed_value = _resolve_seed(args)
        _normalize(args)
        return args.func(args)
    except (UsageError, SchemaError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"transversal-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Inconclusive as exc:
        print(f"transversal-lab: inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except (TransversalLabError, ValueError) as exc:
        print(f"transversal-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
