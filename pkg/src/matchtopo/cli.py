"""``matchtopo`` command line.

Reports are ``{"command", "inputs", "data", "meta"}``. Only ``meta``
carries run-dependent values (wall time); ``data`` is serialized with
sorted keys so it is byte-stable across runs and worker counts.

Exit codes: 0 agreement, 1 disagreement, 2 usage error, 3 resource cap.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time

from . import builders
from . import ground as gr
from .errors import (ClaimViolation, DomainError, ParseError, PreconditionError, ResourceError,
                     StructureError)
from .families import (DEFAULT_FACE_CAP, FamilySpec, face_masks, predicted_euler_sum,
                       predicted_spheres, signed_euler_sum)
from .graphio import parse_bipartite, parse_graph
from .graphs import gallai_edmonds
from .homology import chain_complex, homology_of
from .morse import FacePoset, MorseMatching, simplex_poset, verify
from .reproduce import CRITERIA, build_and_check, reproduce
from .triangles import count_trees_of_triangles, trees_of_triangles

FAMILIES = ("nm", "npm", "bnm", "fc", "nfc", "bfc", "nbfc")
PARAMS = {
    "nm": ("n", "k"),
    "npm": ("n",),
    "bnm": ("r", "s", "k"),
    "fc": ("n",),
    "nfc": ("n",),
    "bfc": ("q", "s"),
    "nbfc": ("q", "s"),
}
EXIT_OK, EXIT_DISAGREE, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _family_args(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--family", choices=FAMILIES, required=required)
    for name in ("n", "k", "r", "s", "q"):
        p.add_argument(f"--{name}", type=int)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--cap", type=_positive, default=DEFAULT_FACE_CAP, help="face cap")
    p.add_argument("--threads", type=_positive, default=1)
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.add_argument("--out", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="matchtopo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ge", help="Gallai-Edmonds partition of a graph file")
    p.add_argument("--input", help="graph file (default: stdin)")
    p.add_argument("--bipartite", action="store_true", help="input uses the 'r s' header")
    _common(p)

    for name, text in (("euler", "signed Euler sum vs closed form"),
                       ("predict", "predicted sphere dimension and count"),
                       ("homology", "reduced integer homology")):
        p = sub.add_parser(name, help=text)
        _family_args(p)
        _common(p)

    p = sub.add_parser("tot", help="trees of triangles")
    p.add_argument("action", choices=("count", "list"))
    p.add_argument("--vertices", type=_positive, required=True)
    _common(p)

    p = sub.add_parser("morse", help="build or verify a Morse matching")
    p.add_argument("action", choices=("build", "verify"))
    _family_args(p)
    p.add_argument("--input", help="matching JSON for 'verify'")
    p.add_argument("--emit", help="write the built matching as JSON")
    _common(p)

    p = sub.add_parser("reproduce", help="run the acceptance table")
    p.add_argument("--rows", help="comma-separated subset of rows (default: all)")
    _common(p)
    return parser


def spec_from_args(args) -> FamilySpec:
    names = PARAMS[args.family]
    missing = [f"--{x}" for x in names if getattr(args, x) is None]
    if missing:
        raise UsageError(f"family {args.family} needs {' '.join(missing)}")
    extra = [f"--{x}" for x in ("n", "k", "r", "s", "q") if x not in names and getattr(args, x) is not None]
    if extra:
        raise UsageError(f"family {args.family} does not take {' '.join(extra)}")
    return getattr(FamilySpec, args.family)(*(getattr(args, x) for x in names))


# ---------------------------------------------------------------------------
# commands: each returns (inputs, data, ok)


def cmd_ge(args):
    text = open(args.input).read() if args.input else sys.stdin.read()
    if args.bipartite:
        b = parse_bipartite(text)
        ge = gallai_edmonds(b.as_graph())

        def split(vs):
            vs = sorted(vs)
            return {"left": [v for v in vs if v <= b.r], "right": [v - b.r for v in vs if v > b.r]}

        data = {"nu": ge.nu, "D": split(ge.D), "A": split(ge.A), "C": split(ge.C),
                "components_of_D": [split(c) for c in sorted(ge.components_of_D, key=min)]}
        n = b.r + b.s
        inputs = {"r": b.r, "s": b.s, "edges": [list(e) for e in b.edge_list()]}
    else:
        g = parse_graph(text)
        ge = gallai_edmonds(g)
        data = {"nu": ge.nu, "D": sorted(ge.D), "A": sorted(ge.A), "C": sorted(ge.C),
                "components_of_D": [sorted(c) for c in sorted(ge.components_of_D, key=min)]}
        n = g.n
        inputs = {"n": g.n, "edges": [list(e) for e in g.edge_list()]}
    data["deficiency_formula_holds"] = 2 * ge.nu == n - ge.con + len(ge.A)
    return inputs, data, data["deficiency_formula_holds"]


def _prediction(spec):
    p = predicted_spheres(spec)
    return {"dimension": p.dimension, "count": p.count, "tag": p.tag}


def cmd_predict(args):
    spec = spec_from_args(args)
    return spec.params(), _prediction(spec), True


def cmd_euler(args):
    spec = spec_from_args(args)
    total = signed_euler_sum(spec, args.cap)
    pred = predicted_euler_sum(spec)
    data = {"family": spec.label, "sum": total, "predicted": pred, "agree": total == pred,
            "prediction": _prediction(spec)}
    return spec.params(), data, data["agree"]


def cmd_homology(args):
    spec = spec_from_args(args)
    cx = chain_complex(FacePoset.from_masks(spec.ground, face_masks(spec, args.cap), spec.is_quotient, spec.label))
    prof = homology_of(cx)
    pred = predicted_spheres(spec)
    expected = {pred.dimension: pred.count} if pred.count else {}
    agree = prof.torsion_free and prof.betti == expected
    data = {"family": spec.label, **prof.to_json(), "f_vector": {str(d): c for d, c in cx.f_vector().items()},
            "prediction": _prediction(spec), "agree": agree}
    return spec.params(), data, agree


def cmd_tot(args):
    m = args.vertices
    if m % 2 == 0:
        raise UsageError("trees of triangles need an odd vertex count")
    trees = list(trees_of_triangles(range(1, m + 1)))
    closed = count_trees_of_triangles(m)
    data = {"closed_form": closed, "enumerated": len(trees)}
    if args.action == "list":
        data["trees"] = [[list(e) for e in t.edge_list()] for t in trees]
    return {"vertices": m}, data, closed == len(trees)


def _builder_key(spec: FamilySpec):
    p = spec.params()
    kind = spec.kind.value
    if kind == "fc":
        return ("fc", p["n"])
    if kind == "bfc":
        return ("bfc", p["q"], p["s"])
    if kind == "nm":
        return ("nm", p["n"], p["k"])
    if kind == "npm":
        return ("nm", p["n"], p["n"] // 2)
    if kind == "bnm":
        return ("bnm", p["r"], p["s"], p["k"])
    raise UsageError(f"no Morse builder for {spec.label}; use the quotient family (fc or bfc)")


def cmd_morse(args):
    spec = spec_from_args(args)
    key = _builder_key(spec)
    if args.action == "build":
        res = build_and_check(key)
        m, rep, pred = res["matching"], res["report"], res["predicted"]
        if args.emit:
            with open(args.emit, "w") as fh:
                json.dump(m.to_json(), fh, sort_keys=True)
        expected = {pred.dimension: pred.count} if pred.count else {}
        agree = rep.valid and res["gamma_all_critical"] and res["census"] == expected
        data = {"family": spec.label, "pairs": len(m), **rep.summary(),
                "census_outside_collapsed": {str(d): c for d, c in sorted(res["census"].items())},
                "collapsed_faces": res["gamma_faces"], "prediction": _prediction(spec), "agree": agree}
        return spec.params(), data, agree
    if not args.input:
        raise UsageError("morse verify needs --input")
    with open(args.input) as fh:
        try:
            m = MorseMatching.from_json(json.load(fh))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad matching file: {exc}") from None
    if key[0] in ("fc", "bfc"):
        poset = simplex_poset(spec.ground)
    else:
        poset = FacePoset.from_masks(spec.ground, face_masks(spec, args.cap), label=spec.label)
    if m.ground != poset.ground:
        raise UsageError("matching ground set does not match the family")
    rep = verify(m, poset)
    return {**spec.params(), "input": args.input}, {"family": spec.label, **rep.summary()}, rep.valid


def cmd_reproduce(args):
    rows = None
    if args.rows:
        try:
            rows = sorted({int(x) for x in args.rows.split(",")})
        except ValueError:
            raise UsageError("--rows takes comma-separated integers") from None
        if not set(rows) <= set(CRITERIA):
            raise UsageError(f"rows must be among {sorted(CRITERIA)}")
    data = reproduce(rows, args.threads)
    return {"rows": rows or sorted(CRITERIA)}, data, data["all_pass"]


COMMANDS = {
    "ge": cmd_ge,
    "predict": cmd_predict,
    "euler": cmd_euler,
    "homology": cmd_homology,
    "tot": cmd_tot,
    "morse": cmd_morse,
    "reproduce": cmd_reproduce,
}


# ---------------------------------------------------------------------------
# output


def _flatten(obj, prefix=""):
    if isinstance(obj, dict):
        for k in sorted(obj):
            yield from _flatten(obj[k], f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and any(isinstance(x, (dict, list)) for x in obj):
        for i, x in enumerate(obj):
            yield from _flatten(x, f"{prefix}[{i}]")
    else:
        yield prefix, json.dumps(obj) if isinstance(obj, (list, bool)) or obj is None else obj


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    data = report.get("data", {})
    if report.get("command") == "reproduce" and "rows" in data:
        if fmt == "csv":
            buf = io.StringIO()
            w = csv.writer(buf, lineterminator="\n")
            w.writerow(["row", "criterion", "pass"])
            for r in data["rows"]:
                w.writerow([r["row"], r["criterion"], "pass" if r["pass"] else "FAIL"])
            return buf.getvalue()
        return "".join(f"row {r['row']}: {'PASS' if r['pass'] else 'FAIL'}  {r['criterion']}\n"
                       for r in data["rows"])
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "value"])
        for k, v in _flatten(report.get("data", report.get("error", {}))):
            w.writerow([k, v])
        return buf.getvalue()
    return "".join(f"{k}: {v}\n" for k, v in _flatten(report.get("data", report.get("error", {}))))


def _emit(report: dict, args) -> None:
    text = render(report, getattr(args, "format", "json"))
    out = getattr(args, "out", None)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    code = EXIT_OK
    try:
        inputs, data, ok = COMMANDS[args.command](args)
        report = {"command": args.command, "inputs": inputs, "data": data}
        code = EXIT_OK if ok else EXIT_DISAGREE
    except ResourceError as exc:
        report, code = _error(args, "resource", exc), EXIT_RESOURCE
    except (UsageError, DomainError, ParseError, StructureError, OSError) as exc:
        report, code = _error(args, "usage", exc), EXIT_USAGE
    except (ClaimViolation, PreconditionError) as exc:
        report, code = _error(args, "disagreement", exc), EXIT_DISAGREE
    report["meta"] = {"wall_time_s": round(time.perf_counter() - start, 3), "exit_code": code}
    _emit(report, args)
    return code


def _error(args, kind: str, exc: Exception) -> dict:
    return {"command": args.command, "error": {"kind": kind, "type": type(exc).__name__, "message": str(exc)}}


if __name__ == "__main__":
    sys.exit(main())
