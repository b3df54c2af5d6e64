"""Command-line front end.

Every subcommand reads graph files in the JSON format of ``graph_model`` and
prints plain text, or JSON with ``--machine``.  Exit codes: 0 success, 1 a
negative verdict or a domain error, 2 a usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import cohomology, finiteness, localization, morphisms, reconstruct, surgery
from .classes import format_class, parse_class
from .graph_model import (
    GraphError,
    betti_numbers,
    build_extended,
    canonicalize,
    decorated_from_obj,
    dull,
    enumerate_graphs,
    extremal_self_intersections,
    fmt_rational,
    format_graph,
    graph_to_obj,
    isotropy_weights,
    parse_graph,
    parse_rational,
    poincare_rank,
    validate,
)


class UsageError(Exception):
    pass


class DomainError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ------------------------------------------------------------------ input


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _graph(path: str, check: bool = True):
    g = parse_graph(_read(path))
    if check:
        bad = validate(g)
        if bad:
            raise DomainError(bad[0].code, f"{path}: {bad[0].message}")
    return g


def _class(text: str) -> dict:
    try:
        return parse_class(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _ordered_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


class Out:
    """Collects text lines and a machine object; prints one of them."""

    def __init__(self, machine: bool, quiet: bool):
        self.machine = machine
        self.quiet = quiet
        self.lines = []
        self.obj = {}

    def text(self, *lines):
        self.lines.extend(lines)

    def flush(self):
        if self.quiet:
            return
        if self.machine:
            print(_ordered_json(self.obj))
        elif self.lines:
            print("\n".join(self.lines))


def _emit_graph(out: Out, args, g, key="graph"):
    out.obj[key] = graph_to_obj(g)
    out.text(format_graph(g))
    if getattr(args, "output", None):
        Path(args.output).write_text(json.dumps(graph_to_obj(g), indent=2) + "\n")


# -------------------------------------------------------------- commands


def cmd_validate(args, out):
    g = _graph(args.graph, check=False)
    bad = validate(g)
    out.obj["valid"] = not bad
    out.obj["violations"] = [{"code": v.code, "message": v.message} for v in bad]
    if bad:
        out.text("invalid", *(f"  {v}" for v in bad))
        return 1
    e_min, e_max = extremal_self_intersections(g)
    out.obj.update(e_min=fmt_rational(e_min), e_max=fmt_rational(e_max))
    out.text("valid", f"e_min={fmt_rational(e_min)}", f"e_max={fmt_rational(e_max)}")
    return 0


def cmd_extend(args, out):
    obj = json.loads(_read(args.graph))
    g = build_extended(decorated_from_obj(obj))
    bad = validate(g)
    if bad:
        raise DomainError(bad[0].code, bad[0].message)
    _emit_graph(out, args, g)
    return 0


def cmd_dull(args, out):
    d = dull(_graph(args.graph))
    out.obj["dull"] = str(d)
    out.text(str(d))
    return 0


def cmd_weights(args, out):
    w = isotropy_weights(_graph(args.graph))
    out.obj["weights"] = [list(p) for p in w]
    out.text(" ".join(f"{{{a},{b}}}" for a, b in w) if w else "no isolated fixed points")
    return 0


def cmd_ranks(args, out):
    g = _graph(args.graph)
    b = betti_numbers(g)
    eq = [poincare_rank(g, q) for q in range(args.degrees + 1)]
    out.obj.update(betti=list(b), equivariant=eq)
    out.text("betti: " + " ".join(map(str, b)),
             "equivariant ranks: " + " ".join(map(str, eq)))
    return 0


def cmd_blowup(args, out):
    g = _graph(args.graph)
    new, rec = surgery.blowup(g, surgery.parse_site(args.site), parse_rational(args.lam, "--lambda"))
    out.obj["record"] = rec.to_obj()
    out.text(str(rec))
    _emit_graph(out, args, new)
    return 0


def cmd_blowdown(args, out):
    g = _graph(args.graph)
    if args.target is None:
        targets = surgery.blowdown_targets(g)
        out.obj["targets"] = [str(t) for t in targets]
        out.text(*(str(t) for t in targets)) if targets else out.text("no blowdown targets")
        return 0
    new, rec = surgery.blowdown(g, surgery.parse_target(args.target))
    out.obj["record"] = rec.to_obj()
    out.text(f"inverse of {rec}")
    _emit_graph(out, args, new)
    return 0


def cmd_reduce(args, out):
    model, history = surgery.reduce_to_minimal(_graph(args.graph))
    out.obj.update(model=model.to_obj(), history=[r.to_obj() for r in history])
    out.text(f"model: {model}", f"blowdowns: {len(history)}")
    out.text(*(f"  {n}. {r}" for n, r in enumerate(history, 1)))
    return 0


def cmd_presentation(args, out):
    p = cohomology.presentation(_graph(args.graph))
    out.obj.update(p.to_obj())
    out.text(p.format())
    return 0


def cmd_pit(args, out):
    g = _graph(args.graph)
    c = cohomology.pi_star_t(g)
    nf = cohomology.normal_form(g, c)
    out.obj.update(pi_star_t=format_class(c), normal_form=[str(x) for x in nf],
                   basis=cohomology.basis_names(g))
    out.text(f"pi*(t) = {format_class(c)}",
             "normal form: " + cohomology.format_coordinates(g, nf))
    return 0


def cmd_intersect(args, out):
    v = localization.intersect(_graph(args.graph), _class(args.a), _class(args.b))
    out.obj["value"] = int(v)
    out.text(str(v))
    return 0


def cmd_restrict(args, out):
    r = localization.restrict(_graph(args.graph), [_class(c) for c in args.cls])
    out.obj["restriction"] = {localization.comp_name(c): localization.format_value(v, r.degree)
                              for c, v in r.values}
    out.text(r.format())
    return 0


def cmd_integrate(args, out):
    g = _graph(args.graph)
    val = localization.integrate(g, localization.restrict(g, [_class(c) for c in args.cls]))
    (power, coef), = val.items() if val else ((0, 0),)
    text = localization.format_value(coef, power) if coef else "0"
    out.obj["integral"] = text
    out.text(text)
    return 0


def cmd_zerolength(args, out):
    n = localization.zero_length(_graph(args.graph), _class(args.cls))
    out.obj["zero_length"] = n
    out.text(str(n))
    return 0


def cmd_label(args, out):
    v = localization.class_label(_graph(args.graph), _class(args.cls))
    out.obj["label"] = fmt_rational(v)
    out.text(fmt_rational(v))
    return 0


def cmd_flip(args, out):
    g = _graph(args.graph)
    if args.kind == "full":
        new, m = morphisms.full_flip(g)
    elif args.kind == "symplectic":
        new, m = morphisms.symplectic_flip(g)
    else:
        if args.chain is None:
            raise UsageError("--chain is required for a partial flip")
        new, m = morphisms.partial_flip(g, args.chain)
    out.obj["map"] = m.to_obj()
    out.text(m.format())
    _emit_graph(out, args, new)
    return 0


def cmd_dull_iso(args, out):
    d1, d2 = dull(_graph(args.first)), dull(_graph(args.second))
    match = morphisms.dull_isomorphic(d1, d2)
    out.obj["isomorphic"] = match is not None
    if match is None:
        w = morphisms.dull_witness(d1, d2)
        out.obj["witness"] = w
        out.text(f"not isomorphic: {w}")
        return 1
    out.obj["swapped"] = match.swapped
    out.text("isomorphic" + (" after swapping min and max" if match.swapped else ""))
    return 0


def cmd_weak_iso(args, out):
    v = morphisms.weak_isomorphisms(_graph(args.first), _graph(args.second))
    out.obj.update(v.to_obj())
    out.text(v.format())
    if v.isomorphic and args.show_map:
        out.text(v.composite.format())
    return 0 if v.isomorphic else 1


def cmd_obstruct(args, out):
    g1, g2 = _graph(args.first), _graph(args.second)
    ob = morphisms.diffeo_obstruction(g1, g2)
    out.obj.update(obstructed=ob.obstructed, reason=ob.reason,
                   weights=[[list(p) for p in isotropy_weights(g)] for g in (g1, g2)])
    out.text(ob.format())
    return 0


def cmd_xi(args, out):
    inp = reconstruct.algebraic_input(_graph(args.graph), seed=args.seed, with_omega=not args.no_omega)
    obj = inp.to_obj()
    out.obj.update(obj)
    if args.output:
        Path(args.output).write_text(reconstruct.dump_input(inp) + "\n")
        out.text(f"{len(inp.generators)} generators, xi hash {reconstruct.xi_hash(inp)}")
    else:
        out.text(reconstruct.dump_input(inp))
    return 0


def cmd_recover_dull(args, out):
    d = reconstruct.recover_dull(reconstruct.parse_input(_read(args.input)))
    out.obj["dull"] = str(d)
    out.text(str(d))
    return 0


def cmd_recover(args, out):
    g = reconstruct.recover_decorated(reconstruct.parse_input(_read(args.input)))
    _emit_graph(out, args, g)
    return 0


def cmd_bounds(args, out):
    g = _graph(args.graph)
    rep = finiteness.bound_constants(g)
    out.obj["bounds"] = rep.to_obj()
    out.text(rep.format())
    if not args.box:
        return 0
    box = finiteness.box_check(g)
    checks = {
        "squares_match": box.squares_match,
        "areas_in_box": box.areas_in_box,
        "hodge": box.hodge_ok,
        "y_in_box": box.y_in_box,
        "xh": box.xh_ok,
    }
    out.obj["box"] = {
        "square_sum": box.square_sum,
        "xh_term": fmt_rational(box.xh_term),
        "checks": checks,
        "entries": [{"class": format_class({e.sym: 1}), "square": e.square,
                     "area": fmt_rational(e.area), "y_square": fmt_rational(e.y_square)}
                    for e in box.entries],
    }
    out.text(f"sum <x,x> = {box.square_sum} (A = {rep.A})",
             f"xh term = {fmt_rational(box.xh_term)} (C_h = {fmt_rational(rep.C_h)})")
    for e in box.entries:
        out.text(f"  {format_class({e.sym: 1})}: <x,x>={e.square} <x,w>={fmt_rational(e.area)} "
                 f"<y,y>={fmt_rational(e.y_square)}")
    out.text(*(f"{k}: {'ok' if v else 'FAILED'}" for k, v in checks.items()))
    return 0 if all(checks.values()) else 1


def cmd_fiber(args, out):
    trivial = args.parity in ("even", "trivial")
    v = finiteness.recognize_fiber_class(args.p, args.q, args.genus, trivial)
    out.obj.update(kind=v.kind, violated=v.violated)
    out.text(v.format())
    return 0


def cmd_enumerate(args, out):
    graphs = list(enumerate_graphs(args.max_edges, args.max_label, args.max_den))
    out.obj.update(count=len(graphs), graphs=[graph_to_obj(g) for g in graphs])
    out.text(*(format_graph(g) for g in graphs), f"{len(graphs)} graphs")
    return 0


def _sweep_one(path: str) -> dict:
    try:
        g = parse_graph(_read(path))
    except (GraphError, UsageError) as exc:
        return {"path": path, "ok": False, "error": str(exc)}
    bad = validate(g)
    if bad:
        return {"path": path, "ok": False, "error": str(bad[0])}
    g = canonicalize(g)
    try:
        model, history = surgery.reduce_to_minimal(g)
        ch = cohomology.chern_classes(g)
    except ValueError as exc:
        return {"path": path, "ok": False, "error": f"{getattr(exc, 'code', 'error')}: {exc}"}
    return {"path": path, "ok": True, "model": str(model), "blowdowns": len(history),
            "b2": betti_numbers(g)[2], "c1sq_minus_2c2": ch.c1sq_minus_2c2, "euler": ch.euler}


def cmd_sweep(args, out):
    paths = []
    for p in args.paths:
        q = Path(p)
        paths += sorted(str(x) for x in q.rglob("*.json")) if q.is_dir() else [p]
    rows = [_sweep_one(p) for p in paths]
    out.obj["results"] = rows
    for r in rows:
        if r["ok"]:
            out.text(f"{r['path']}: ok model={r['model']} blowdowns={r['blowdowns']} "
                     f"b2={r['b2']} euler={r['euler']}")
        else:
            out.text(f"{r['path']}: FAILED {r['error']}")
    return 0 if all(r["ok"] for r in rows) else 1


def cmd_report(args, out):
    g = _graph(args.graph, check=False)
    bad = validate(g)
    out.obj["valid"] = not bad
    if bad:
        out.obj["violations"] = [{"code": v.code, "message": v.message} for v in bad]
        out.text("invalid", *(f"  {v}" for v in bad))
        return 1
    e_min, e_max = extremal_self_intersections(g)
    p = cohomology.presentation(g)
    ch = cohomology.chern_classes(g)
    model, history = surgery.reduce_to_minimal(g)
    w = isotropy_weights(g)
    out.obj.update(
        e_min=fmt_rational(e_min), e_max=fmt_rational(e_max), presentation=p.to_obj(),
        betti=list(betti_numbers(g)), weights=[list(x) for x in w], dull=str(dull(g)),
        c1=format_class(ch.c1), c1sq_minus_2c2=ch.c1sq_minus_2c2, euler=ch.euler,
        eqc3_residual=ch.eqc3_residual, model=model.to_obj(), blowdowns=len(history),
    )
    out.text(
        format_graph(g),
        f"valid, e_min={fmt_rational(e_min)}, e_max={fmt_rational(e_max)}",
        p.format(),
        "betti: " + " ".join(map(str, betti_numbers(g))),
        "weights: " + (" ".join(f"{{{a},{b}}}" for a, b in w) or "none"),
        f"dull: {dull(g)}",
        f"c1 = {format_class(ch.c1)}",
        f"c1^2 - 2c2 = {ch.c1sq_minus_2c2}, euler = {ch.euler}, eqc3 residual = {ch.eqc3_residual}",
        f"model: {model} after {len(history)} blowdowns",
    )
    return 0


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    # global flags are accepted before or after the subcommand
    common = _Parser(add_help=False)
    common.add_argument("--machine", action="store_true", default=argparse.SUPPRESS, help="print JSON")
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS,
                        help="print nothing; exit code only")
    p = _Parser(prog="hamgraph", parents=[common],
                description="Extended graphs of Hamiltonian circle actions on 4-manifolds.")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)

    def add(name, func, help, *pos, output=False):
        sp = sub.add_parser(name, help=help, parents=[common])
        for a in pos:
            sp.add_argument(a)
        if output:
            sp.add_argument("-o", "--output", help="write the resulting JSON here")
        sp.set_defaults(func=func)
        return sp

    add("validate", cmd_validate, "check invariants; print e_min and e_max", "graph")
    add("extend", cmd_extend, "complete a decorated graph with label-1 edges", "graph", output=True)
    add("dull", cmd_dull, "forget heights and areas", "graph")
    add("weights", cmd_weights, "isotropy weights at isolated fixed points", "graph")
    sp = add("ranks", cmd_ranks, "Betti numbers and equivariant Poincare ranks", "graph")
    sp.add_argument("--degrees", type=int, default=8)
    sp = add("blowup", cmd_blowup, "equivariant blowup", "graph", output=True)
    sp.add_argument("--site", required=True, help="e.g. interior(1,1), isolated_extreme(min)")
    sp.add_argument("--lambda", dest="lam", required=True, help="size, a rational")
    sp = add("blowdown", cmd_blowdown, "equivariant blowdown (lists targets without --target)",
             "graph", output=True)
    sp.add_argument("--target", help="e.g. edge(1,2), fat_extreme(max)")
    add("reduce", cmd_reduce, "blow down to a minimal model", "graph")
    add("presentation", cmd_presentation, "generators and relations", "graph")
    add("pit", cmd_pit, "pi*(t) and its normal form", "graph")
    sp = add("intersect", cmd_intersect, "intersection pairing of two classes", "graph")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp = add("restrict", cmd_restrict, "restriction to the fixed components", "graph")
    sp.add_argument("--class", dest="cls", action="append", required=True,
                    help="repeat to restrict a product")
    sp = add("integrate", cmd_integrate, "ABBV integral of a product of classes", "graph")
    sp.add_argument("--class", dest="cls", action="append", required=True)
    sp = add("zerolength", cmd_zerolength, "number of components where a class vanishes", "graph")
    sp.add_argument("--class", dest="cls", required=True)
    sp = add("label", cmd_label, "label of a class supported on two components", "graph")
    sp.add_argument("--class", dest="cls", required=True)
    sp = add("flip", cmd_flip, "full, symplectic or partial flip", "graph", output=True)
    sp.add_argument("--kind", choices=["full", "symplectic", "partial"], required=True)
    sp.add_argument("--chain", type=int)
    add("dull-iso", cmd_dull_iso, "isomorphism of dull graphs", "first", "second")
    sp = add("weak-iso", cmd_weak_iso, "weak isomorphism of equivariant cohomology", "first", "second")
    sp.add_argument("--show-map", action="store_true")
    add("obstruct", cmd_obstruct, "obstruction to an equivariant diffeomorphism", "first", "second")
    sp = add("xi", cmd_xi, "algebraic input (pairings, formal products, areas) of a graph",
             "graph", output=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--no-omega", action="store_true")
    add("recover-dull", cmd_recover_dull, "dull graph from algebraic input", "input")
    add("recover", cmd_recover, "extended graph from algebraic input", "input", output=True)
    sp = add("bounds", cmd_bounds, "finiteness constants", "graph")
    sp.add_argument("--box", action="store_true", help="also check every generator against the box")
    sp = add("fiber", cmd_fiber, "classify pB + qF in a ruled surface")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--genus", type=int, default=0)
    sp.add_argument("--parity", choices=["even", "odd", "trivial", "nontrivial"], default="even")
    sp = add("enumerate", cmd_enumerate, "enumerate graphs on a small grid")
    sp.add_argument("--max-edges", type=int, default=4)
    sp.add_argument("--max-label", type=int, default=3)
    sp.add_argument("--max-den", type=int, default=1)
    sp = add("sweep", cmd_sweep, "validate and reduce every graph file under the paths")
    sp.add_argument("paths", nargs="+")
    add("report", cmd_report, "validation, presentation and invariant digest", "graph")
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        out = Out(getattr(args, "machine", False), getattr(args, "quiet", False))
        try:
            code = args.func(args, out)
        except UsageError:
            raise
        except DomainError as exc:
            print(f"error: {exc.code}: {exc}", file=sys.stderr)
            return 1
        except json.JSONDecodeError as exc:
            print(f"error: syntax: {exc}", file=sys.stderr)
            return 1
        except ValueError as exc:
            code_ = getattr(exc, "code", None)
            if code_ is None:
                raise UsageError(str(exc)) from None
            print(f"error: {code_}: {exc}", file=sys.stderr)
            return 1
        out.flush()
        return code
    except UsageError as exc:
        print(parser.format_help(), file=sys.stderr)
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
