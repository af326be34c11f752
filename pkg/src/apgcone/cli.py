"""File format, DOT emitter and command-line surface.

Input documents are JSON: ``{"name": ..., "points": [...], "fibers": {...}}``
with point records ``{"id", "parent", "proximate_to", "on_fiber",
"on_special_section"}``.  Unknown fields are errors so that fixtures double
as format tests.  Origin fiber flags are normalized on load.

Exit codes: 0 success, 1 validation or verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Mapping, Sequence

from .dual_cone import EnumerationCapError, GeneratorSet, generator_set
from .lattice import (
    DeltaLinear,
    anticanonical_product,
    self_intersection,
    strict_transform_classes,
)
from .multiplicities import germ_multiplicities
from .oracle import DimensionCapError, verify_dual_cone
from .proximity_graph import (
    ArrowedProximityGraph,
    GraphStructure,
    InvalidGraphError,
    PointNode,
    as_structure,
    derive_chains,
    make_graph,
    validate,
)
from .thresholds import PlacementCapError, Verdict, a_of_pg, compute_thresholds, report
from .valuation_invariants import maximal_contact_values, verify_sum_identity

__all__ = [
    "ApgSyntaxError",
    "parse_apg",
    "parse_apg_file",
    "serialize_apg",
    "emit_dot",
    "run",
    "main",
]

_POINT_FIELDS = ("id", "parent", "proximate_to", "on_fiber", "on_special_section")
_TOP_FIELDS = ("name", "points", "fibers")


class ApgSyntaxError(ValueError):
    """Malformed document: bad JSON (position-annotated) or a schema violation."""


def _expect(cond: bool, message: str) -> None:
    if not cond:
        raise ApgSyntaxError(message)


def parse_apg(text: str, *, name_out: list[str] | None = None) -> ArrowedProximityGraph:
    """Parse and validate a document, returning the normalized graph.

    Raises :class:`ApgSyntaxError` on malformed input and
    :class:`InvalidGraphError` (carrying the rule-coded report) when the graph
    fails validation.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ApgSyntaxError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None

    _expect(isinstance(doc, dict), "document root must be an object")
    for key in doc:
        _expect(key in _TOP_FIELDS, f"unknown field {key!r} at document root")
    for key in _TOP_FIELDS:
        _expect(key in doc, f"missing field {key!r} at document root")
    _expect(isinstance(doc["name"], str), "field 'name' must be a string")
    _expect(isinstance(doc["points"], list), "field 'points' must be a list")
    _expect(isinstance(doc["fibers"], dict), "field 'fibers' must be an object")

    points: list[PointNode] = []
    for i, rec in enumerate(doc["points"]):
        where = f"points[{i}]"
        _expect(isinstance(rec, dict), f"{where} must be an object")
        for key in rec:
            _expect(key in _POINT_FIELDS, f"unknown field {key!r} in {where}")
        _expect("id" in rec and isinstance(rec["id"], str), f"{where} needs a string 'id'")
        parent = rec.get("parent")
        _expect(parent is None or isinstance(parent, str), f"{where}: 'parent' must be a string or null")
        prox = rec.get("proximate_to", [])
        _expect(
            isinstance(prox, list) and all(isinstance(q, str) for q in prox),
            f"{where}: 'proximate_to' must be a list of point ids",
        )
        flags = {}
        for key in ("on_fiber", "on_special_section"):
            value = rec.get(key, False)
            _expect(isinstance(value, bool), f"{where}: {key!r} must be a boolean")
            flags[key] = value
        points.append(PointNode(id=rec["id"], parent=parent, proximate_to=tuple(prox), **flags))

    for key, value in doc["fibers"].items():
        _expect(isinstance(value, str), f"fibers[{key!r}] must be a string fiber id")

    graph = make_graph(points, doc["fibers"])
    rep = validate(graph)
    if not rep.ok:
        raise InvalidGraphError(rep)
    if name_out is not None:
        name_out.append(doc["name"])
    return graph


def parse_apg_file(path: str) -> tuple[str, ArrowedProximityGraph]:
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    names: list[str] = []
    graph = parse_apg(text, name_out=names)
    return names[0], graph


def serialize_apg(graph: ArrowedProximityGraph, name: str) -> str:
    """Canonical document text: schema field order, all fields explicit."""
    doc = {
        "name": name,
        "points": [
            {
                "id": p.id,
                "parent": p.parent,
                "proximate_to": list(p.proximate_to),
                "on_fiber": p.on_fiber,
                "on_special_section": p.on_special_section,
            }
            for p in graph.points
        ],
        "fibers": {
            p.id: graph.fiber_of_origin[p.id] for p in graph.points if p.parent is None
        },
    }
    return json.dumps(doc, indent=2) + "\n"


def emit_dot(graph: ArrowedProximityGraph | GraphStructure, name: str = "apg") -> str:
    """DOT rendering: solid parent edges, dashed non-deducible extra proximities.

    An extra proximity edge q -> p is suppressed when some deeper point r with
    r -> p lies infinitely near q, because q -> p then follows from r -> p.
    Fiber and section germs end in labeled terminal arrows at their last
    flagged points.
    """
    s = as_structure(graph)
    lines = [f'digraph "{name}" {{', "  node [shape=circle];"]
    for pid in s.point_ids:
        lines.append(f'  "{pid}";')
    for pid in s.point_ids:
        node = s.node[pid]
        if node.parent is not None:
            lines.append(f'  "{pid}" -> "{node.parent}";')
    for pid in s.point_ids:
        node = s.node[pid]
        for target in node.proximate_to:
            if target == node.parent:
                continue
            deducible = any(
                pid in s.prefix[r] and r != pid for r in s.prox_sources[target]
            )
            if not deducible:
                lines.append(f'  "{pid}" -> "{target}" [style=dashed];')

    def arrow(last: str, node_id: str, label: str) -> None:
        lines.append(f'  "{node_id}" [shape=none, label="{label}"];')
        lines.append(f'  "{last}" -> "{node_id}" [style=bold];')

    for origin in s.origins:
        members = [pid for pid in s.point_ids if s.origin_of[pid] == origin]
        fiber_chain = [pid for pid in members if s.node[pid].on_fiber]
        if fiber_chain:
            last = max(fiber_chain, key=lambda pid: s.level[pid])
            arrow(last, f"arrow_F_{origin}", f"F~({s.fiber_of(origin)})")
        section_chain = [pid for pid in members if s.node[pid].on_special_section]
        if section_chain:
            last = max(section_chain, key=lambda pid: s.level[pid])
            arrow(last, f"arrow_M0_{origin}", "M0~")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# report documents and rendering


def _dl_json(x: DeltaLinear) -> dict[str, int]:
    return {"const": x.const, "slope": x.slope}


def _class_json(s: GraphStructure, divisor) -> dict[str, Any]:
    c = divisor.c_map
    return {
        "f": divisor.a if not isinstance(divisor.a, DeltaLinear) else _dl_json(divisor.a),
        "m": divisor.b,
        "e": {pid: c[pid] for pid in s.point_ids if pid in c},
    }


def _generators_doc(name: str, s: GraphStructure, gens: GeneratorSet) -> dict[str, Any]:
    rows = []
    for entry in gens.entries:
        rows.append(
            {
                "labels": [l.display() for l in entry.labels],
                "class": _class_json(s, entry.divisor),
                "self_intersection": _dl_json(self_intersection(entry.divisor)),
                "anticanonical_product": _dl_json(anticanonical_product(entry.divisor)),
            }
        )
    return {"command": "generators", "input": name, "count": gens.count, "generators": rows}


def _thresholds_doc(name: str, t, paper_ceil: bool) -> dict[str, Any]:
    b_prime = t.b_prime_paper if paper_ceil else t.b_prime
    return {
        "command": "thresholds",
        "input": name,
        "rounding": "paper" if paper_ceil else "strict",
        "a": t.a,
        "b_prime": b_prime,
        "b_prime_strict": t.b_prime,
        "b_prime_paper": t.b_prime_paper,
        "b": max(t.a, b_prime),
        "witnesses": [
            {
                "labels": w.labels,
                "self_int_bound": w.self_int_bound,
                "positivity_bound": w.positivity_bound,
                "positivity_bound_paper": w.positivity_bound_paper,
            }
            for w in t.witnesses
        ],
    }


def _ray_names(s: GraphStructure, p2: bool) -> list[str]:
    if p2:
        names = [f"L~({fib})" for fib in s.fibers]
        names.append("E(base)")
    else:
        names = [f"F~({fib})" for fib in s.fibers]
        names.append("M0~")
    names.extend(f"E({pid})" for pid in s.point_ids)
    return names


def _report_doc(name: str, s: GraphStructure, verdict: Verdict, gens: GeneratorSet) -> dict[str, Any]:
    return {
        "command": "report",
        "input": name,
        "delta": verdict.delta,
        "p2_mode": verdict.p2_mode,
        "a": verdict.a,
        "b_prime": verdict.b_prime,
        "b": verdict.b,
        "ne_minimal": verdict.ne_minimal,
        "mori_dream": verdict.mori_dream,
        "extremal_rays": _ray_names(s, verdict.p2_mode) if verdict.ne_minimal == "yes" else [],
        "nef_generator_count": gens.count if verdict.ne_minimal == "yes" else None,
        "anticanonical_big": verdict.mori_dream == "yes",
    }


def _render_report(s: GraphStructure, verdict: Verdict, gens: GeneratorSet) -> list[str]:
    lines = [
        f"delta={verdict.delta}  thresholds: a={verdict.a} b'={verdict.b_prime} b={verdict.b}"
    ]
    surface = "blowup of the plane through its degree-one ruled model" if verdict.p2_mode else "blowup of the degree-delta ruled surface"
    lines.append(f"surface: {surface}")
    if verdict.ne_minimal == "yes":
        rays = _ray_names(s, verdict.p2_mode)
        lines.append(f"NE(X): finite polyhedral, minimally generated; extremal rays ({len(rays)}): " + ", ".join(rays))
        lines.append(f"Nef(X): generated by the {gens.count} dual-cone classes (see `generators`)")
    else:
        lines.append(f"NE(X): criterion silent (delta < a={verdict.a})")
    if verdict.mori_dream == "yes":
        lines.append("-K_X: big; Mori dream space: yes (big cone and semiample cone also determined)")
    else:
        lines.append(f"Mori dream space: criterion silent (delta < b={verdict.b})")
    return lines


def _invariants_doc(name: str, s: GraphStructure) -> dict[str, Any]:
    chains = []
    for chain in s.chains:
        inv = maximal_contact_values(s, chain)
        check = verify_sum_identity(s, chain)
        mult = germ_multiplicities(s, chain, len(chain.points))
        chains.append(
            {
                "index": chain.index,
                "points": list(chain.points),
                "multiplicities": [mult[pid] for pid in chain.points],
                "beta_bar": list(inv.beta_bar),
                "e": list(inv.e),
                "N": list(inv.N),
                "g": inv.g,
                "free_tail": inv.free_tail,
                "sum_identity": {"lhs": check.lhs, "rhs": check.rhs, "holds": check.holds},
            }
        )
    return {"command": "invariants", "input": name, "chains": chains}


def _print_json(doc: Mapping[str, Any]) -> None:
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")


# ---------------------------------------------------------------------------
# command implementations


def _cmd_validate(name: str, graph: ArrowedProximityGraph, args) -> int:
    s = derive_chains(graph)
    if args.json:
        _print_json(
            {
                "command": "validate",
                "input": name,
                "ok": True,
                "points": len(graph.points),
                "constellations": len(s.origins),
                "chains": len(s.chains),
            }
        )
    else:
        print(
            f"valid: {len(graph.points)} points, {len(s.origins)} constellations, "
            f"{len(s.chains)} chains, {len(s.fibers)} fibers"
        )
    return 0


def _cmd_generators(name: str, graph: ArrowedProximityGraph, args) -> int:
    s = as_structure(graph)
    gens = generator_set(s, max_fibers=args.max_fibers, max_candidates=args.max_w)
    if args.json:
        _print_json(_generators_doc(name, s, gens))
        return 0
    for entry in gens.entries:
        d = entry.divisor
        print(
            f"{entry.display_labels()}: {d}   D²={self_intersection(d)}   D·(-K)={anticanonical_product(d)}"
        )
    print(f"{gens.count} generators")
    return 0


def _cmd_thresholds(name: str, graph: ArrowedProximityGraph, args) -> int:
    s = as_structure(graph)
    gens = generator_set(s, max_fibers=args.max_fibers, max_candidates=args.max_w)
    t = compute_thresholds(s, gens)
    b_prime = t.b_prime_paper if args.paper_ceil else t.b_prime
    if args.json:
        _print_json(_thresholds_doc(name, t, args.paper_ceil))
        return 0
    print(f"a={t.a} b'={b_prime} b={max(t.a, b_prime)}")
    print(f"(strict positivity b'={t.b_prime}; plus-ceiling variant b'={t.b_prime_paper})")
    binding_a = max(t.witnesses, key=lambda w: w.self_int_bound)
    binding_b = max(t.witnesses, key=lambda w: w.positivity_bound)
    print(f"binding self-intersection: {binding_a.labels} (needs delta >= {binding_a.self_int_bound})")
    print(f"binding positivity: {binding_b.labels} (needs delta >= {binding_b.positivity_bound})")
    return 0


def _cmd_report(name: str, graph: ArrowedProximityGraph, args) -> int:
    s = as_structure(graph)
    gens = generator_set(s, max_fibers=args.max_fibers, max_candidates=args.max_w)
    t = compute_thresholds(s, gens)
    verdict = report(
        s, args.delta, p2_mode=args.p2, paper_rounding=args.paper_ceil, thresholds=t
    )
    if args.json:
        _print_json(_report_doc(name, s, verdict, gens))
        return 0
    for line in _render_report(s, verdict, gens):
        print(line)
    return 0


def _cmd_verify(name: str, graph: ArrowedProximityGraph, args) -> int:
    s = as_structure(graph)
    gens = generator_set(s, max_fibers=args.max_fibers, max_candidates=args.max_w)
    check = verify_dual_cone(s, gens)
    if args.json:
        _print_json(
            {
                "command": "verify",
                "input": name,
                "ok": check.ok,
                "generator_count": check.generator_count,
                "ray_count": check.ray_count,
                "failures": list(check.failures),
            }
        )
        return 0 if check.ok else 1
    if check.ok:
        print(
            f"dual cone certified ({check.generator_count} generators, all "
            f"{check.ray_count} extreme rays matched)"
        )
        return 0
    print("dual cone verification FAILED:", file=sys.stderr)
    for failure in check.failures:
        print(f"  {failure}", file=sys.stderr)
    return 1


def _cmd_invariants(name: str, graph: ArrowedProximityGraph, args) -> int:
    s = as_structure(graph)
    doc = _invariants_doc(name, s)
    if args.json:
        _print_json(doc)
        return 0
    for row in doc["chains"]:
        print(f"chain {row['index']}: " + " > ".join(row["points"]))
        print(f"  multiplicities: {tuple(row['multiplicities'])}")
        print(
            f"  beta_bar={tuple(row['beta_bar'])} e={tuple(row['e'])} "
            f"N={tuple(row['N'])} g={row['g']} free_tail={row['free_tail']}"
        )
        si = row["sum_identity"]
        print(f"  sum identity: {si['lhs']} = {si['rhs']} ({'ok' if si['holds'] else 'FAIL'})")
    return 0


def _cmd_pg_bound(name: str, graph: ArrowedProximityGraph, args) -> int:
    value = a_of_pg(graph)
    if args.json:
        _print_json({"command": "pg-bound", "input": name, "a_pg": value})
    else:
        print(f"a(PG)={value}")
    return 0


def _cmd_dot(name: str, graph: ArrowedProximityGraph, args) -> int:
    text = emit_dot(graph, name)
    if args.json:
        _print_json({"command": "dot", "input": name, "dot": text})
    else:
        sys.stdout.write(text)
    return 0


_COMMANDS = {
    "validate": _cmd_validate,
    "generators": _cmd_generators,
    "thresholds": _cmd_thresholds,
    "report": _cmd_report,
    "verify": _cmd_verify,
    "invariants": _cmd_invariants,
    "pg-bound": _cmd_pg_bound,
    "dot": _cmd_dot,
}


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="arrowed proximity graph document (JSON)")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument(
        "--paper-ceil",
        action="store_true",
        help="use the plus-ceiling positivity rounding (understates by one at integer ratios)",
    )
    common.add_argument("--max-w", type=int, default=5_000_000, metavar="N", help="cap on join-divisor candidates")
    common.add_argument("--max-fibers", type=int, default=12, metavar="N", help="cap on the number of fibers")

    parser = argparse.ArgumentParser(
        prog="apgcone",
        description="Dual-cone generators, thresholds and certified verdicts for "
        "blowups of Hirzebruch surfaces given by arrowed proximity graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check every structural invariant")
    sub.add_parser("generators", parents=[common], help="enumerate the dual-cone generator classes")
    sub.add_parser("thresholds", parents=[common], help="compute a, b' and b")
    rep = sub.add_parser("report", parents=[common], help="verdict at a given delta")
    rep.add_argument("--delta", type=int, default=None, help="surface parameter (required unless --p2)")
    rep.add_argument("--p2", action="store_true", help="read the graph over the plane (forces delta=1)")
    sub.add_parser("verify", parents=[common], help="certify the generators against the double-description oracle")
    sub.add_parser("invariants", parents=[common], help="per-chain contact values and identities")
    sub.add_parser("pg-bound", parents=[common], help="largest threshold over all arrow placements")
    sub.add_parser("dot", parents=[common], help="DOT rendering of the graph")
    return parser


def run(argv: Sequence[str]) -> int:
    """Parse arguments and dispatch; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return int(exc.code or 0)

    if args.command == "report":
        if args.p2:
            if args.delta is None:
                args.delta = 1
            elif args.delta != 1:
                print("error: --p2 fixes delta=1", file=sys.stderr)
                return 2
        elif args.delta is None:
            print("error: report needs --delta (or --p2)", file=sys.stderr)
            return 2
        if args.delta < 0:
            print("error: delta must be a nonnegative integer", file=sys.stderr)
            return 2

    try:
        name, graph = parse_apg_file(args.file)
    except FileNotFoundError:
        print(f"error: no such file: {args.file}", file=sys.stderr)
        return 2
    except ApgSyntaxError as exc:
        print(f"error: {args.file}: {exc}", file=sys.stderr)
        return 1
    except InvalidGraphError as exc:
        if args.json:
            _print_json(
                {
                    "command": args.command,
                    "input": args.file,
                    "ok": False,
                    "violations": [
                        {"code": v.code, "points": list(v.points), "message": v.message}
                        for v in exc.report.violations
                    ],
                }
            )
            return 1
        print(f"error: {args.file}: invalid graph", file=sys.stderr)
        for violation in exc.report.violations:
            print(f"  [{violation.code}] {violation.message}", file=sys.stderr)
        return 1

    try:
        return _COMMANDS[args.command](name, graph, args)
    except (EnumerationCapError, DimensionCapError, PlacementCapError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main(argv: Sequence[str] | None = None) -> int:
    return run(sys.argv[1:] if argv is None else list(argv))


if __name__ == "__main__":
    sys.exit(main())
