"""Command line interface.

    ringedcore validate FILE
    ringedcore core FILE [--dot PATH]
    ringedcore heq FILE_A FILE_B
    ringedcore qc FILE SHEAF
    ringedcore quotient FILE [--cover NAME] [--dot PATH]
    ringedcore transport FILE MORPHISM SHEAF --direction {push,pull}
                         [--check-adjunction]

Common flags: --json (machine output), --cap N (search/enumeration cap,
also via RINGEDCORE_CAP; flag wins).  Exit codes: 0 success or true
verdict, 1 false verdict, 2 input error, 3 cap exceeded.
"""

import argparse
import json
import os
import sys

from .cover import cover_quotient, pi_preimage_has_min
from .errors import ParseError, RingedCoreError, SearchCapExceeded
from .finalg import DEFAULT_TUPLE_CAP
from .finposet import generating_edges, is_t0
from .homotopy import core, find_beat_points, homotopy_equivalent, is_minimal
from .rspace import (check_morphism, is_quasi_coherent, pullback, pushforward,
                     unit_counit, validate_sheaf, validate_space)
from .spacefile import (morphism_to_json, parse_file, sheaf_to_json,
                        space_to_json)


def _resolve_cap(args):
    if args.cap is not None:
        return args.cap
    env = os.environ.get("RINGEDCORE_CAP")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ParseError(f"RINGEDCORE_CAP={env!r} is not an integer")
    return DEFAULT_TUPLE_CAP


def space_dot(X, name="space", highlights=None):
    """Graphviz text for the Hasse diagram, beat points highlighted."""
    highlights = highlights or {}
    lines = [f"digraph {name} {{", "  rankdir=BT;", "  node [shape=box];"]
    for p in X.poset.points:
        ring = X.ring_at(p)
        label = f"{p} : {ring.name or f'ring{len(ring)}'}"
        extra = ""
        if p in highlights:
            kind = highlights[p]
            color = "lightblue" if kind == "down" else "lightsalmon"
            label += f" ({kind} beat)"
            extra = f", style=filled, fillcolor={color}"
        lines.append(f'  "{p}" [label="{label}"{extra}];')
    for p, q in generating_edges(X.poset):
        lines.append(f'  "{p}" -> "{q}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _beat_highlights(X):
    if not is_t0(X.poset):
        return {}
    out = {}
    for p, kind, _ in find_beat_points(X):
        out.setdefault(p, kind)
    return out


def _require_valid_space(parsed):
    violations = validate_space(parsed.main)
    if violations:
        raise ParseError("space is not valid: " + "; ".join(violations))


class Report:
    def __init__(self, data, text, exit_code):
        self.data = data
        self.text = text
        self.exit_code = exit_code

    def emit(self, as_json):
        if as_json:
            print(json.dumps(self.data, sort_keys=True, indent=2))
        else:
            print(self.text)
        return self.exit_code


def _cmd_validate(args):
    parsed = parse_file(args.file)
    violations = list(validate_space(parsed.main))
    for name, space in sorted(parsed.spaces.items()):
        if name != "main":
            violations += [f"space {name}: {v}" for v in validate_space(space)]
    for sp_name, table in sorted(parsed.sheaves.items()):
        for name, sheaf in sorted(table.items()):
            violations += [f"sheaf {name}: {v}" for v in validate_sheaf(sheaf)]
    for name, phi in sorted(parsed.morphisms.items()):
        violations += [f"morphism {name}: {v}" for v in check_morphism(phi)]
    data = {"command": "validate", "file": args.file,
            "violations": violations, "ok": not violations}
    text = "OK" if not violations else "\n".join(violations)
    return Report(data, text, 0 if not violations else 1)


def _cmd_core(args):
    cap = _resolve_cap(args)
    parsed = parse_file(args.file)
    _require_valid_space(parsed)
    rep = core(parsed.main, cap)
    t0_map = rep.t0_trace.point_map.as_dict()
    data = {
        "command": "core", "file": args.file,
        "core": space_to_json(rep.core),
        "removal_trace": [{"point": p, "kind": k, "witness": w}
                          for p, k, w in rep.removal_trace],
        "t0_classes": t0_map,
        "minimal": is_minimal(rep.core),
    }
    lines = [f"core has {len(rep.core.poset.points)} points: "
             f"{', '.join(rep.core.poset.points)}"]
    if any(p != q for p, q in t0_map.items()):
        merged = sorted(f"{p}->{q}" for p, q in t0_map.items() if p != q)
        lines.append("t0 identifications: " + ", ".join(merged))
    for p, k, w in rep.removal_trace:
        lines.append(f"removed {p} ({k} beat, witness {w})")
    if not rep.removal_trace:
        lines.append("no beat points removed")
    if args.dot:
        text = space_dot(parsed.main, "before", _beat_highlights(parsed.main))
        text += space_dot(rep.core, "after")
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(text)
        lines.append(f"dot written to {args.dot}")
    return Report(data, "\n".join(lines), 0)


def _cmd_heq(args):
    cap = _resolve_cap(args)
    pa, pb = parse_file(args.file_a), parse_file(args.file_b)
    for parsed in (pa, pb):
        _require_valid_space(parsed)
    result = homotopy_equivalent(pa.main, pb.main, cap)
    witness = None
    if result.iso is not None:
        h, psis = result.iso
        witness = {"point_map": h.as_dict(),
                   "ring_isos": {p: iso.as_dict() for p, iso in psis.items()}}
    data = {
        "command": "heq", "file_a": args.file_a, "file_b": args.file_b,
        "equivalent": result.equivalent,
        "core_a": space_to_json(result.core_x.core),
        "core_b": space_to_json(result.core_y.core),
        "witness": witness,
    }
    text = ("homotopy equivalent" if result.equivalent
            else "not homotopy equivalent")
    text += (f"\ncore A: {', '.join(result.core_x.core.poset.points)}"
             f"\ncore B: {', '.join(result.core_y.core.poset.points)}")
    return Report(data, text, 0 if result.equivalent else 1)


def _cmd_qc(args):
    cap = _resolve_cap(args)
    parsed = parse_file(args.file)
    _require_valid_space(parsed)
    sheaf = parsed.sheaf_on("main", args.sheaf)
    bad = validate_sheaf(sheaf)
    if bad:
        raise ParseError("sheaf is not valid: " + "; ".join(bad))
    ok, edge = is_quasi_coherent(sheaf, cap)
    data = {"command": "qc", "file": args.file, "sheaf": args.sheaf,
            "quasi_coherent": ok,
            "witness_edge": list(edge) if edge else None}
    text = "quasi-coherent" if ok else \
        f"not quasi-coherent: base change fails along {edge[0]}<={edge[1]}"
    return Report(data, text, 0 if ok else 1)


def _cmd_quotient(args):
    cap = _resolve_cap(args)
    parsed = parse_file(args.file)
    _require_valid_space(parsed)
    if not parsed.covers:
        raise ParseError("file declares no covers")
    if args.cover:
        if args.cover not in parsed.covers:
            raise ParseError(f"no cover named {args.cover!r}")
        cover_name = args.cover
    elif len(parsed.covers) == 1:
        cover_name = next(iter(parsed.covers))
    else:
        raise ParseError("several covers declared; pick one with --cover")
    X, pi = cover_quotient(parsed.covers[cover_name], cap)
    minima = {x: pi_preimage_has_min(pi, x) for x in X.poset.points}
    data = {
        "command": "quotient", "file": args.file, "cover": cover_name,
        "quotient": space_to_json(X),
        "projection": morphism_to_json(pi),
        "fiber_minima": minima,
    }
    lines = [f"quotient has {len(X.poset.points)} points: "
             f"{', '.join(X.poset.points)}"]
    for x in X.poset.points:
        m = minima[x]
        lines.append(f"preimage of U_{x}: " +
                     (f"minimum {m}" if m else "no minimum"))
    if args.dot:
        text = space_dot(parsed.main, "base") + space_dot(X, "quotient")
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(text)
        lines.append(f"dot written to {args.dot}")
    return Report(data, "\n".join(lines), 0)


def _cmd_transport(args):
    cap = _resolve_cap(args)
    parsed = parse_file(args.file)
    _require_valid_space(parsed)
    if args.morphism not in parsed.morphisms:
        raise ParseError(f"no morphism named {args.morphism!r}")
    phi = parsed.morphisms[args.morphism]
    bad = check_morphism(phi)
    if bad:
        raise ParseError("morphism is not valid: " + "; ".join(bad))
    src_name, tgt_name = parsed.morphism_spaces[args.morphism]
    sheaf_space = src_name if args.direction == "push" else tgt_name
    sheaf = parsed.sheaf_on(sheaf_space, args.sheaf)
    bad = validate_sheaf(sheaf)
    if bad:
        raise ParseError("sheaf is not valid: " + "; ".join(bad))
    if args.direction == "push":
        result = pushforward(phi, sheaf, cap)
    else:
        result = pullback(phi, sheaf, cap)
    ok, edge = is_quasi_coherent(result, cap)
    data = {
        "command": "transport", "file": args.file,
        "morphism": args.morphism, "sheaf": args.sheaf,
        "direction": args.direction,
        "result": sheaf_to_json(result),
        "quasi_coherent": ok,
        "qc_witness_edge": list(edge) if edge else None,
    }
    exit_code = 0
    lines = [f"{args.direction}ed sheaf {args.sheaf} along {args.morphism}",
             f"result is {'quasi-coherent' if ok else 'not quasi-coherent'}"]
    if args.check_adjunction:
        if args.direction == "push":
            adj = unit_counit(phi, sheaf, result, cap)
        else:
            adj = unit_counit(phi, result, sheaf, cap)
        data["adjunction"] = {"unit_iso": adj.unit_is_iso,
                              "counit_iso": adj.counit_is_iso}
        lines.append(f"unit stalkwise iso: {adj.unit_is_iso}")
        lines.append(f"counit stalkwise iso: {adj.counit_is_iso}")
        if not (adj.unit_is_iso and adj.counit_is_iso):
            exit_code = 1
    return Report(data, "\n".join(lines), exit_code)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ringedcore",
        description="finite preordered spaces with rings: validation, "
                    "quasi-coherence, cores, homotopy classification")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, dot=False):
        p.add_argument("--json", action="store_true",
                       help="print the machine-readable JSON report")
        p.add_argument("--cap", type=int, default=None,
                       help="enumeration cap (default 10^6 or RINGEDCORE_CAP)")
        if dot:
            p.add_argument("--dot", default=None,
                           help="write Graphviz diagrams to this path")

    p = sub.add_parser("validate", help="check all invariants of a file")
    p.add_argument("file")
    common(p)

    p = sub.add_parser("core", help="beat-point core with removal trace")
    p.add_argument("file")
    common(p, dot=True)

    p = sub.add_parser("heq", help="decide homotopy equivalence of two files")
    p.add_argument("file_a")
    p.add_argument("file_b")
    common(p)

    p = sub.add_parser("qc", help="quasi-coherence of a named sheaf")
    p.add_argument("file")
    p.add_argument("sheaf")
    common(p)

    p = sub.add_parser("quotient", help="collapse the space along a cover")
    p.add_argument("file")
    p.add_argument("--cover", default=None)
    common(p, dot=True)

    p = sub.add_parser("transport", help="push or pull a sheaf along a morphism")
    p.add_argument("file")
    p.add_argument("morphism")
    p.add_argument("sheaf")
    p.add_argument("--direction", choices=("push", "pull"), required=True)
    p.add_argument("--check-adjunction", action="store_true")
    common(p)

    args = parser.parse_args(argv)
    commands = {
        "validate": _cmd_validate,
        "core": _cmd_core,
        "heq": _cmd_heq,
        "qc": _cmd_qc,
        "quotient": _cmd_quotient,
        "transport": _cmd_transport,
    }
    try:
        report = commands[args.command](args)
    except SearchCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except RingedCoreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return report.emit(args.json)


def console_main():
    sys.exit(main())


if __name__ == "__main__":
    console_main()
