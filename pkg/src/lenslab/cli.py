"""Batch command line over ``.lenslab`` documents.

Exit status: 0 when a property holds or a construction succeeds, 1 when a
property fails (witnesses are reported), 2 for usage and load errors.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
from dataclasses import dataclass, field

from .document import Workspace, document, parse
from .errors import LensLabError, PreconditionError, Violation
from .fincat import cat_pullback, validate_category
from .gen import PRNG_ALGORITHM, GenConfig, gen_category, gen_cospan, gen_lens
from .lens import (
    Lens,
    dopf_witnesses,
    free_product_projections,
    split_opfibration_witnesses,
    validate_cofunctor,
    validate_lens,
)
from .spans import (
    comparison_lens,
    independence_witnesses,
    split_independence_witnesses,
    sync_minimal_core,
    verify_universal_property,
)
from .squares import LensSpan, LensSquare, commuting_violations, compatibility_violations, proxy_pullback

__all__ = ["Result", "Usage", "parse", "execute", "main"]

CHECKS = (
    "lens",
    "cofunctor",
    "dopf",
    "sopf",
    "commuting",
    "compatible",
    "sync-minimal",
    "independent",
    "split-independent",
)
CONSTRUCTIONS = ("cat-pullback", "proxy-pullback", "sync-core", "free-product", "comparison-lens")


class Usage(LensLabError):
    """Bad command line or wrongly typed argument (exit 2)."""


@dataclass
class Result:
    status: int
    text: str
    record: dict = field(default_factory=dict)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise Usage(message)


def _command_parser():
    p = _Parser(prog="lenslab", add_help=False)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    v = sub.add_parser("validate", add_help=False)
    v.add_argument("name")
    c = sub.add_parser("check", add_help=False)
    c.add_argument("property", choices=CHECKS)
    c.add_argument("name")
    c.add_argument("--method", choices=("by-definition", "by-characterisation"), default="by-definition")
    k = sub.add_parser("construct", add_help=False)
    k.add_argument("construction", choices=CONSTRUCTIONS)
    k.add_argument("names", nargs="+")
    k.add_argument("--as", dest="result", default=None)
    r = sub.add_parser("verify", add_help=False)
    r.add_argument("property", choices=("universal-property",))
    r.add_argument("square")
    r.add_argument("candidates", nargs="+")
    g = sub.add_parser("gen", add_help=False)
    g.add_argument("what", choices=("category", "lens", "cospan"))
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--max-objects", type=int, default=4)
    g.add_argument("--max-extra-morphisms", type=int, default=6)
    g.add_argument("--as", dest="result", default=None)
    d = sub.add_parser("dot", add_help=False)
    d.add_argument("name")
    return p


# ----------------------------------------------------------------- lookups

def _get(ws: Workspace, name, *kinds):
    if name not in ws:
        raise Usage(f"unknown name {name!r}")
    if kinds and ws.kind(name) not in kinds:
        raise Usage(f"{name!r} is a {ws.kind(name)}, expected {' or '.join(kinds)}")
    return ws[name]


def _span(ws, name) -> LensSpan:
    value = _get(ws, name, "span", "square")
    return value.span if isinstance(value, LensSquare) else value


def _wit(items):
    """Witnesses as JSON-ready lists of strings."""
    out = []
    for w in items:
        if isinstance(w, Violation):
            out.append([w.law, *map(str, w.witness)] + ([w.message] if w.message else []))
        elif isinstance(w, tuple):
            out.append([x if isinstance(x, str) else str(x) for x in w])
        else:
            out.append([str(w)])
    return out


def _verdict(command, holds, witnesses, extra=None):
    status = 0 if holds else 1
    lines = [f"{command}: {'holds' if holds else 'fails'}"]
    for w in witnesses:
        lines.append("  witness: " + ", ".join(w))
    record = {"command": command, "status": status, "holds": holds, "witnesses": witnesses}
    if extra:
        record.update(extra)
    return Result(status, "\n".join(lines) + "\n", record)


# ----------------------------------------------------------------- commands

def _validate(ws, args, command):
    _get(ws, args.name)
    report = ws.reports.get(args.name, [])
    return _verdict(command, not report, _wit(report), {"kind": ws.kind(args.name)})


def _check(ws, args, command):
    prop, name = args.property, args.name
    extra = {}
    if prop == "lens":
        witnesses = validate_lens(_get(ws, name, "lens"))
    elif prop == "cofunctor":
        value = _get(ws, name, "cofunctor", "lens")
        witnesses = validate_cofunctor(value.put if isinstance(value, Lens) else value)
    elif prop == "dopf":
        value = _get(ws, name, "functor", "lens")
        witnesses = dopf_witnesses(value.get if isinstance(value, Lens) else value)
    elif prop == "sopf":
        witnesses = split_opfibration_witnesses(_get(ws, name, "lens"), args.method)
        extra["method"] = args.method
    elif prop == "commuting":
        witnesses = commuting_violations(_get(ws, name, "square"))
    elif prop == "compatible":
        sq = _get(ws, name, "square")
        witnesses = commuting_violations(sq) or compatibility_violations(sq)
    elif prop == "sync-minimal":
        witnesses = [(d,) for d in sync_minimal_core(_span(ws, name)).removed]
    elif prop == "independent":
        witnesses = independence_witnesses(_span(ws, name))
    else:
        witnesses = split_independence_witnesses(_get(ws, name, "square"))
    return _verdict(command, not witnesses, _wit(witnesses), extra)


def _built(command, named, ws, meta=None, extra=None):
    text = document(*named, meta=meta, known=ws)
    record = {"command": command, "status": 0, "holds": True, "document": text, **(extra or {})}
    return Result(0, text, record)


def _construct(ws, args, command):
    what, names = args.construction, args.names
    arity = {"cat-pullback": 1, "proxy-pullback": 1, "sync-core": 1, "free-product": 2, "comparison-lens": 2}
    if len(names) != arity[what]:
        raise Usage(f"construct {what} takes {arity[what]} name(s)")
    out = args.result or f"{what}({','.join(names)})"
    if what == "cat-pullback":
        cospan = _get(ws, names[0], "cospan")
        D, PA, PB = cat_pullback(cospan.left.get, cospan.right.get)
        named = [(f"{out}.apex", D), (f"{out}.left", PA), (f"{out}.right", PB)]
        return _built(command, named, ws)
    if what == "proxy-pullback":
        sq = proxy_pullback(_get(ws, names[0], "cospan"))
        named = [
            (f"{out}.apex", sq.span.apex),
            (f"{out}.left", sq.span.left),
            (f"{out}.right", sq.span.right),
            (f"{out}.span", sq.span),
            (out, sq),
        ]
        return _built(command, named, ws)
    if what == "sync-core":
        core = sync_minimal_core(_span(ws, names[0]))
        named = [
            (f"{out}.apex", core.core.apex),
            (f"{out}.left", core.core.left),
            (f"{out}.right", core.core.right),
            (out, core.core),
            (f"{out}.inclusion", core.inclusion),
        ]
        removed = {"removed": list(core.removed)}
        return _built(command, named, ws, meta=removed, extra=removed)
    if what == "free-product":
        A, B = _get(ws, names[0], "category"), _get(ws, names[1], "category")
        span = free_product_projections(A, B)
        named = [(f"{out}.apex", span.apex), (f"{out}.left", span.left), (f"{out}.right", span.right), (out, span)]
        return _built(command, named, ws)
    candidate = _span(ws, names[0])
    sq = _get(ws, names[1], "square")
    try:
        res = comparison_lens(candidate, sq)
    except PreconditionError as exc:
        witnesses = [[f] for f in exc.failed]
        return _verdict(command, False, witnesses)
    return _built(command, [(out, res.lens)], ws)


def _verify(ws, args, command):
    sq = _get(ws, args.square, "square")
    spans = [_span(ws, n) for n in args.candidates]
    verdicts = verify_universal_property(sq, spans)
    rows = {n: str(v) for n, v in zip(args.candidates, verdicts)}
    holds = all(v.kind == "unique" for v in verdicts)
    lines = [f"{command}: {'holds' if holds else 'fails'}"]
    lines += [f"  {n}: {v}" for n, v in rows.items()]
    record = {
        "command": command,
        "status": 0 if holds else 1,
        "holds": holds,
        "verdicts": rows,
        "witnesses": [[n, v] for n, v in rows.items() if v != "unique"],
    }
    return Result(record["status"], "\n".join(lines) + "\n", record)


def _gen(ws, args, command):
    if args.max_objects < 1 or args.max_extra_morphisms < 0:
        raise Usage("bounds must be positive")
    cfg = GenConfig(seed=args.seed, max_objects=args.max_objects, max_extra_morphisms=args.max_extra_morphisms)
    meta = {
        "generator": args.what,
        "prng": PRNG_ALGORITHM,
        "seed": args.seed,
        "max_objects": args.max_objects,
        "max_extra_morphisms": args.max_extra_morphisms,
    }
    out = args.result or "GEN"
    if args.what == "category":
        named = [(out, gen_category(cfg))]
    elif args.what == "lens":
        L = gen_lens(cfg)
        named = [(f"{out}.dom", L.dom), (f"{out}.cod", L.cod), (out, L)]
    else:
        co = gen_cospan(cfg)
        named = [
            (f"{out}.apex", co.apex),
            (f"{out}.A", co.left.dom),
            (f"{out}.B", co.right.dom),
            (f"{out}.left", co.left),
            (f"{out}.right", co.right),
            (out, co),
        ]
    return _built(command, named, Workspace(), meta=meta, extra={"meta": meta})


def _dot(ws, args, command):
    cat = _get(ws, args.name, "category")
    if validate_category(cat):
        raise Usage(f"{args.name!r} is not a valid category")
    lines = [f"digraph {json.dumps(args.name, ensure_ascii=False)} {{"]
    lines += [f"  {json.dumps(x, ensure_ascii=False)};" for x in cat.objects]
    for f in cat.non_identities:
        s, t = cat.morphisms[f]
        lines.append(
            f"  {json.dumps(s, ensure_ascii=False)} -> {json.dumps(t, ensure_ascii=False)}"
            f" [label={json.dumps(f, ensure_ascii=False)}];"
        )
    text = "\n".join(lines) + "\n}\n"
    return Result(0, text, {"command": command, "status": 0, "holds": True, "dot": text})


_HANDLERS = {
    "validate": _validate,
    "check": _check,
    "construct": _construct,
    "verify": _verify,
    "gen": _gen,
    "dot": _dot,
}


def execute(ws: Workspace, command) -> Result:
    """Run one command (a string or token list) against a workspace."""
    tokens = shlex.split(command) if isinstance(command, str) else list(command)
    text = " ".join(tokens)
    try:
        args = _command_parser().parse_args(tokens)
        return _HANDLERS[args.command](ws, args, text)
    except LensLabError as exc:
        return Result(2, f"error: {exc}\n", {"command": text, "status": 2, "error": str(exc)})


def _load(paths, lenient):
    ws = Workspace()
    for path in paths:
        with open(path, encoding="utf-8") as handle:
            ws.merge(parse(handle.read(), lenient=lenient))
    return ws


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="lenslab",
        description="Check and construct finite categories, delta lenses and proxy pullbacks.",
        epilog="commands: validate, check, construct, verify, gen, dot",
    )
    ap.add_argument("-f", "--file", action="append", default=[], help="document to load (repeatable)")
    ap.add_argument("--json", action="store_true", help="print the machine-readable record")
    ap.add_argument("command", nargs=argparse.REMAINDER)
    ns = ap.parse_args(argv)
    if not ns.command:
        ap.print_usage(sys.stderr)
        return 2
    lenient = ns.command[0] == "validate"
    try:
        ws = _load(ns.file, lenient)
    except (OSError, LensLabError) as exc:
        msg = f"error: {exc}"
        if ns.json:
            print(json.dumps({"command": " ".join(ns.command), "status": 2, "error": str(exc)}, ensure_ascii=False))
        else:
            print(msg, file=sys.stderr)
        return 2
    res = execute(ws, ns.command)
    if ns.json:
        print(json.dumps(res.record, ensure_ascii=False, indent=2))
    else:
        stream = sys.stderr if res.status == 2 else sys.stdout
        stream.write(res.text)
    return res.status


if __name__ == "__main__":
    raise SystemExit(main())
