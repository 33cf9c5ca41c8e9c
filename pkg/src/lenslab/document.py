"""The ``.lenslab`` text format.

A document is a JSON object with optional sections ``category``,
``functor``, ``cofunctor``, ``lens``, ``span``, ``cospan`` and ``square``,
each mapping binding names to definitions, plus an optional ``meta``
object.  Later sections refer to earlier bindings by name::

    {
      "category": {"C": {"objects": [...], "morphisms": {"c": ["C1", "C2"]},
                         "identities": {...}, "compose": [["g", "f", "g∘f"]]}},
      "lens": {"F": {"dom": "A", "cod": "C", "get_obj": {...}, "get_mor": {...},
                     "lift": [{"at": "A1", "over": "c", "put": "a"}]}},
      "cospan": {"K": {"left": "F", "right": "G"}}
    }

Identities and every composite (identity composites included) are written
out; the file is the whole truth about a category.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .errors import LensLabError, Violation
from .fincat import FinCat, Functor, validate_category, validate_functor
from .lens import Cofunctor, Lens, validate_cofunctor, validate_lens
from .squares import LensCospan, LensSpan, LensSquare

SECTIONS = ("category", "functor", "cofunctor", "lens", "span", "cospan", "square")


class LoadError(LensLabError):
    """A problem in a document, tagged with where it happened."""

    def __init__(self, message, location="", line=None, column=None, report=()):
        self.message = message
        self.location = location
        self.line = line
        self.column = column
        self.report = list(report)
        where = location
        if line is not None:
            where = f"{where} (line {line}, column {column})" if where else f"line {line}, column {column}"
        text = f"{where}: {message}" if where else message
        if self.report:
            text += "".join(f"\n  - {v}" for v in self.report)
        super().__init__(text)


@dataclass
class Workspace:
    bindings: dict = field(default_factory=dict)
    kinds: dict = field(default_factory=dict)
    reports: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __contains__(self, name):
        return name in self.bindings

    def __getitem__(self, name):
        return self.bindings[name]

    def kind(self, name):
        return self.kinds[name]

    def bind(self, name, kind, value, report=()):
        if name in self.bindings:
            raise LoadError(f"name {name!r} is already bound to a {self.kinds[name]}")
        self.bindings[name] = value
        self.kinds[name] = kind
        self.reports[name] = list(report)

    def merge(self, other: "Workspace"):
        for name, value in other.bindings.items():
            self.bind(name, other.kinds[name], value, other.reports[name])
        self.meta.update(other.meta)


# ------------------------------------------------------------------ parsing

def _line_of(text, name):
    m = re.search(re.escape(json.dumps(name, ensure_ascii=False)) + r"\s*:", text)
    if not m:
        return None, None
    line = text.count("\n", 0, m.start()) + 1
    return line, m.start() - (text.rfind("\n", 0, m.start()) + 1) + 1


def _expect(value, typ, where):
    if not isinstance(value, typ):
        name = typ.__name__ if isinstance(typ, type) else "/".join(t.__name__ for t in typ)
        raise LoadError(f"expected {name}, got {type(value).__name__}", where)
    return value


def _str_map(value, where):
    _expect(value, dict, where)
    for k, v in value.items():
        _expect(v, str, f"{where}.{k}")
    return dict(value)


def _lift_table(records, where):
    _expect(records, list, where)
    table = {}
    for i, rec in enumerate(records):
        at = f"{where}[{i}]"
        _expect(rec, dict, at)
        missing = {"at", "over", "put"} - set(rec)
        if missing:
            raise LoadError(f"lift record lacks {', '.join(sorted(missing))}", at)
        key = (_expect(rec["at"], str, at + ".at"), _expect(rec["over"], str, at + ".over"))
        if key in table:
            raise LoadError(f"duplicate lift at {key[0]!r} over {key[1]!r}", at)
        table[key] = _expect(rec["put"], str, at + ".put")
    return table


def _category_from(raw, where) -> FinCat:
    _expect(raw, dict, where)
    for key in ("objects", "morphisms", "identities", "compose"):
        if key not in raw:
            raise LoadError(f"missing field {key!r}", where)
    objects = _expect(raw["objects"], list, where + ".objects")
    for i, x in enumerate(objects):
        _expect(x, str, f"{where}.objects[{i}]")
    morphisms = {}
    for f, st in _expect(raw["morphisms"], dict, where + ".morphisms").items():
        _expect(st, list, f"{where}.morphisms.{f}")
        if len(st) != 2 or not all(isinstance(e, str) for e in st):
            raise LoadError("a morphism is written [source, target]", f"{where}.morphisms.{f}")
        morphisms[f] = tuple(st)
    identity = _str_map(raw["identities"], where + ".identities")
    compose = {}
    for i, row in enumerate(_expect(raw["compose"], list, where + ".compose")):
        at = f"{where}.compose[{i}]"
        _expect(row, list, at)
        if len(row) != 3 or not all(isinstance(e, str) for e in row):
            raise LoadError("a composite is written [g, f, g∘f]", at)
        if (row[0], row[1]) in compose:
            raise LoadError(f"composite of {row[0]!r} after {row[1]!r} given twice", at)
        compose[row[0], row[1]] = row[2]
    return FinCat(tuple(objects), morphisms, identity, compose)


def _ref(ws, name, kinds, where):
    if not isinstance(name, str):
        raise LoadError("a reference is a binding name", where)
    if name not in ws:
        raise LoadError(f"dangling reference to {name!r}", where)
    if ws.kind(name) not in kinds:
        raise LoadError(f"{name!r} is a {ws.kind(name)}, expected {' or '.join(kinds)}", where)
    return ws[name]


def _fields(raw, names, where):
    _expect(raw, dict, where)
    missing = [k for k in names if k not in raw]
    if missing:
        raise LoadError(f"missing field {missing[0]!r}", where)
    return [raw[k] for k in names]


def _build(kind, raw, ws, where):
    """Return ``(value, report)`` for one binding."""
    if kind == "category":
        cat = _category_from(raw, where)
        return cat, validate_category(cat)
    if kind == "functor":
        dom, cod, obj, mor = _fields(raw, ("dom", "cod", "obj", "mor"), where)
        F = Functor(
            _ref(ws, dom, ("category",), where + ".dom"),
            _ref(ws, cod, ("category",), where + ".cod"),
            _str_map(obj, where + ".obj"),
            _str_map(mor, where + ".mor"),
        )
        return F, _upstream(ws, (dom, cod)) or validate_functor(F)
    if kind == "cofunctor":
        dom, cod, obj, lift = _fields(raw, ("dom", "cod", "obj", "lift"), where)
        P = Cofunctor(
            _ref(ws, dom, ("category",), where + ".dom"),
            _ref(ws, cod, ("category",), where + ".cod"),
            _str_map(obj, where + ".obj"),
            _lift_table(lift, where + ".lift"),
        )
        return P, _upstream(ws, (dom, cod)) or validate_cofunctor(P)
    if kind == "lens":
        dom, cod, obj, mor, lift = _fields(raw, ("dom", "cod", "get_obj", "get_mor", "lift"), where)
        A = _ref(ws, dom, ("category",), where + ".dom")
        C = _ref(ws, cod, ("category",), where + ".cod")
        obj = _str_map(obj, where + ".get_obj")
        L = Lens(
            Functor(A, C, obj, _str_map(mor, where + ".get_mor")),
            Cofunctor(A, C, obj, _lift_table(lift, where + ".lift")),
        )
        return L, _upstream(ws, (dom, cod)) or validate_lens(L)
    if kind in ("span", "cospan"):
        left, right = _fields(raw, ("left", "right"), where)
        legs = (_ref(ws, left, ("lens",), where + ".left"), _ref(ws, right, ("lens",), where + ".right"))
        cls = LensSpan if kind == "span" else LensCospan
        try:
            value = cls(*legs)
        except LensLabError as exc:
            raise LoadError(str(exc), where) from None
        return value, _upstream(ws, (left, right))
    if kind == "square":
        span, cospan = _fields(raw, ("span", "cospan"), where)
        try:
            value = LensSquare(
                _ref(ws, span, ("span",), where + ".span"),
                _ref(ws, cospan, ("cospan",), where + ".cospan"),
            )
        except LoadError:
            raise
        except LensLabError as exc:
            raise LoadError(str(exc), where) from None
        return value, _upstream(ws, (span, cospan))
    raise LoadError(f"unknown section {kind!r}")


def _upstream(ws, names):
    """A single violation if any referenced binding is itself invalid."""
    bad = tuple(n for n in names if ws.reports.get(n))
    return [Violation("invalid-dependency", bad, "refers to an invalid binding")] if bad else []


def parse(document: str, lenient: bool = False) -> Workspace:
    """Load a document into a workspace, validating every binding.

    With ``lenient=True`` law violations are recorded in ``ws.reports``
    instead of aborting the load; syntax errors, malformed records and
    dangling references still raise :class:`LoadError`.
    """
    ws = Workspace()
    if not document.strip():
        return ws
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as exc:
        raise LoadError(exc.msg, "syntax error", exc.lineno, exc.colno) from None
    if not isinstance(raw, dict):
        raise LoadError("a document is a JSON object", "$", 1, 1)
    unknown = [k for k in raw if k not in SECTIONS and k != "meta"]
    if unknown:
        line, col = _line_of(document, unknown[0])
        raise LoadError(f"unknown section {unknown[0]!r}", "$", line, col)
    ws.meta = dict(_expect(raw.get("meta", {}), dict, "$.meta"))
    for kind in SECTIONS:
        section = _expect(raw.get(kind, {}), dict, f"$.{kind}")
        for name, body in section.items():
            where = f"$.{kind}.{name}"
            try:
                value, report = _build(kind, body, ws, where)
            except LoadError as exc:
                if exc.line is not None:
                    raise
                line, col = _line_of(document, name)
                raise LoadError(exc.message, exc.location or where, line, col, exc.report) from None
            if report and not lenient:
                line, col = _line_of(document, name)
                raise LoadError(f"invalid {kind}", where, line, col, report)
            ws.bind(name, kind, value, report)
    return ws


def load(path, lenient: bool = False) -> Workspace:
    with open(path, encoding="utf-8") as handle:
        return parse(handle.read(), lenient=lenient)


# ----------------------------------------------------------------- printing

def _kind_of(value):
    for kind, cls in (
        ("category", FinCat),
        ("functor", Functor),
        ("cofunctor", Cofunctor),
        ("lens", Lens),
        ("span", LensSpan),
        ("cospan", LensCospan),
        ("square", LensSquare),
    ):
        if isinstance(value, cls):
            return kind
    raise TypeError(f"cannot serialise {type(value).__name__}")


class Printer:
    """Collects named values and their dependencies into one document.

    Values already named in ``known`` (usually a workspace) keep their
    names; unnamed dependencies are named after the binding that needs them.
    """

    def __init__(self, known: Workspace | None = None):
        self._known = list(known.bindings.items()) if known else []
        self._named = {kind: {} for kind in SECTIONS}
        self._values = []
        self._reserved = set()
        self.meta = {}

    def reserve(self, names):
        """Keep ``names`` free for values that will be added under them."""
        self._reserved.update(names)

    def _lookup(self, value):
        for name, v in self._values:
            if v is value:
                return name
        for name, v in self._values:
            if type(v) is type(value) and v == value:
                return name
        return None

    def _known_name(self, value):
        for name, v in self._known:
            if v is value:
                return name
        for name, v in self._known:
            if type(v) is type(value) and v == value:
                return name
        return None

    def add(self, name, value, explicit=True):
        """Register ``value`` (and what it refers to) and return its name.

        An explicit name is always bound, even when an equal value is
        already present under another name.
        """
        taken = {n for n, _ in self._values}
        if explicit:
            if name in taken:
                if dict(self._values)[name] == value:
                    return name
                raise ValueError(f"name {name!r} is used twice")
            self._reserved.discard(name)
        else:
            found = self._lookup(value)
            if found is not None:
                return found
            taken |= self._reserved
            base, k = name, 2
            while name in taken:
                name, k = f"{base}~{k}", k + 1
        kind = _kind_of(value)
        body = self._body(kind, name, value)
        self._values.append((name, value))
        self._named[kind][name] = body
        return name

    def _dep(self, value, fallback):
        found = self._lookup(value)
        if found is not None:
            return found
        known = self._known_name(value)
        if known in self._reserved:
            return self.add(known, value)
        return self.add(known or fallback, value, explicit=False)

    def _body(self, kind, name, value):
        if kind == "category":
            return {
                "objects": list(value.objects),
                "morphisms": {f: list(st) for f, st in value.morphisms.items()},
                "identities": dict(value.identity),
                "compose": [[g, f, h] for (g, f), h in value.compose.items()],
            }
        if kind in ("functor", "cofunctor", "lens"):
            dom = self._dep(value.dom, f"{name}.dom")
            cod = self._dep(value.cod, f"{name}.cod")
            if kind == "functor":
                return {"dom": dom, "cod": cod, "obj": dict(value.obj), "mor": dict(value.mor)}
            put = value if kind == "cofunctor" else value.put
            lift = [{"at": x, "over": b, "put": a} for (x, b), a in put.lift.items()]
            if kind == "cofunctor":
                return {"dom": dom, "cod": cod, "obj": dict(value.obj), "lift": lift}
            return {
                "dom": dom,
                "cod": cod,
                "get_obj": dict(value.get.obj),
                "get_mor": dict(value.get.mor),
                "lift": lift,
            }
        if kind in ("span", "cospan"):
            return {
                "left": self._dep(value.left, f"{name}.left"),
                "right": self._dep(value.right, f"{name}.right"),
            }
        return {
            "span": self._dep(value.span, f"{name}.span"),
            "cospan": self._dep(value.cospan, f"{name}.cospan"),
        }

    def document(self) -> str:
        doc = {}
        if self.meta:
            doc["meta"] = self.meta
        for kind in SECTIONS:
            if self._named[kind]:
                doc[kind] = self._named[kind]
        return dumps(doc)


def _scalar(v):
    return v is None or isinstance(v, (str, int, float, bool))


def _emit(value, indent, in_list=False):
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if _scalar(value):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, (list, tuple)):
        if all(_scalar(v) for v in value):
            return "[" + ", ".join(json.dumps(v, ensure_ascii=False) for v in value) + "]"
        items = [inner + _emit(v, indent + 1, in_list=True) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if not value:
        return "{}"
    if in_list and all(_scalar(v) for v in value.values()):
        return "{" + ", ".join(
            f"{json.dumps(k, ensure_ascii=False)}: {json.dumps(v, ensure_ascii=False)}" for k, v in value.items()
        ) + "}"
    items = [f"{inner}{json.dumps(k, ensure_ascii=False)}: {_emit(v, indent + 1)}" for k, v in value.items()]
    return "{\n" + ",\n".join(items) + "\n" + pad + "}"


def dumps(doc) -> str:
    """Deterministic pretty JSON: short lists and lift records stay on one line."""
    return _emit(doc, 0) + "\n"


def document(*named, meta=None, known: Workspace | None = None) -> str:
    """Serialise ``(name, value)`` pairs with everything they depend on."""
    p = Printer(known)
    if meta:
        p.meta = dict(meta)
    p.reserve(name for name, _ in named)
    for name, value in named:
        p.add(name, value)
    return p.document()


def workspace_document(ws: Workspace) -> str:
    return document(*ws.bindings.items(), meta=ws.meta or None, known=ws)
