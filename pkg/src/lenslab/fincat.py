"""Finite categories and functors.

A :class:`FinCat` stores its composition as an explicit table keyed by
``(g, f)`` meaning ``g ∘ f``.  Identifiers are plain strings; two morphisms
are equal exactly when their identifiers are.  Every construction in this
module emits deterministic identifiers so that rebuilding a category yields
an identical value.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from graphlib import CycleError, TopologicalSorter
from typing import Iterator, Mapping

from .errors import (
    BudgetExceeded,
    CospanMismatch,
    NotAcyclic,
    NotCommuting,
    UnknownIdentifier,
    ValidationError,
    Violation,
)

__all__ = [
    "FinCat",
    "Functor",
    "category",
    "free_category",
    "terminal",
    "interval",
    "discrete",
    "coproduct",
    "quotient",
    "validate_category",
    "out_set",
    "is_discrete",
    "is_acyclic",
    "validate_functor",
    "functor",
    "identity_functor",
    "compose_functors",
    "cat_pullback",
    "pairing",
    "pair_id",
    "enumerate_functors",
    "free_product",
    "free_product_words",
]


def pair_id(x: str, y: str) -> str:
    """Canonical identifier of a pair in a pullback."""
    return f"⟨{x},{y}⟩"


@dataclass(frozen=True)
class FinCat:
    objects: tuple
    morphisms: Mapping[str, tuple]
    identity: Mapping[str, str]
    compose: Mapping[tuple, str] = field(repr=False)

    def __repr__(self):
        return f"FinCat(objects={len(self.objects)}, morphisms={len(self.morphisms)})"

    def src(self, f):
        try:
            return self.morphisms[f][0]
        except KeyError:
            raise UnknownIdentifier(f"unknown morphism {f!r}") from None

    def tgt(self, f):
        try:
            return self.morphisms[f][1]
        except KeyError:
            raise UnknownIdentifier(f"unknown morphism {f!r}") from None

    def id(self, x):
        try:
            return self.identity[x]
        except KeyError:
            raise UnknownIdentifier(f"unknown object {x!r}") from None

    def comp(self, g, f):
        """``g ∘ f``."""
        try:
            return self.compose[g, f]
        except KeyError:
            raise ValueError(f"{g!r} and {f!r} are not composable") from None

    def comp_path(self, path):
        """Compose a list of morphisms given in order of application."""
        it = iter(path)
        acc = next(it)
        for f in it:
            acc = self.compose[f, acc]
        return acc

    def out(self, x):
        try:
            return self._out[x]
        except KeyError:
            raise UnknownIdentifier(f"unknown object {x!r}") from None

    def hom(self, x, y):
        return self._hom.get((x, y), ())

    def is_identity(self, f):
        return f in self._identities

    @cached_property
    def _identities(self):
        return frozenset(self.identity.values())

    @cached_property
    def _out(self):
        out = {x: [] for x in self.objects}
        for f, (s, _) in self.morphisms.items():
            if s in out:
                out[s].append(f)
        return {x: tuple(fs) for x, fs in out.items()}

    @cached_property
    def _hom(self):
        hom = {}
        for f, st in self.morphisms.items():
            hom.setdefault(tuple(st), []).append(f)
        return {k: tuple(v) for k, v in hom.items()}

    @cached_property
    def non_identities(self):
        return tuple(f for f in self.morphisms if f not in self._identities)

    @cached_property
    def object_index(self):
        return {x: i for i, x in enumerate(self.objects)}

    @cached_property
    def morphism_index(self):
        return {f: i for i, f in enumerate(self.morphisms)}


def category(objects, morphisms, identity, compose) -> FinCat:
    """Build a category and raise :class:`ValidationError` unless it is valid."""
    cat = FinCat(
        tuple(objects),
        {f: tuple(st) for f, st in dict(morphisms).items()},
        dict(identity),
        dict(compose),
    )
    report = validate_category(cat)
    if report:
        raise ValidationError("category", report)
    return cat


def validate_category(cat: FinCat) -> list:
    """Return every violated category law; an empty list means valid."""
    report = []
    objects = set()
    for x in cat.objects:
        if not isinstance(x, str) or not x:
            report.append(Violation("identifier", (x,), "object ids are nonempty strings"))
        if x in objects:
            report.append(Violation("duplicate-object", (x,)))
        objects.add(x)
    morphisms = cat.morphisms
    for f, st in morphisms.items():
        if not isinstance(f, str) or not f:
            report.append(Violation("identifier", (f,), "morphism ids are nonempty strings"))
        for end in st:
            if end not in objects:
                report.append(Violation("dangling", (f, end), "unknown object"))
    for x in objects:
        if x not in cat.identity:
            report.append(Violation("dangling", (x,), "object has no identity"))
    for x, i in cat.identity.items():
        if x not in objects:
            report.append(Violation("dangling", (x,), "identity of unknown object"))
        elif i not in morphisms:
            report.append(Violation("dangling", (x, i), "identity is not a morphism"))
        elif tuple(morphisms[i]) != (x, x):
            report.append(Violation("identity-type", (x, i)))
    for (g, f), h in cat.compose.items():
        for m in (g, f, h):
            if m not in morphisms:
                report.append(Violation("dangling", (g, f, h), f"unknown morphism {m}"))
    if any(v.law == "dangling" for v in report):
        return report

    def st(m):
        return morphisms[m]

    for (g, f), h in cat.compose.items():
        if st(g)[0] != st(f)[1]:
            report.append(Violation("compose-domain", (g, f), "pair is not composable"))
        elif tuple(st(h)) != (st(f)[0], st(g)[1]):
            report.append(Violation("compose-type", (g, f, h)))
    by_src = {}
    for m, (s, _) in morphisms.items():
        by_src.setdefault(s, []).append(m)
    for f, (_, t) in morphisms.items():
        for g in by_src.get(t, ()):
            if (g, f) not in cat.compose:
                report.append(Violation("compose-total", (g, f), "composite missing"))
    for f, (s, t) in morphisms.items():
        if cat.compose.get((f, cat.identity[s])) != f:
            report.append(Violation("right-identity", (f,)))
        if cat.compose.get((cat.identity[t], f)) != f:
            report.append(Violation("left-identity", (f,)))
    comp = cat.compose
    for f, (_, t) in morphisms.items():
        for g in by_src.get(t, ()):
            gf = comp.get((g, f))
            if gf is None:
                continue
            for h in by_src.get(st(g)[1], ()):
                hg = comp.get((h, g))
                if hg is None:
                    continue
                lhs, rhs = comp.get((h, gf)), comp.get((hg, f))
                if lhs != rhs:
                    report.append(Violation("associativity", (h, g, f)))
    return report


def out_set(cat: FinCat, x) -> frozenset:
    """Morphisms of ``cat`` out of ``x``, identity included."""
    return frozenset(cat.out(x))


def is_discrete(cat: FinCat) -> bool:
    return not cat.non_identities


def is_acyclic(cat: FinCat) -> bool:
    """True when non-identity morphisms form no cycle and no endomorphism."""
    graph = {x: set() for x in cat.objects}
    for f in cat.non_identities:
        s, t = cat.morphisms[f]
        if s == t:
            return False
        graph[t].add(s)
    try:
        tuple(TopologicalSorter(graph).static_order())
    except CycleError:
        return False
    return True


def terminal() -> FinCat:
    return category(["0"], {"id_0": ("0", "0")}, {"0": "id_0"}, {("id_0", "id_0"): "id_0"})


def interval() -> FinCat:
    return free_category(["0", "1"], {"u": ("0", "1")})


def discrete(names) -> FinCat:
    if isinstance(names, int):
        names = [str(i) for i in range(names)]
    return free_category(names, {})


def free_category(objects, generators) -> FinCat:
    """Free category on an acyclic graph.

    Paths are named by joining generator names with ``∘`` in composition
    order, so the path ``f`` then ``g`` is ``"g∘f"``.  Identities are
    ``"id_X"``.
    """
    objects = list(objects)
    generators = dict(generators)
    graph = {x: set() for x in objects}
    for name, (s, t) in generators.items():
        if s == t:
            raise NotAcyclic(f"generator {name!r} is an endomorphism")
        graph[t].add(s)
    try:
        order = list(TopologicalSorter(graph).static_order())
    except CycleError:
        raise NotAcyclic("generator graph has a cycle") from None
    rank = {x: i for i, x in enumerate(order)}
    out_gens = {x: [] for x in objects}
    for name, (s, t) in generators.items():
        out_gens[s].append(name)

    # all paths, grouped by source, shortest first
    paths = {}
    for x in objects:
        frontier = [()]
        while frontier:
            nxt = []
            for p in frontier:
                end = generators[p[-1]][1] if p else x
                for g in out_gens[end]:
                    q = p + (g,)
                    paths[q] = (x, generators[g][1])
                    nxt.append(q)
            frontier = nxt

    def name(p):
        return "∘".join(reversed(p))

    morphisms = {f"id_{x}": (x, x) for x in objects}
    identity = {x: f"id_{x}" for x in objects}
    ordered = sorted(paths, key=lambda p: (len(p), rank[paths[p][0]]))
    for p in ordered:
        morphisms[name(p)] = paths[p]
    if len(morphisms) != len(objects) + len(paths):
        raise ValueError("path names collide; rename generators")
    compose = {}
    allp = [((), x) for x in objects] + [(p, paths[p][0]) for p in ordered]

    def ends(p, x):
        return (x, x) if not p else paths[p]

    by_src = {}
    for p, x in allp:
        by_src.setdefault(x, []).append(p)
    for p, x in allp:
        t = ends(p, x)[1]
        for q in by_src[t]:
            r = p + q
            pname = name(p) if p else f"id_{x}"
            qname = name(q) if q else f"id_{t}"
            rname = name(r) if r else f"id_{x}"
            compose[qname, pname] = rname
    return category(objects, morphisms, identity, compose)


def coproduct(first: FinCat, second: FinCat, tags=("L", "R")) -> FinCat:
    """Disjoint union; identifiers are prefixed by ``tag:``."""
    objects, morphisms, identity, compose = [], {}, {}, {}
    for tag, cat in zip(tags, (first, second)):
        pre = f"{tag}:"
        objects += [pre + x for x in cat.objects]
        for f, (s, t) in cat.morphisms.items():
            morphisms[pre + f] = (pre + s, pre + t)
        for x, i in cat.identity.items():
            identity[pre + x] = pre + i
        for (g, f), h in cat.compose.items():
            compose[pre + g, pre + f] = pre + h
    return category(objects, morphisms, identity, compose)


def quotient(cat: FinCat, pairs) -> FinCat:
    """Quotient by the least congruence identifying each given pair.

    Classes are named by their earliest morphism in declaration order.
    Raises ValueError if a pair is not parallel.
    """
    parent = {f: f for f in cat.morphisms}
    index = cat.morphism_index

    def find(f):
        while parent[f] != f:
            parent[f] = parent[parent[f]]
            f = parent[f]
        return f

    def union(f, g):
        rf, rg = find(f), find(g)
        if rf == rg:
            return False
        if index[rg] < index[rf]:
            rf, rg = rg, rf
        parent[rg] = rf
        return True

    for f, g in pairs:
        if cat.morphisms[f] != cat.morphisms[g]:
            raise ValueError(f"{f!r} and {g!r} are not parallel")
        union(f, g)
    changed = True
    while changed:
        changed = False
        seen = {}
        for (g, f), h in cat.compose.items():
            key = (find(g), find(f))
            if key in seen:
                changed |= union(seen[key], h)
            else:
                seen[key] = h
    reps = [f for f in cat.morphisms if find(f) == f]
    morphisms = {f: cat.morphisms[f] for f in reps}
    compose = {}
    for (g, f), h in cat.compose.items():
        compose[find(g), find(f)] = find(h)
    identity = {x: find(i) for x, i in cat.identity.items()}
    return category(cat.objects, morphisms, identity, compose)


@dataclass(frozen=True)
class Functor:
    dom: FinCat = field(repr=False)
    cod: FinCat = field(repr=False)
    obj: Mapping[str, str]
    mor: Mapping[str, str]

    def __call__(self, f):
        return self.mor[f]


def validate_functor(F: Functor) -> list:
    report = []
    A, B = F.dom, F.cod
    for x in A.objects:
        if x not in F.obj:
            report.append(Violation("dangling", (x,), "object has no image"))
        elif F.obj[x] not in B.identity:
            report.append(Violation("dangling", (x, F.obj[x]), "image is not an object"))
    for f in A.morphisms:
        if f not in F.mor:
            report.append(Violation("dangling", (f,), "morphism has no image"))
        elif F.mor[f] not in B.morphisms:
            report.append(Violation("dangling", (f, F.mor[f]), "image is not a morphism"))
    for x in F.obj:
        if x not in A.identity:
            report.append(Violation("dangling", (x,), "unknown object in object map"))
    for f in F.mor:
        if f not in A.morphisms:
            report.append(Violation("dangling", (f,), "unknown morphism in morphism map"))
    if report:
        return report
    for f, (s, t) in A.morphisms.items():
        bs, bt = B.morphisms[F.mor[f]]
        if bs != F.obj[s]:
            report.append(Violation("preserves-source", (f,)))
        if bt != F.obj[t]:
            report.append(Violation("preserves-target", (f,)))
    for x, i in A.identity.items():
        if F.mor[i] != B.identity[F.obj[x]]:
            report.append(Violation("preserves-identity", (x,)))
    for (g, f), h in A.compose.items():
        if B.compose.get((F.mor[g], F.mor[f])) != F.mor[h]:
            report.append(Violation("preserves-composition", (g, f)))
    return report


def functor(dom, cod, obj, mor) -> Functor:
    F = Functor(dom, cod, dict(obj), dict(mor))
    report = validate_functor(F)
    if report:
        raise ValidationError("functor", report)
    return F


def identity_functor(cat: FinCat) -> Functor:
    return Functor(cat, cat, {x: x for x in cat.objects}, {f: f for f in cat.morphisms})


def compose_functors(F: Functor, G: Functor) -> Functor:
    """``G ∘ F``: apply ``F`` first."""
    if F.cod is not G.dom and F.cod != G.dom:
        raise CospanMismatch("codomain of the first functor is not the domain of the second")
    return Functor(
        F.dom,
        G.cod,
        {x: G.obj[y] for x, y in F.obj.items()},
        {f: G.mor[g] for f, g in F.mor.items()},
    )


def _same(c1, c2):
    return c1 is c2 or c1 == c2


def cat_pullback(F: Functor, G: Functor):
    """Pullback in Cat of a cospan of functors.

    Returns ``(D, P_A, P_B)``.  Objects and morphisms of ``D`` are named
    ``⟨x,y⟩`` and listed with the left component varying slowest, each in
    its category's declaration order.
    """
    if not _same(F.cod, G.cod):
        raise CospanMismatch("functors do not share a codomain")
    A, B = F.dom, G.dom
    b_over = {}
    for y in B.objects:
        b_over.setdefault(G.obj[y], []).append(y)
    bm_over = {}
    for g in B.morphisms:
        bm_over.setdefault(G.mor[g], []).append(g)
    objects, pa_obj, pb_obj = [], {}, {}
    for x in A.objects:
        for y in b_over.get(F.obj[x], ()):
            d = pair_id(x, y)
            objects.append(d)
            pa_obj[d], pb_obj[d] = x, y
    morphisms, pa_mor, pb_mor, index = {}, {}, {}, {}
    for f in A.morphisms:
        for g in bm_over.get(F.mor[f], ()):
            d = pair_id(f, g)
            morphisms[d] = (
                pair_id(A.src(f), B.src(g)),
                pair_id(A.tgt(f), B.tgt(g)),
            )
            pa_mor[d], pb_mor[d] = f, g
            index[f, g] = d
    identity = {pair_id(x, y): index[A.id(x), B.id(y)] for x, y in zip(pa_obj.values(), pb_obj.values())}
    compose = {}
    for d2 in morphisms:
        f2, g2 = pa_mor[d2], pb_mor[d2]
        for d1 in _pair_into(morphisms, d2):
            f1, g1 = pa_mor[d1], pb_mor[d1]
            compose[d2, d1] = index[A.comp(f2, f1), B.comp(g2, g1)]
    D = category(objects, morphisms, identity, compose)
    return D, Functor(D, A, pa_obj, pa_mor), Functor(D, B, pb_obj, pb_mor)


def _pair_into(morphisms, d2):
    src = morphisms[d2][0]
    return [d for d, (_, t) in morphisms.items() if t == src]


def pairing(PA: Functor, PB: Functor, S: Functor, T: Functor) -> Functor:
    """The functor ⟨S,T⟩ into the apex of the pullback span ``(PA, PB)``."""
    if not _same(S.dom, T.dom):
        raise CospanMismatch("S and T must share a domain")
    if not (_same(S.cod, PA.cod) and _same(T.cod, PB.cod)):
        raise CospanMismatch("S and T must land in the feet of the pullback span")
    D = PA.dom
    obj_index = {(PA.obj[d], PB.obj[d]): d for d in D.objects}
    mor_index = {(PA.mor[d], PB.mor[d]): d for d in D.morphisms}
    if len(obj_index) != len(D.objects) or len(mor_index) != len(D.morphisms):
        raise ValueError("projections are not jointly injective; not a pullback span")
    try:
        obj = {x: obj_index[S.obj[x], T.obj[x]] for x in S.dom.objects}
        mor = {f: mor_index[S.mor[f], T.mor[f]] for f in S.dom.morphisms}
    except KeyError as exc:
        raise NotCommuting(f"square does not commute at {exc.args[0]}") from None
    return Functor(S.dom, D, obj, mor)


def enumerate_functors(
    dom: FinCat,
    cod: FinCat,
    obj_choices=None,
    mor_choices=None,
    injective=False,
    max_steps=None,
) -> Iterator[Functor]:
    """Yield every functor ``dom -> cod`` in a deterministic order.

    ``obj_choices(x)`` / ``mor_choices(f, candidates)`` may narrow the
    search.  With ``injective=True`` only functors injective on objects and
    morphisms are produced.  ``max_steps`` bounds the number of partial
    assignments visited; exceeding it raises :class:`BudgetExceeded`.
    """
    steps = 0
    objs = list(dom.objects)
    cand_obj = [list(obj_choices(x)) if obj_choices else list(cod.objects) for x in objs]
    mors = list(dom.non_identities)
    # composites checked once all three morphisms are assigned
    checks = {f: [] for f in mors}
    position = {f: i for i, f in enumerate(mors)}
    for (g, f), h in dom.compose.items():
        if dom.is_identity(g) or dom.is_identity(f):
            continue
        last = max(position[g], position[f], position.get(h, -1))
        checks[mors[last]].append((g, f, h))

    for images in itertools.product(*cand_obj):
        steps += 1
        if max_steps is not None and steps > max_steps:
            raise BudgetExceeded(f"functor search exceeded {max_steps} steps")
        if injective and len(set(images)) != len(images):
            continue
        obj = dict(zip(objs, images))
        mor = {dom.identity[x]: cod.identity[obj[x]] for x in objs}
        used = set(mor.values())

        def search(k):
            nonlocal steps
            steps += 1
            if max_steps is not None and steps > max_steps:
                raise BudgetExceeded(f"functor search exceeded {max_steps} steps")
            if k == len(mors):
                yield Functor(dom, cod, dict(obj), dict(mor))
                return
            f = mors[k]
            s, t = dom.morphisms[f]
            cands = cod.hom(obj[s], obj[t])
            if mor_choices is not None:
                cands = mor_choices(f, cands)
            for c in cands:
                if injective and c in used:
                    continue
                mor[f] = c
                ok = all(
                    cod.compose[mor[g], mor[ff]] == mor[h]
                    for g, ff, h in checks[f]
                )
                if ok:
                    used.add(c)
                    yield from search(k + 1)
                    used.discard(c)
                del mor[f]

        yield from search(0)


def free_product_words(A: FinCat, B: FinCat):
    """Free product ``A □ B`` together with the letters of each morphism.

    Returns ``(cat, words)`` where ``words[m]`` is the tuple of letters of
    ``m`` in order of application.  A letter is ``("A", a, y)`` for
    ``(a, y)`` or ``("B", x, b)`` for ``(x, b)``.
    """
    if not (is_acyclic(A) and is_acyclic(B)):
        raise NotAcyclic("free product is only finite for acyclic categories")

    def obj(x, y):
        return f"({x},{y})"

    def letter_name(letter):
        side, p, q = letter
        return f"({p},{q})"

    def name(word, start):
        if not word:
            return f"id_{obj(*start)}"
        return "∘".join(letter_name(l) for l in reversed(word))

    def step(letter, at):
        side, p, q = letter
        return (A.tgt(p), at[1]) if side == "A" else (at[0], B.tgt(q))

    def letters_from(at, last_side):
        x, y = at
        out = []
        if last_side != "A":
            out += [("A", a, y) for a in A.out(x) if not A.is_identity(a)]
        if last_side != "B":
            out += [("B", x, b) for b in B.out(y) if not B.is_identity(b)]
        return out

    objects = [(x, y) for x in A.objects for y in B.objects]
    words = {}  # name -> (word, source pair, target pair)
    for start in objects:
        words[name((), start)] = ((), start, start)
    for start in objects:
        frontier = [((), start, None)]
        while frontier:
            nxt = []
            for word, at, last in frontier:
                for letter in letters_from(at, last):
                    w = word + (letter,)
                    end = step(letter, at)
                    words[name(w, start)] = (w, start, end)
                    nxt.append((w, end, letter[0]))
            frontier = nxt
    n_words = len(objects) + sum(
        1 for n, (w, _, _) in words.items() if w
    )
    if len(words) != n_words:
        raise ValueError("word identifiers collide; rename objects or morphisms")

    def fuse(w1, w2):
        if w1 and w2 and w1[-1][0] == w2[0][0]:
            l1, l2 = w1[-1], w2[0]
            if l1[0] == "A":
                merged = ("A", A.comp(l2[1], l1[1]), l1[2])
            else:
                merged = ("B", l1[1], B.comp(l2[2], l1[2]))
            return w1[:-1] + (merged,) + w2[1:]
        return w1 + w2

    by_word = {(w, s): n for n, (w, s, _) in words.items()}
    by_src = {}
    for n, (w, s, t) in words.items():
        by_src.setdefault(s, []).append(n)
    compose = {}
    for f, (w1, s1, t1) in words.items():
        for g in by_src[t1]:
            w2 = words[g][0]
            compose[g, f] = by_word[fuse(w1, w2), s1]
    # order: identities, then by word length
    order = sorted(words, key=lambda n: (len(words[n][0]) > 0, len(words[n][0])))
    morphisms = {n: (obj(*words[n][1]), obj(*words[n][2])) for n in order}
    identity = {obj(*s): name((), s) for s in objects}
    cat = category([obj(*s) for s in objects], morphisms, identity, compose)
    return cat, {n: words[n][0] for n in order}


def free_product(A: FinCat, B: FinCat) -> FinCat:
    """Free (funny tensor) product of two acyclic categories."""
    return free_product_words(A, B)[0]
