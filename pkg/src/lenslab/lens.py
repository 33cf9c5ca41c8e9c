"""Cofunctors, delta lenses, and the opfibration hierarchy."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import (
    CospanMismatch,
    NotDiscreteOpfibration,
    ValidationError,
    Violation,
)
from .fincat import (
    FinCat,
    Functor,
    compose_functors,
    free_product_words,
    identity_functor,
    terminal,
    validate_functor,
)

__all__ = [
    "Cofunctor",
    "Lens",
    "lens",
    "validate_cofunctor",
    "validate_lens",
    "identity_lens",
    "compose_lens",
    "terminal_lens",
    "is_discrete_opfibration",
    "dopf_witnesses",
    "is_discrete_opfibration_lens",
    "dopf_to_lens",
    "is_opcartesian",
    "is_weakly_opcartesian",
    "is_split_opfibration",
    "split_opfibration_witnesses",
    "free_product_projections",
]


@dataclass(frozen=True)
class Cofunctor:
    """Object function plus lifting functions.

    ``lift[A, b]`` is the lift at ``A`` of ``b``, a morphism of ``cod`` out
    of ``obj[A]``; it is a morphism of ``dom`` out of ``A``.
    """

    dom: FinCat = field(repr=False)
    cod: FinCat = field(repr=False)
    obj: Mapping[str, str]
    lift: Mapping[tuple, str]


@dataclass(frozen=True)
class Lens:
    get: Functor
    put: Cofunctor

    @property
    def dom(self):
        return self.get.dom

    @property
    def cod(self):
        return self.get.cod

    @property
    def obj(self):
        return self.get.obj

    def __call__(self, f):
        return self.get.mor[f]

    def lift_at(self, x, b):
        return self.put.lift[x, b]


def lens(dom, cod, obj, mor, lift) -> Lens:
    """Build a lens from tables and raise unless it satisfies every law."""
    obj = dict(obj)
    L = Lens(Functor(dom, cod, obj, dict(mor)), Cofunctor(dom, cod, obj, dict(lift)))
    report = validate_lens(L)
    if report:
        raise ValidationError("lens", report)
    return L


def validate_cofunctor(P: Cofunctor) -> list:
    report = []
    A, B = P.dom, P.cod
    for x in A.objects:
        if x not in P.obj:
            report.append(Violation("dangling", (x,), "object has no image"))
        elif P.obj[x] not in B.identity:
            report.append(Violation("dangling", (x, P.obj[x]), "image is not an object"))
    for (x, b), a in P.lift.items():
        if x not in A.identity or b not in B.morphisms or a not in A.morphisms:
            report.append(Violation("dangling", (x, b, a), "lift refers to unknown ids"))
    if report:
        return report
    for (x, b), a in P.lift.items():
        if B.src(b) != P.obj[x]:
            report.append(Violation("lift-domain", (x, b), "b is not out of the image of x"))
        if A.src(a) != x:
            report.append(Violation("lift-source", (x, b, a), "lift is not out of x"))
    for x in A.objects:
        for b in B.out(P.obj[x]):
            if (x, b) not in P.lift:
                report.append(Violation("lift-total", (x, b), "missing lift"))
    if report:
        return report
    lift = P.lift
    for x in A.objects:
        y = P.obj[x]
        for b in B.out(y):
            a = lift[x, b]
            if P.obj[A.tgt(a)] != B.tgt(b):
                report.append(Violation("PutTgt", (x, b)))
        if lift[x, B.id(y)] != A.id(x):
            report.append(Violation("PutId", (x,)))
    if any(v.law == "PutTgt" for v in report):
        return report
    for x in A.objects:
        for b in B.out(P.obj[x]):
            a = lift[x, b]
            x2 = A.tgt(a)
            for b2 in B.out(B.tgt(b)):
                lhs = lift[x, B.comp(b2, b)]
                rhs = A.comp(lift[x2, b2], a)
                if lhs != rhs:
                    report.append(Violation("PutPut", (x, b, b2)))
    return report


def validate_lens(L: Lens) -> list:
    report = []
    if not (L.get.dom is L.put.dom or L.get.dom == L.put.dom) or not (
        L.get.cod is L.put.cod or L.get.cod == L.put.cod
    ):
        report.append(Violation("boundary", (), "get and put disagree on dom/cod"))
        return report
    if dict(L.get.obj) != dict(L.put.obj):
        diff = [x for x in L.dom.objects if L.get.obj.get(x) != L.put.obj.get(x)]
        report.append(Violation("object-function", tuple(diff)))
    report += validate_functor(L.get)
    report += validate_cofunctor(L.put)
    if report:
        return report
    for (x, b), a in L.put.lift.items():
        if L.get.mor[a] != b:
            report.append(Violation("PutGet", (x, b)))
    return report


def identity_lens(cat: FinCat) -> Lens:
    F = identity_functor(cat)
    lift = {(x, f): f for x in cat.objects for f in cat.out(x)}
    return Lens(F, Cofunctor(cat, cat, F.obj, lift))


def compose_lens(F: Lens, G: Lens) -> Lens:
    """``G ∘ F`` for lenses ``F: A -> B`` and ``G: B -> C``."""
    if not (F.cod is G.dom or F.cod == G.dom):
        raise CospanMismatch("lens boundaries do not match")
    get = compose_functors(F.get, G.get)
    A, C = F.dom, G.cod
    lift = {}
    flift, glift = F.put.lift, G.put.lift
    for x in A.objects:
        y = F.obj[x]
        for c in C.out(G.obj[y]):
            lift[x, c] = flift[x, glift[y, c]]
    return Lens(get, Cofunctor(A, C, get.obj, lift))


def terminal_lens(cat: FinCat, one: FinCat | None = None) -> Lens:
    """The unique lens into the terminal category."""
    one = one or terminal()
    (star,) = one.objects
    ident = one.id(star)
    get = Functor(cat, one, {x: star for x in cat.objects}, {f: ident for f in cat.morphisms})
    lift = {(x, ident): cat.id(x) for x in cat.objects}
    return Lens(get, Cofunctor(cat, one, get.obj, lift))


def _preimages(F: Functor):
    pre = {}
    for a in F.dom.morphisms:
        pre.setdefault((F.dom.src(a), F.mor[a]), []).append(a)
    return pre


def dopf_witnesses(F: Functor) -> list:
    """``(x, b, n)`` wherever ``b`` out of ``F x`` has ``n != 1`` lifts at ``x``."""
    pre = _preimages(F)
    return [
        (x, b, len(pre.get((x, b), ())))
        for x in F.dom.objects
        for b in F.cod.out(F.obj[x])
        if len(pre.get((x, b), ())) != 1
    ]


def is_discrete_opfibration(F: Functor) -> bool:
    return not dopf_witnesses(F)


def is_discrete_opfibration_lens(L: Lens) -> bool:
    """GetPut: every morphism is the chosen lift of its own image."""
    A, lift = L.dom, L.put.lift
    return all(lift[x, L.get.mor[a]] == a for x in A.objects for a in A.out(x))


def dopf_to_lens(F: Functor) -> Lens:
    if not is_discrete_opfibration(F):
        raise NotDiscreteOpfibration("functor has a morphism with zero or several lifts")
    pre = _preimages(F)
    lift = {(x, b): pre[x, b][0] for x in F.dom.objects for b in F.cod.out(F.obj[x])}
    return Lens(F, Cofunctor(F.dom, F.cod, F.obj, lift))


def _factorisations(F: Functor, f, weak):
    """Yield (f', v, count of u) over the opcartesian test data for ``f``."""
    A, B = F.dom, F.cod
    x, y = A.morphisms[f]
    Ff = F.mor[f]
    Fy = F.obj[y]
    for f2 in A.out(x):
        y2 = A.tgt(f2)
        Ff2 = F.mor[f2]
        if weak:
            vs = [B.id(Fy)] if F.obj[y2] == Fy else []
        else:
            vs = B.hom(Fy, F.obj[y2])
        for v in vs:
            if B.comp(v, Ff) != Ff2:
                continue
            n = sum(1 for u in A.hom(y, y2) if A.comp(u, f) == f2 and F.mor[u] == v)
            yield f2, v, n


def is_opcartesian(F: Functor, f) -> bool:
    return all(n == 1 for _, _, n in _factorisations(F, f, weak=False))


def is_weakly_opcartesian(F: Functor, f) -> bool:
    return all(n == 1 for _, _, n in _factorisations(F, f, weak=True))


def split_opfibration_witnesses(L: Lens, method="by-definition") -> list:
    """Failures of the split-opfibration condition.

    By definition these are the ``(x, b)`` whose chosen lift is not
    opcartesian.  By characterisation they are the morphisms ``a`` that do
    not factor uniquely as ``u ∘ lift(x, L a)`` with ``u`` over an identity.
    """
    A, B = L.dom, L.cod
    lift = L.put.lift
    if method == "by-definition":
        return [
            (x, b)
            for x in A.objects
            for b in B.out(L.obj[x])
            if not is_opcartesian(L.get, lift[x, b])
        ]
    if method != "by-characterisation":
        raise ValueError(f"unknown method {method!r}")
    bad = []
    for x in A.objects:
        for a in A.out(x):
            x2 = A.tgt(a)
            chosen = lift[x, L.get.mor[a]]
            ident = B.id(L.obj[x2])
            n = sum(
                1
                for u in A.hom(A.tgt(chosen), x2)
                if A.comp(u, chosen) == a and L.get.mor[u] == ident
            )
            if n != 1:
                bad.append((a,))
    return bad


def is_split_opfibration(L: Lens, method="by-definition") -> bool:
    """Whether every chosen lift is opcartesian for the get functor.

    ``method="by-characterisation"`` instead checks that each morphism
    ``a: x -> x'`` factors uniquely as ``u ∘ lift(x, L a)`` with ``u`` over
    an identity.
    """
    return not split_opfibration_witnesses(L, method)


def free_product_projections(A: FinCat, B: FinCat):
    """The projection lenses ``P1: A □ B -> A`` and ``P2: A □ B -> B``.

    Returns a :class:`~lenslab.squares.LensSpan`.
    """
    from .squares import LensSpan

    cat, words = free_product_words(A, B)
    pair_of = {}
    for x in A.objects:
        for y in B.objects:
            pair_of[f"({x},{y})"] = (x, y)
    by_word = {}
    for m, w in words.items():
        by_word[w, pair_of[cat.src(m)]] = m

    def project(side, m):
        x, y = pair_of[cat.src(m)]
        acc = A.id(x) if side == "A" else B.id(y)
        for letter in words[m]:
            if letter[0] != side:
                continue
            acc = A.comp(letter[1], acc) if side == "A" else B.comp(letter[2], acc)
        return acc

    p1_obj = {d: pair_of[d][0] for d in cat.objects}
    p2_obj = {d: pair_of[d][1] for d in cat.objects}
    p1_mor = {m: project("A", m) for m in cat.morphisms}
    p2_mor = {m: project("B", m) for m in cat.morphisms}
    lift1, lift2 = {}, {}
    for d in cat.objects:
        x, y = pair_of[d]
        for a in A.out(x):
            w = () if A.is_identity(a) else (("A", a, y),)
            lift1[d, a] = by_word[w, (x, y)]
        for b in B.out(y):
            w = () if B.is_identity(b) else (("B", x, b),)
            lift2[d, b] = by_word[w, (x, y)]
    P1 = Lens(Functor(cat, A, p1_obj, p1_mor), Cofunctor(cat, A, p1_obj, lift1))
    P2 = Lens(Functor(cat, B, p2_obj, p2_mor), Cofunctor(cat, B, p2_obj, lift2))
    return LensSpan(P1, P2)
