"""Lens spans, cospans and squares; compatibility and proxy pullbacks.

Squares are oriented as::

    D --right--> B
    |            |
   left          G (cospan.right)
    v            v
    A ----F----> C
       (cospan.left)

so ``span.left`` is the leg over ``A`` and ``span.right`` the leg over ``B``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .errors import CospanMismatch
from .fincat import cat_pullback, compose_functors, enumerate_functors
from .lens import Cofunctor, Lens, compose_lens, dopf_to_lens

__all__ = [
    "LensSpan",
    "LensCospan",
    "LensSquare",
    "is_commuting_square",
    "commuting_violations",
    "is_compatible_square",
    "compatibility_violations",
    "proxy_pullback",
    "span_isomorphisms",
    "span_isomorphic",
]


def _same(c1, c2):
    return c1 is c2 or c1 == c2


@dataclass(frozen=True)
class LensSpan:
    left: Lens
    right: Lens

    def __post_init__(self):
        if not _same(self.left.dom, self.right.dom):
            raise CospanMismatch("span legs must share their domain")

    @property
    def apex(self):
        return self.left.dom

    def precompose(self, H: Lens) -> "LensSpan":
        return LensSpan(compose_lens(H, self.left), compose_lens(H, self.right))


@dataclass(frozen=True)
class LensCospan:
    left: Lens
    right: Lens

    def __post_init__(self):
        if not _same(self.left.cod, self.right.cod):
            raise CospanMismatch("cospan legs must share their codomain")

    @property
    def apex(self):
        return self.left.cod


@dataclass(frozen=True)
class LensSquare:
    span: LensSpan
    cospan: LensCospan

    def __post_init__(self):
        if not (_same(self.span.left.cod, self.cospan.left.dom)
                and _same(self.span.right.cod, self.cospan.right.dom)):
            raise CospanMismatch("span feet do not match the cospan")

    def transposed(self) -> "LensSquare":
        """The same square with the roles of ``A`` and ``B`` exchanged."""
        return LensSquare(
            LensSpan(self.span.right, self.span.left),
            LensCospan(self.cospan.right, self.cospan.left),
        )


def commuting_violations(sq: LensSquare) -> list:
    """Where ``F ∘ left`` and ``G ∘ right`` differ.

    Entries are ``("object", D)``, ``("get", d)`` or ``("put", D, c)``.
    """
    lhs = compose_lens(sq.span.left, sq.cospan.left)
    rhs = compose_lens(sq.span.right, sq.cospan.right)
    D = sq.span.apex
    bad = [("object", x) for x in D.objects if lhs.obj[x] != rhs.obj[x]]
    if bad:
        return bad
    bad += [("get", d) for d in D.morphisms if lhs.get.mor[d] != rhs.get.mor[d]]
    bad += [("put", x, c) for (x, c), d in lhs.put.lift.items() if rhs.put.lift.get((x, c)) != d]
    return bad


def is_commuting_square(sq: LensSquare) -> bool:
    """Whether ``F ∘ left == G ∘ right`` as lenses (gets and puts)."""
    return not commuting_violations(sq)


def compatibility_violations(sq: LensSquare) -> list:
    """``(side, D, x)`` for every failure of the two compatibility equations."""
    Gbar, Fbar = sq.span.left, sq.span.right
    F, G = sq.cospan.left, sq.cospan.right
    A, B = F.dom, G.dom
    bad = []
    for d in Gbar.dom.objects:
        a_obj, b_obj = Gbar.obj[d], Fbar.obj[d]
        for a in A.out(a_obj):
            if Fbar.get.mor[Gbar.put.lift[d, a]] != G.put.lift[b_obj, F.get.mor[a]]:
                bad.append(("left", d, a))
        for b in B.out(b_obj):
            if Gbar.get.mor[Fbar.put.lift[d, b]] != F.put.lift[a_obj, G.get.mor[b]]:
                bad.append(("right", d, b))
    return bad


def is_compatible_square(sq: LensSquare) -> bool:
    return is_commuting_square(sq) and not compatibility_violations(sq)


def proxy_pullback(cospan: LensCospan) -> LensSquare:
    """The proxy pullback above the canonical Cat pullback of the gets."""
    F, G = cospan.left, cospan.right
    D, PA, PB = cat_pullback(F.get, G.get)
    index = {(PA.mor[d], PB.mor[d]): d for d in D.morphisms}
    left_lift, right_lift = {}, {}
    A, B = F.dom, G.dom
    for d in D.objects:
        x, y = PA.obj[d], PB.obj[d]
        for a in A.out(x):
            left_lift[d, a] = index[a, G.put.lift[y, F.get.mor[a]]]
        for b in B.out(y):
            right_lift[d, b] = index[F.put.lift[x, G.get.mor[b]], b]
    Gbar = Lens(PA, Cofunctor(D, A, PA.obj, left_lift))
    Fbar = Lens(PB, Cofunctor(D, B, PB.obj, right_lift))
    return LensSquare(LensSpan(Gbar, Fbar), cospan)


def span_isomorphisms(s1: LensSpan, s2: LensSpan) -> Iterator[tuple]:
    """Yield every span isomorphism ``(H, H_inverse)`` from ``s1`` to ``s2``.

    ``H`` is an invertible lens between the apexes with
    ``s2.left ∘ H == s1.left`` and ``s2.right ∘ H == s1.right``.
    """
    if not (_same(s1.left.cod, s2.left.cod) and _same(s1.right.cod, s2.right.cod)):
        raise CospanMismatch("spans must have the same feet")
    X, Y = s1.apex, s2.apex
    if len(X.objects) != len(Y.objects) or len(X.morphisms) != len(Y.morphisms):
        return
    l1, r1, l2, r2 = s1.left, s1.right, s2.left, s2.right

    def obj_choices(x):
        return [y for y in Y.objects if l2.obj[y] == l1.obj[x] and r2.obj[y] == r1.obj[x]]

    def mor_choices(f, cands):
        return [g for g in cands if l2.get.mor[g] == l1.get.mor[f] and r2.get.mor[g] == r1.get.mor[f]]

    for H in enumerate_functors(X, Y, obj_choices, mor_choices, injective=True):
        lens_h = dopf_to_lens(H)
        if compose_lens(lens_h, l2) != l1 or compose_lens(lens_h, r2) != r1:
            continue
        inv = type(H)(
            Y, X, {v: k for k, v in H.obj.items()}, {v: k for k, v in H.mor.items()}
        )
        yield lens_h, dopf_to_lens(inv)


def span_isomorphic(s1: LensSpan, s2: LensSpan):
    """The first span isomorphism from ``s1`` to ``s2``, or None."""
    return next(span_isomorphisms(s1, s2), None)


def _get_square_commutes(span: LensSpan, cospan: LensCospan) -> bool:
    left = compose_functors(span.left.get, cospan.left.get)
    right = compose_functors(span.right.get, cospan.right.get)
    return left.mor == right.mor and left.obj == right.obj
