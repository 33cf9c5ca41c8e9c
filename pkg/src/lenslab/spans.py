"""Sync-minimal cores, independence, and comparison lenses into proxy pullbacks."""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass
from math import prod
from typing import Iterator, NamedTuple, Optional

from .errors import BudgetExceeded, LensLabError, NotCommuting, PreconditionError
from .fincat import FinCat, Functor, category, pairing
from .lens import Cofunctor, Lens, compose_lens, is_split_opfibration, validate_lens
from .squares import LensSpan, LensSquare, _get_square_commutes, is_compatible_square

__all__ = [
    "SyncCore",
    "sync_minimal_core",
    "is_sync_minimal",
    "is_independent",
    "independence_witnesses",
    "is_split_independent",
    "split_independence_witnesses",
    "Factorisation",
    "split_opfib_factorisation",
    "comparison_functor",
    "ComparisonResult",
    "comparison_lens",
    "enumerate_lens_structures",
    "iter_lens_structures",
    "Verdict",
    "verify_universal_property",
    "DEFAULT_BUDGET",
]

DEFAULT_BUDGET = 10**6


def _budget(budget):
    if budget is not None:
        return budget
    env = os.environ.get("LENSLAB_BUDGET")
    if not env:
        return DEFAULT_BUDGET
    try:
        value = int(env)
    except ValueError:
        value = -1
    if value < 1:
        raise LensLabError(f"LENSLAB_BUDGET must be a positive integer, got {env!r}")
    return value


def chosen_lifts(span: LensSpan) -> set:
    """Apex morphisms that are the chosen lift of their image along a leg."""
    D = span.apex
    lifts = set()
    for leg in (span.left, span.right):
        for d, (s, _) in D.morphisms.items():
            if leg.put.lift[s, leg.get.mor[d]] == d:
                lifts.add(d)
    return lifts


@dataclass(frozen=True)
class SyncCore:
    core: LensSpan
    inclusion: Functor
    removed: tuple

    @property
    def is_whole(self):
        return not self.removed


def sync_minimal_core(span: LensSpan) -> SyncCore:
    """Wide subcategory generated by the chosen lifts of both legs."""
    D = span.apex
    keep = set(D.identity.values()) | chosen_lifts(span)
    by_src, by_tgt = {}, {}
    for f in keep:
        s, t = D.morphisms[f]
        by_src.setdefault(s, set()).add(f)
        by_tgt.setdefault(t, set()).add(f)
    work = deque(sorted(keep, key=D.morphism_index.get))
    while work:
        f = work.popleft()
        s, t = D.morphisms[f]
        new = [D.compose[g, f] for g in tuple(by_src.get(t, ()))]
        new += [D.compose[f, h] for h in tuple(by_tgt.get(s, ()))]
        for h in new:
            if h not in keep:
                keep.add(h)
                hs, ht = D.morphisms[h]
                by_src.setdefault(hs, set()).add(h)
                by_tgt.setdefault(ht, set()).add(h)
                work.append(h)
    kept = [f for f in D.morphisms if f in keep]
    removed = tuple(f for f in D.morphisms if f not in keep)
    if not removed:
        return SyncCore(span, _inclusion(D, D), ())
    core = category(
        D.objects,
        {f: D.morphisms[f] for f in kept},
        D.identity,
        {(g, f): h for (g, f), h in D.compose.items() if g in keep and f in keep},
    )

    def restrict(leg):
        get = Functor(core, leg.cod, leg.obj, {f: leg.get.mor[f] for f in kept})
        return Lens(get, Cofunctor(core, leg.cod, leg.obj, leg.put.lift))

    return SyncCore(LensSpan(restrict(span.left), restrict(span.right)), _inclusion(core, D), removed)


def _inclusion(core: FinCat, D: FinCat) -> Functor:
    return Functor(core, D, {x: x for x in core.objects}, {f: f for f in core.morphisms})


def is_sync_minimal(span: LensSpan) -> bool:
    return sync_minimal_core(span).is_whole


def independence_witnesses(span: LensSpan) -> list:
    """Pairs of distinct core morphisms with equal source and equal images."""
    core = sync_minimal_core(span).core
    D = core.apex
    seen, bad = {}, []
    for d, (s, _) in D.morphisms.items():
        key = (s, core.left.get.mor[d], core.right.get.mor[d])
        if key in seen:
            bad.append((seen[key], d))
        else:
            seen[key] = d
    return bad


def is_independent(span: LensSpan) -> bool:
    return not independence_witnesses(span)


def split_independence_witnesses(sq: LensSquare) -> list:
    """Configurations ``(D1, a1, b, a2)`` violating split independence.

    Split independence is taken relative to ``sq.span.right``; transpose
    the square for the other leg.
    """
    Gbar, Fbar = sq.span.left, sq.span.right
    D, A, B = Gbar.dom, Gbar.cod, Fbar.cod
    glift, flift = Gbar.put.lift, Fbar.put.lift
    bad = []
    for d1 in D.objects:
        b_id = B.id(Fbar.obj[d1])
        vertical = [a for a in A.out(Gbar.obj[d1]) if Fbar.get.mor[glift[d1, a]] == b_id]
        for b in B.out(Fbar.obj[d1]):
            top = flift[d1, b]
            d2 = D.tgt(top)
            a_top = Gbar.get.mor[top]
            b2_id = B.id(Fbar.obj[d2])
            for a1 in vertical:
                left = glift[d1, a1]
                d1p = D.tgt(left)
                bottom = flift[d1p, b]
                a_bottom = Gbar.get.mor[bottom]
                for a2 in A.out(Gbar.obj[d2]):
                    right = glift[d2, a2]
                    if Fbar.get.mor[right] != b2_id:
                        continue
                    if A.tgt(a2) != A.tgt(a_bottom):
                        continue
                    if A.comp(a2, a_top) != A.comp(a_bottom, a1):
                        continue
                    if D.tgt(right) != D.tgt(bottom) or D.comp(right, top) != D.comp(bottom, left):
                        bad.append((d1, a1, b, a2))
    return bad


def is_split_independent(sq: LensSquare) -> bool:
    return not split_independence_witnesses(sq)


class Factorisation(NamedTuple):
    first: str   # lift along the right leg of the image of d
    second: str  # lift along the left leg of u
    u: str


def split_opfib_factorisation(sq: LensSquare, d, check=True) -> Factorisation:
    """Factor a core morphism ``d`` as ``second ∘ first``.

    Requires ``sq.cospan.left`` to be a split opfibration and the span to
    be split independent; ``u`` is the comparison morphism out of the
    opcartesian lift, lying over an identity.
    """
    Gbar, Fbar = sq.span.left, sq.span.right
    F, G = sq.cospan.left, sq.cospan.right
    D, A = Gbar.dom, F.dom
    if check:
        failed = []
        if not is_compatible_square(sq):
            failed.append("square is not compatible")
        if not is_split_opfibration(F, "by-characterisation"):
            failed.append("cospan leg is not a split opfibration")
        if not is_split_independent(sq):
            failed.append("span is not split independent")
        core = sync_minimal_core(sq.span)
        if d not in core.core.apex.morphisms:
            failed.append("morphism is not in the sync-minimal core")
        if failed:
            raise PreconditionError(failed)
    d1 = D.src(d)
    first = Fbar.put.lift[d1, Fbar.get.mor[d]]
    d2p = D.tgt(first)
    opcart = F.put.lift[Gbar.obj[d1], G.get.mor[Fbar.get.mor[d]]]
    target = Gbar.get.mor[d]
    ident = F.cod.id(F.obj[A.tgt(target)])
    us = [
        u
        for u in A.hom(Gbar.obj[d2p], A.tgt(target))
        if A.comp(u, opcart) == target and F.get.mor[u] == ident
    ]
    if len(us) != 1:
        raise PreconditionError(["opcartesian factorisation is not unique"], f"{len(us)} candidates")
    u = us[0]
    return Factorisation(first, Gbar.put.lift[d2p, u], u)


def comparison_functor(candidate: LensSpan, sq: LensSquare) -> Functor:
    """The functor ⟨K,J⟩ into the apex of a proxy-pullback square."""
    if not _get_square_commutes(candidate, sq.cospan):
        raise NotCommuting("candidate's get square over the cospan does not commute")
    return pairing(sq.span.left.get, sq.span.right.get, candidate.left.get, candidate.right.get)


@dataclass(frozen=True)
class ComparisonResult:
    lens: Optional[Lens]
    uniqueness_witness: Optional[int] = None


def _triangles_commute(L: Lens, candidate: LensSpan, sq: LensSquare) -> bool:
    return (compose_lens(L, sq.span.left) == candidate.left
            and compose_lens(L, sq.span.right) == candidate.right)


def comparison_lens(candidate: LensSpan, sq: LensSquare, exhaustive=False, budget=None) -> ComparisonResult:
    """The unique lens from the candidate's apex into the proxy-pullback apex.

    Lifts are assembled from a shortest decomposition of each target
    morphism into chosen lifts of the square's span.
    """
    failed = []
    if not is_independent(candidate):
        failed.append("candidate is not independent")
    if not is_compatible_square(LensSquare(candidate, sq.cospan)):
        failed.append("candidate is not compatible with the cospan")
    if not is_sync_minimal(sq.span):
        failed.append("proxy-pullback span is not sync minimal")
    if failed:
        raise PreconditionError(failed)
    L = comparison_functor(candidate, sq)
    E, D = L.dom, L.cod
    Gbar, Fbar = sq.span.left, sq.span.right
    K, J = candidate.left, candidate.right
    lift = {}
    for e in E.objects:
        start = L.obj[e]
        found = {D.id(start): E.id(e)}
        queue = deque([D.id(start)])
        while queue:
            dcur = queue.popleft()
            ecur = found[dcur]
            dk, ek = D.tgt(dcur), E.tgt(ecur)
            steps = [(Gbar.put.lift[dk, a], 0, K.put.lift[ek, a]) for a in Gbar.cod.out(Gbar.obj[dk])]
            steps += [(Fbar.put.lift[dk, b], 1, J.put.lift[ek, b]) for b in Fbar.cod.out(Fbar.obj[dk])]
            steps.sort(key=lambda s: (s[0], s[1]))
            for dstep, _, estep in steps:
                dnext = D.comp(dstep, dcur)
                if dnext not in found:
                    found[dnext] = E.comp(estep, ecur)
                    queue.append(dnext)
        for d in D.out(start):
            # unreachable only if sync minimality failed, which was checked
            assert d in found, f"no decomposition of {d} into chosen lifts"
            lift[e, d] = found[d]
    result = Lens(L, Cofunctor(E, D, L.obj, lift))
    report = validate_lens(result)
    if report:
        raise AssertionError(f"comparison lens failed validation: {report[:3]}")
    if not _triangles_commute(result, candidate, sq):
        raise AssertionError("comparison lens triangles do not commute")
    witness = None
    if exhaustive:
        witness = sum(
            1 for M in iter_lens_structures(L, budget, _triangle_constraints(L, candidate, sq))
            if _triangles_commute(M, candidate, sq)
        )
    return ComparisonResult(result, witness)


def _lift_choices(F: Functor, fixed=None):
    A, B = F.dom, F.cod
    pre = {}
    for a in A.morphisms:
        pre.setdefault((A.src(a), F.mor[a]), []).append(a)
    keys, choices = [], []
    for x in A.objects:
        for b in B.out(F.obj[x]):
            keys.append((x, b))
            if B.is_identity(b):
                opts = [A.id(x)]
            else:
                opts = list(pre.get((x, b), ()))
            if fixed and (x, b) in fixed:
                opts = [a for a in opts if a in fixed[x, b]]
            choices.append(opts)
    return keys, choices


def iter_lens_structures(F: Functor, budget=None, fixed=None, rng=None) -> Iterator[Lens]:
    """Yield every lens with get functor ``F``.

    ``fixed`` maps a key ``(x, b)`` to the set of permitted lifts.  With
    ``rng`` (a numpy Generator) choices are tried in random order, which
    turns the search into a sampler of valid structures.
    """
    A, B = F.dom, F.cod
    keys, choices = _lift_choices(F, fixed)
    total = prod(len(c) for c in choices)
    if total > _budget(budget):
        raise BudgetExceeded(f"{total} lift assignments exceed the budget of {_budget(budget)}")
    if total == 0:
        return
    # factorisations c = b2 ∘ b in B, by composite c
    factors = {}
    for (b2, b), c in B.compose.items():
        factors.setdefault(c, []).append((b, b2))
    assigned = {}
    into = {}  # x' -> assigned keys (x, b) whose lift ends at x'

    def consistent(key):
        x, c = key
        a = assigned[key]
        for b, b2 in factors.get(c, ()):
            ab = assigned.get((x, b))
            if ab is None:
                continue
            ab2 = assigned.get((A.tgt(ab), b2))
            if ab2 is not None and A.comp(ab2, ab) != a:
                return False
        x2 = A.tgt(a)
        for b2 in B.out(B.tgt(c)):
            ab2 = assigned.get((x2, b2))
            if ab2 is None:
                continue
            whole = assigned.get((x, B.comp(b2, c)))
            if whole is not None and A.comp(ab2, a) != whole:
                return False
        for x0, b in into.get(x, ()):
            whole = assigned.get((x0, B.comp(c, b)))
            if whole is not None and A.comp(a, assigned[x0, b]) != whole:
                return False
        return True

    def search(k):
        if k == len(keys):
            yield Lens(F, Cofunctor(A, B, F.obj, dict(assigned)))
            return
        key = keys[k]
        opts = choices[k]
        if rng is not None and len(opts) > 1:
            opts = [opts[i] for i in rng.permutation(len(opts))]
        for a in opts:
            assigned[key] = a
            end = A.tgt(a)
            into.setdefault(end, []).append(key)
            if consistent(key):
                yield from search(k + 1)
            into[end].pop()
            del assigned[key]

    yield from search(0)


def enumerate_lens_structures(F: Functor, budget=None) -> list:
    """All lens structures on ``F``, in deterministic order."""
    return list(iter_lens_structures(F, budget))


def _triangle_constraints(L: Functor, candidate: LensSpan, sq: LensSquare):
    """Lifts forced on any comparison lens by the two triangles."""
    Gbar, Fbar = sq.span.left, sq.span.right
    K, J = candidate.left, candidate.right
    fixed = {}
    for e in L.dom.objects:
        d = L.obj[e]
        for leg, cand in ((Gbar, K), (Fbar, J)):
            for x in leg.cod.out(leg.obj[d]):
                key = (e, leg.put.lift[d, x])
                fixed.setdefault(key, set()).add(cand.put.lift[e, x])
    # a key forced to two different lifts admits none
    return {k: (v if len(v) == 1 else set()) for k, v in fixed.items()}


@dataclass(frozen=True)
class Verdict:
    count: int

    @property
    def kind(self):
        return {0: "none", 1: "unique"}.get(self.count, "multiple")

    def __str__(self):
        return f"multiple({self.count})" if self.kind == "multiple" else self.kind


def verify_universal_property(sq: LensSquare, candidates, budget=None) -> list:
    """For each candidate span, count comparison lenses making both triangles commute."""
    verdicts = []
    for cand in candidates:
        if not _commutes_in_lens(cand, sq):
            raise PreconditionError(["candidate square over the cospan does not commute"])
        L = comparison_functor(cand, sq)
        fixed = _triangle_constraints(L, cand, sq)
        n = sum(1 for M in iter_lens_structures(L, budget, fixed) if _triangles_commute(M, cand, sq))
        verdicts.append(Verdict(n))
    return verdicts


def _commutes_in_lens(span: LensSpan, sq: LensSquare) -> bool:
    from .squares import is_commuting_square

    return is_commuting_square(LensSquare(span, sq.cospan))
