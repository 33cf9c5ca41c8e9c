"""Seeded generation of small categories, lenses, cospans and candidate spans.

Randomness comes from numpy's PCG64 bit generator seeded through a
``SeedSequence``; each public generator draws from its own spawned stream,
so identical configurations always give identical output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceeded, GenerationFailed, NotAcyclic
from .fincat import (
    FinCat,
    cat_pullback,
    free_product,
    Functor,
    category,
    coproduct,
    enumerate_functors,
    free_category,
    is_acyclic,
    quotient,
    terminal,
)
from .lens import (
    Cofunctor,
    Lens,
    compose_lens,
    dopf_to_lens,
    free_product_projections,
    identity_lens,
    is_discrete_opfibration,
    is_split_opfibration,
    terminal_lens,
)
from .spans import iter_lens_structures
from .squares import LensCospan, LensSpan, LensSquare, is_commuting_square, proxy_pullback

__all__ = [
    "PRNG_ALGORITHM",
    "GenConfig",
    "gen_category",
    "gen_lens",
    "gen_cospan",
    "gen_commuting_candidate",
    "LENS_STRATEGIES",
]

PRNG_ALGORITHM = "numpy.random.PCG64 seeded by numpy.random.SeedSequence"

LENS_STRATEGIES = ("dopf", "free-product", "composite", "random", "product", "coproduct", "fork")

_STREAMS = {"category": 0, "lens": 1, "cospan": 2, "candidate": 3}


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    max_objects: int = 4
    max_extra_morphisms: int = 6
    require_acyclic: bool = True
    require_dopf_leg: bool = False
    require_split_opfib_leg: bool = False

    def __post_init__(self):
        if self.max_objects < 1 or self.max_extra_morphisms < 0:
            raise ValueError("max_objects must be positive and max_extra_morphisms non-negative")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")

    def rng(self, stream: str) -> np.random.Generator:
        seq = np.random.SeedSequence(self.seed, spawn_key=(_STREAMS[stream],))
        return np.random.Generator(np.random.PCG64(seq))


# ---------------------------------------------------------------- categories

def _path_count(n, edges):
    """Number of non-identity paths in a DAG on objects 0..n-1 with i<j edges."""
    into = [0] * n  # paths ending at j, including the empty one
    total = 0
    for j in range(n):
        ending = sum(into[i] + 1 for i, k in edges if k == j)
        into[j] = ending
        total += ending
    return total


def _cyclic_blocks():
    idem = category(
        ["E"], {"id_E": ("E", "E"), "e": ("E", "E")}, {"E": "id_E"},
        {("id_E", "id_E"): "id_E", ("e", "id_E"): "e", ("id_E", "e"): "e", ("e", "e"): "e"},
    )
    z2 = category(
        ["Z"], {"id_Z": ("Z", "Z"), "g": ("Z", "Z")}, {"Z": "id_Z"},
        {("id_Z", "id_Z"): "id_Z", ("g", "id_Z"): "g", ("id_Z", "g"): "g", ("g", "g"): "id_Z"},
    )
    # split idempotent: r ∘ s = id_R, s ∘ r = e
    mors = {"id_R": ("R", "R"), "id_S": ("S", "S"), "s": ("R", "S"), "r": ("S", "R"), "k": ("S", "S")}
    table = {
        ("r", "s"): "id_R", ("s", "r"): "k", ("k", "k"): "k", ("k", "s"): "s", ("r", "k"): "r",
    }
    for f, (src, tgt) in mors.items():
        table["id_" + tgt, f] = f
        table[f, "id_" + src] = f
    retract = category(["R", "S"], mors, {"R": "id_R", "S": "id_S"}, table)
    return [idem, z2, retract]


def _category(rng, max_objects, max_extra, acyclic=True, prefix="X") -> FinCat:
    n = int(rng.integers(1, max_objects + 1))
    edges = []
    if n > 1:
        target = int(rng.integers(0, max_extra + 1))
        for _ in range(3 * target):
            if len(edges) >= target:
                break
            i, j = sorted(rng.choice(n, size=2, replace=False).tolist())
            edges.append((i, j))
            if _path_count(n, edges) > max_extra:
                edges.pop()
    objects = [f"{prefix}{i}" for i in range(n)]
    gens = {f"{prefix.lower()}{k}": (objects[i], objects[j]) for k, (i, j) in enumerate(edges)}
    cat = free_category(objects, gens)
    for _ in range(2):
        if rng.random() >= 0.4:
            break
        parallel = [
            (f, g)
            for f in cat.non_identities
            for g in cat.non_identities
            if f < g and cat.morphisms[f] == cat.morphisms[g]
        ]
        if not parallel:
            break
        f, g = parallel[int(rng.integers(len(parallel)))]
        cat = quotient(cat, [(f, g)])
    if not acyclic and rng.random() < 0.5:
        blocks = _cyclic_blocks()
        block = blocks[int(rng.integers(len(blocks)))]
        if (len(cat.objects) + len(block.objects) <= max_objects
                and len(cat.non_identities) + len(block.non_identities) <= max_extra):
            cat = _disjoint_union(cat, block)
    return cat


def _disjoint_union(first, second):
    clash = set(first.objects) & set(second.objects) or set(first.morphisms) & set(second.morphisms)
    if clash:
        return coproduct(first, second)
    return category(
        list(first.objects) + list(second.objects),
        {**first.morphisms, **second.morphisms},
        {**first.identity, **second.identity},
        {**first.compose, **second.compose},
    )


def gen_category(cfg: GenConfig) -> FinCat:
    """A valid category within the configured bounds."""
    return _category(cfg.rng("category"), cfg.max_objects, cfg.max_extra_morphisms, cfg.require_acyclic)


# -------------------------------------------------------------------- lenses

def _fits(cat, bounds):
    return len(cat.objects) <= bounds[0] and len(cat.non_identities) <= bounds[1]


def _elements_lens(rng, base: FinCat) -> Lens:
    """Discrete opfibration from the category of elements of a sum of pieces.

    Each piece is either the terminal copresheaf or a representable
    ``base(X, -)``.
    """
    pieces = []
    for _ in range(int(rng.integers(1, 3))):
        if rng.random() < 0.5:
            pieces.append(None)
        else:
            pieces.append(base.objects[int(rng.integers(len(base.objects)))])

    def elements(piece, y):
        return ["*"] if piece is None else list(base.hom(piece, y))

    def act(piece, f, x):
        return "*" if piece is None else base.comp(f, x)

    def name(i, y, x):
        return f"{y}^{i}" if x == "*" else f"{x}^{i}"

    objects, obj_map, morphisms, mor_map, identity, compose = [], {}, {}, {}, {}, {}
    for i, piece in enumerate(pieces):
        for y in base.objects:
            for x in elements(piece, y):
                e = name(i, y, x)
                objects.append(e)
                obj_map[e] = y
        for f, (s, t) in base.morphisms.items():
            for x in elements(piece, s):
                m = f"{f}|{name(i, s, x)}"
                morphisms[m] = (name(i, s, x), name(i, t, act(piece, f, x)))
                mor_map[m] = f
                if base.is_identity(f):
                    identity[name(i, s, x)] = m
        for (g, f), h in base.compose.items():
            for x in elements(piece, base.src(f)):
                fx = act(piece, f, x)
                compose[f"{g}|{name(i, base.tgt(f), fx)}", f"{f}|{name(i, base.src(f), x)}"] = (
                    f"{h}|{name(i, base.src(f), x)}"
                )
    cat = category(objects, morphisms, identity, compose)
    return dopf_to_lens(Functor(cat, base, obj_map, mor_map))


def _product_lens(rng, base, bounds) -> Lens:
    """Projection ``base × X -> base``, lifting ``f`` to ``⟨f, id⟩``."""
    nx = max(1, bounds[0] // max(1, len(base.objects)))
    X = _category(rng, min(nx, 2), 1, prefix="P")
    cospan = LensCospan(terminal_lens(base), terminal_lens(X))
    return proxy_pullback(cospan).span.left


def _free_product_lens(rng, base, bounds) -> Lens:
    X = _category(rng, 2, 1, prefix="Q")
    return free_product_projections(base, X).left


def _coproduct_lens(first: Lens, second: Lens) -> Lens:
    A = coproduct(first.dom, second.dom)
    obj, mor, lift = {}, {}, {}
    for tag, L in (("L", first), ("R", second)):
        pre = f"{tag}:"
        for x, y in L.obj.items():
            obj[pre + x] = y
        for f, g in L.get.mor.items():
            mor[pre + f] = g
        for (x, b), a in L.put.lift.items():
            lift[pre + x, b] = pre + a
    return Lens(Functor(A, first.cod, obj, mor), Cofunctor(A, first.cod, obj, lift))


def _fork_lens(L: Lens, f, tag="'") -> Lens:
    """Add a second morphism parallel in the base to ``f``, ending at a new sink.

    The image of ``tgt(f)`` must have no non-identity morphisms out of it.
    The new morphism is never a chosen lift, so the result is usually not
    a split opfibration.
    """
    A, C = L.dom, L.cod
    x, y = A.morphisms[f]
    if len(C.out(L.obj[y])) != 1:
        raise GenerationFailed("fork target is not over a sink")
    sink = f"{y}{tag}"
    while sink in A.identity:
        sink += tag
    objects = list(A.objects) + [sink]
    morphisms = dict(A.morphisms)
    identity = dict(A.identity)
    compose = dict(A.compose)
    sink_id = f"id_{sink}"
    morphisms[sink_id] = (sink, sink)
    identity[sink] = sink_id
    compose[sink_id, sink_id] = sink_id
    into_x = [h for h, (_, t) in A.morphisms.items() if t == x]
    head = f"{f}{tag}"
    while head in morphisms or any(m.startswith(head + "∘") for m in morphisms):
        head += tag

    def new(h):
        return head if A.is_identity(h) else f"{head}∘{h}"

    for h in into_x:
        morphisms[new(h)] = (A.src(h), sink)
        compose[sink_id, new(h)] = new(h)
    for h in into_x:
        for k, (_, t) in A.morphisms.items():
            if t == A.src(h):
                compose[new(h), k] = new(A.comp(h, k))
    if len(morphisms) != len(A.morphisms) + len(into_x) + 1:
        raise GenerationFailed("fork identifiers collide")
    cat = category(objects, morphisms, identity, compose)
    obj = {**L.obj, sink: L.obj[y]}
    mor = dict(L.get.mor)
    mor[sink_id] = C.id(L.obj[y])
    for h in into_x:
        mor[new(h)] = C.comp(L.get.mor[f], L.get.mor[h])
    lift = dict(L.put.lift)
    lift[sink, C.id(L.obj[y])] = sink_id
    return Lens(Functor(cat, C, obj, mor), Cofunctor(cat, C, obj, lift))


def _forked(rng, base, bounds, kind, depth):
    inner = (max(bounds[0] - 1, len(base.objects)), max(bounds[1] - 2, len(base.non_identities)))
    L = _lens(rng, base, inner, "any", depth + 1)
    options = [
        f for f in L.dom.morphisms
        if len(L.cod.out(L.obj[L.dom.tgt(f)])) == 1
        and not L.cod.is_identity(L.get.mor[f])
    ]
    if not options:
        raise GenerationFailed("no morphism over a sink to fork")
    return _fork_lens(L, options[int(rng.integers(len(options)))])


def _forked_fit(rng, base, bounds, tries=6) -> Lens:
    for _ in range(tries):
        try:
            L = _forked(rng, base, bounds, "any", 0)
        except (GenerationFailed, NotAcyclic, BudgetExceeded):
            continue
        if _fits(L.dom, bounds):
            return L
    raise GenerationFailed("no fitting fork")


def _random_lens(rng, base, bounds, tries=30) -> Lens:
    """A random lens structure on a random functor into ``base``."""
    E = _category(rng, bounds[0], bounds[1], acyclic=rng.random() < 0.7, prefix="E")
    perm_obj = {x: [base.objects[i] for i in rng.permutation(len(base.objects))] for x in E.objects}

    def mor_choices(f, cands):
        return [cands[i] for i in rng.permutation(len(cands))]

    functors = enumerate_functors(E, base, perm_obj.__getitem__, mor_choices, max_steps=5000)
    try:
        for k, F in enumerate(functors):
            if k >= tries:
                break
            try:
                found = next(iter_lens_structures(F, budget=10**5, rng=rng), None)
            except BudgetExceeded:
                continue
            if found is not None:
                return found
    except BudgetExceeded:
        pass
    raise GenerationFailed("no lens structure found on sampled functors")


def _lens(rng, base, bounds, kind="any", depth=0) -> Lens:
    """Sample a lens into ``base`` whose domain fits ``bounds``.

    ``kind`` is ``"any"``, ``"dopf"`` or ``"split"`` (split opfibration).
    """
    if kind == "dopf":
        strategies = ["dopf", "dopf", "coproduct", "composite"]
    elif kind == "split":
        strategies = ["dopf", "product", "product", "coproduct", "composite", "random"]
    else:
        strategies = ["dopf", "free-product", "composite", "random", "product", "coproduct", "fork", "fork", "fork", "fork"]
    if not base.objects:
        return identity_lens(base)
    if depth > 1:
        strategies = [s for s in strategies if s not in ("composite", "coproduct", "fork")]
    for _ in range(12):
        strategy = strategies[int(rng.integers(len(strategies)))]
        try:
            L = _lens_by(strategy, rng, base, bounds, kind, depth)
        except (GenerationFailed, NotAcyclic, BudgetExceeded):
            continue
        if L is None or not _fits(L.dom, bounds):
            continue
        if kind == "dopf" and not is_discrete_opfibration(L.get):
            continue
        if kind == "split" and not is_split_opfibration(L, "by-characterisation"):
            continue
        return L
    return _lens_by("dopf-trivial", rng, base, bounds, kind, depth)


def _lens_by(strategy, rng, base, bounds, kind, depth):
    if strategy == "dopf":
        return _elements_lens(rng, base)
    if strategy == "dopf-trivial":
        return identity_lens(base)
    if strategy == "product":
        return _product_lens(rng, base, bounds)
    if strategy == "free-product":
        return _free_product_lens(rng, base, bounds)
    if strategy == "random":
        return _random_lens(rng, base, bounds)
    if strategy == "fork":
        return _forked(rng, base, bounds, kind, depth)
    if strategy == "coproduct":
        first = _lens(rng, base, bounds, kind, depth + 1)
        second = _lens(rng, base, bounds, kind, depth + 1)
        return _coproduct_lens(first, second)
    if strategy == "composite":
        lower = _lens(rng, base, bounds, kind, depth + 1)
        upper = _lens(rng, lower.dom, bounds, kind, depth + 1)
        return compose_lens(upper, lower)
    raise ValueError(f"unknown strategy {strategy!r}")


def gen_lens(cfg: GenConfig, onto: FinCat | None = None, strategy: str | None = None) -> Lens:
    """A valid lens, optionally with a prescribed codomain and strategy.

    An explicit ``strategy`` raises :class:`GenerationFailed` when its
    sampling budget runs out; the automatic mode falls back across
    strategies.
    """
    rng = cfg.rng("lens")
    if onto is None:
        onto = _category(rng, cfg.max_objects, cfg.max_extra_morphisms, cfg.require_acyclic)
    bounds = (
        max(cfg.max_objects, len(onto.objects)),
        max(cfg.max_extra_morphisms, len(onto.non_identities)),
    )
    kind = "dopf" if cfg.require_dopf_leg else "split" if cfg.require_split_opfib_leg else "any"
    if strategy is None:
        return _lens(rng, onto, bounds, kind)
    if strategy not in LENS_STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    return _lens_by(strategy, rng, onto, bounds, kind, 0)


# ------------------------------------------------------------- cospans/spans

def gen_cospan(cfg: GenConfig) -> LensCospan:
    """A lens cospan whose three categories all fit the configured bounds."""
    rng = cfg.rng("cospan")
    bounds = (cfg.max_objects, cfg.max_extra_morphisms)
    if rng.random() < 0.15:
        C = terminal()
    else:
        C = _category(rng, cfg.max_objects, cfg.max_extra_morphisms, cfg.require_acyclic, prefix="C")
    kind = "dopf" if cfg.require_dopf_leg else "split" if cfg.require_split_opfib_leg else "any"
    if kind == "any" and rng.random() < 0.3:
        try:
            return LensCospan(_forked_fit(rng, C, bounds), _forked_fit(rng, C, bounds))
        except GenerationFailed:
            pass
    special = _lens(rng, C, bounds, kind)
    other = _lens(rng, C, bounds, "any")
    if rng.random() < 0.5:
        return LensCospan(special, other)
    return LensCospan(other, special)


CANDIDATE_STRATEGIES = ("precompose", "rejection", "relift", "free-product")


def gen_commuting_candidate(cfg: GenConfig, cospan: LensCospan, strategy: str | None = None) -> LensSpan:
    """A lens span forming a commuting square with ``cospan``.

    ``"precompose"`` postcomposes a sampled lens into the proxy-pullback apex
    with its legs, so the result is compatible and independent.
    ``"rejection"`` samples the two legs separately and keeps a commuting
    pair; such candidates need not be compatible or independent.
    ``"relift"`` keeps the Cat-pullback projections but picks their lifts at
    random. ``"free-product"`` uses the free-product projections and only
    applies over a terminal base.
    """
    rng = cfg.rng("candidate")
    explicit = strategy is not None
    if strategy is None:
        strategy = str(rng.choice(CANDIDATE_STRATEGIES, p=[0.5, 0.2, 0.2, 0.1]))
    samplers = {
        "rejection": _rejection_candidate,
        "relift": _relift_candidate,
        "free-product": _free_product_candidate,
    }
    if strategy in samplers:
        try:
            return samplers[strategy](rng, cospan, cfg)
        except GenerationFailed:
            if explicit:
                raise
            strategy = "precompose"
    if strategy != "precompose":
        raise ValueError(f"unknown strategy {strategy!r}")
    sq = proxy_pullback(cospan)
    D = sq.span.apex
    bounds = (max(cfg.max_objects, len(D.objects)), max(cfg.max_extra_morphisms, len(D.non_identities)))
    H = _lens(rng, D, bounds, "any")
    return sq.span.precompose(H)


def _relift_candidate(rng, cospan, cfg, tries=10) -> LensSpan:
    F, G = cospan.left, cospan.right
    _, PA, PB = cat_pullback(F.get, G.get)
    for _ in range(tries):
        try:
            left = next(iter_lens_structures(PA, budget=10**5, rng=rng), None)
            if left is None:
                break
            for m, right in enumerate(iter_lens_structures(PB, budget=10**5, rng=rng)):
                if m >= 10:
                    break
                span = LensSpan(left, right)
                if is_commuting_square(LensSquare(span, cospan)):
                    return span
        except BudgetExceeded:
            break
    raise GenerationFailed("no commuting relift found")


def _free_product_candidate(rng, cospan, cfg) -> LensSpan:
    F, G = cospan.left, cospan.right
    if len(F.cod.morphisms) != 1:
        raise GenerationFailed("free-product candidates need a terminal base")
    if not (is_acyclic(F.dom) and is_acyclic(G.dom)):
        raise GenerationFailed("free product of cyclic categories is infinite")
    P = free_product(F.dom, G.dom)
    if not _fits(P, (2 * cfg.max_objects * cfg.max_objects, 4 * cfg.max_extra_morphisms * cfg.max_objects)):
        raise GenerationFailed("free product too large")
    return free_product_projections(F.dom, G.dom)


def _rejection_candidate(rng, cospan, cfg, tries=40) -> LensSpan:
    F, G = cospan.left, cospan.right
    A, B = F.dom, G.dom
    bounds = (cfg.max_objects, cfg.max_extra_morphisms)
    for _ in range(tries):
        try:
            K = _random_lens(rng, A, bounds, tries=10)
        except GenerationFailed:
            continue
        E = K.dom
        FK = {e: F.obj[K.obj[e]] for e in E.objects}
        FKm = {f: F.get.mor[K.get.mor[f]] for f in E.morphisms}

        def obj_choices(e):
            ys = [y for y in B.objects if G.obj[y] == FK[e]]
            return [ys[i] for i in rng.permutation(len(ys))]

        def mor_choices(f, cands):
            ok = [g for g in cands if G.get.mor[g] == FKm[f]]
            return [ok[i] for i in rng.permutation(len(ok))]

        try:
            found = _commuting_partner(rng, K, cospan, obj_choices, mor_choices)
        except BudgetExceeded:
            continue
        if found is not None:
            return found
    raise GenerationFailed("no commuting candidate found by rejection")


def _commuting_partner(rng, K, cospan, obj_choices, mor_choices):
    B = cospan.right.dom
    functors = enumerate_functors(K.dom, B, obj_choices, mor_choices, max_steps=5000)
    for k, Jget in enumerate(functors):
        if k >= 10:
            return None
        for m, J in enumerate(iter_lens_structures(Jget, budget=10**5, rng=rng)):
            if m >= 10:
                break
            span = LensSpan(K, J)
            if is_commuting_square(LensSquare(span, cospan)):
                return span
    return None
