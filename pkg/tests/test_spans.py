import pytest

from lenslab.errors import BudgetExceeded, NotCommuting, PreconditionError
from lenslab.fincat import Functor, identity_functor, pairing
from lenslab.gen import GenConfig, gen_commuting_candidate, gen_cospan
from lenslab.lens import (
    Cofunctor,
    Lens,
    compose_lens,
    dopf_to_lens,
    free_product_projections,
    identity_lens,
    terminal_lens,
    validate_lens,
)
from lenslab.spans import (
    Verdict,
    chosen_lifts,
    comparison_functor,
    comparison_lens,
    enumerate_lens_structures,
    independence_witnesses,
    is_independent,
    is_split_independent,
    is_sync_minimal,
    iter_lens_structures,
    split_independence_witnesses,
    split_opfib_factorisation,
    sync_minimal_core,
    verify_universal_property,
)
from lenslab.squares import LensCospan, LensSpan, LensSquare, is_compatible_square, proxy_pullback
from lenslab.standard import d2, example_square, one, two

from oracles import lift_assignments


@pytest.fixture
def ex4():
    return example_square()


def _proxy_product_of_intervals():
    one_c = one()
    return proxy_pullback(LensCospan(terminal_lens(two(), one_c), terminal_lens(two(), one_c)))


def _free_product_square():
    one_c = one()
    co = LensCospan(terminal_lens(two(), one_c), terminal_lens(two(), one_c))
    return LensSquare(free_product_projections(two(), two()), co)


# ------------------------------------------------------------ sync minimality

def test_example_core_removes_one_morphism(ex4):
    core = sync_minimal_core(ex4.span)
    assert core.removed == ("⟨a',b'⟩",)
    assert len(core.core.apex.morphisms) == 8
    assert not core.is_whole
    assert validate_lens(core.core.left) == [] and validate_lens(core.core.right) == []
    inc = core.inclusion
    assert all(inc.obj[x] == x for x in core.core.apex.objects)
    assert len(set(inc.mor.values())) == len(inc.mor)
    assert core.core.left.put.lift == ex4.span.left.put.lift


def test_example_chosen_lifts(ex4):
    lifts = chosen_lifts(ex4.span)
    assert "⟨a',b'⟩" not in lifts
    assert {"⟨a,b⟩", "⟨a',b⟩", "⟨a,b'⟩"} <= lifts


def test_identity_span_core_is_whole():
    I = identity_lens(two())
    assert sync_minimal_core(LensSpan(I, I)).is_whole


def test_proxy_product_is_sync_minimal():
    sq = _proxy_product_of_intervals()
    assert sync_minimal_core(sq.span).is_whole
    assert is_sync_minimal(sq.span)
    D = sq.span.apex
    assert D.comp("⟨id_1,u⟩", "⟨u,id_0⟩") == "⟨u,u⟩"


def test_example_is_not_sync_minimal(ex4):
    assert not is_sync_minimal(ex4.span)


# --------------------------------------------------------------- independence

def test_example_is_independent(ex4):
    assert is_independent(ex4.span)
    assert is_split_independent(ex4)


def test_free_product_span_is_not_independent():
    span = free_product_projections(two(), two())
    assert independence_witnesses(span) == [("(1,u)∘(u,0)", "(u,1)∘(0,u)")]
    assert not is_independent(span)


def test_free_product_square_is_not_split_independent():
    sq = _free_product_square()
    assert not is_split_independent(sq)
    # a2 must run from A2 = 0 to A2' = 1, so it is u rather than an identity
    assert split_independence_witnesses(sq) == [("(0,0)", "u", "u", "u")]


@pytest.mark.parametrize("seed", range(40))
def test_dopf_leg_compatible_squares_have_independent_spans(seed):
    cfg = GenConfig(seed=seed, require_dopf_leg=True)
    co = gen_cospan(cfg)
    for k in range(3):
        cand = gen_commuting_candidate(GenConfig(seed=seed * 3 + k, require_dopf_leg=True), co)
        if is_compatible_square(LensSquare(cand, co)):
            assert is_independent(cand)


# ------------------------------------------------------------ factorisation

def _split_case(seed):
    cfg = GenConfig(seed=seed, require_split_opfib_leg=True)
    co = gen_cospan(cfg)
    from lenslab.lens import is_split_opfibration

    if not is_split_opfibration(co.left):
        co = LensCospan(co.right, co.left)
    return proxy_pullback(co)


def test_factorisation_of_lifts_and_identities():
    sq = _split_case(3)
    D = sq.span.apex
    for x in D.objects:
        i = D.id(x)
        first, second, u = split_opfib_factorisation(sq, i)
        assert first == second == i
        assert u == sq.span.left.cod.id(sq.span.left.obj[x])
    Fbar = sq.span.right
    for x in D.objects:
        for b in Fbar.cod.out(Fbar.obj[x]):
            d = Fbar.put.lift[x, b]
            fz = split_opfib_factorisation(sq, d)
            assert fz.first == d
            assert sq.span.left.cod.is_identity(fz.u)


@pytest.mark.parametrize("seed", range(30))
def test_factorisation_recomposes(seed):
    sq = _split_case(seed)
    F = sq.cospan.left
    D = sq.span.apex
    for d in sync_minimal_core(sq.span).core.apex.morphisms:
        fz = split_opfib_factorisation(sq, d)
        assert D.comp(fz.second, fz.first) == d
        assert F.cod.is_identity(F.get.mor[fz.u])


def test_factorisation_preconditions(ex4):
    with pytest.raises(PreconditionError) as err:
        split_opfib_factorisation(ex4, "⟨a,b⟩")
    assert "cospan leg is not a split opfibration" in err.value.failed


# -------------------------------------------------------- comparison lenses

def test_comparison_functor_is_pairing():
    sq = _proxy_product_of_intervals()
    cand = free_product_projections(two(), two())
    H = comparison_functor(cand, sq)
    assert H == pairing(sq.span.left.get, sq.span.right.get, cand.left.get, cand.right.get)
    assert H.mor["(1,u)∘(u,0)"] == "⟨u,u⟩"


def test_comparison_functor_needs_commuting_gets():
    sq = _proxy_product_of_intervals()
    I = identity_lens(two())
    # the diagonal of 𝟚 pairs fine; a span with mismatched objects does not
    skew = LensSpan(
        Lens(Functor(one(), two(), {"0": "0"}, {"id_0": "id_0"}),
             Cofunctor(one(), two(), {"0": "0"}, {("0", "id_0"): "id_0", ("0", "u"): "id_0"})),
        Lens(Functor(one(), two(), {"0": "1"}, {"id_0": "id_1"}),
             Cofunctor(one(), two(), {"0": "1"}, {("0", "id_1"): "id_0"})),
    )
    assert comparison_functor(LensSpan(I, I), sq).obj == {"0": "⟨0,0⟩", "1": "⟨1,1⟩"}
    with pytest.raises((NotCommuting, ValueError)):
        comparison_functor(skew, proxy_pullback(LensCospan(I, I)))


def test_comparison_lens_of_own_span_is_identity():
    sq = _proxy_product_of_intervals()
    res = comparison_lens(sq.span, sq, exhaustive=True)
    assert res.lens == identity_lens(sq.span.apex)
    assert res.uniqueness_witness == 1


def test_comparison_lens_of_diagonal():
    I = identity_lens(two())
    sq = proxy_pullback(LensCospan(I, I))
    res = comparison_lens(LensSpan(I, I), sq, exhaustive=True)
    assert res.lens.obj == {"0": "⟨0,0⟩", "1": "⟨1,1⟩"}
    assert res.lens.put.lift["0", "⟨u,u⟩"] == "u"
    assert validate_lens(res.lens) == []
    assert res.uniqueness_witness == 1


def test_comparison_lens_example_has_no_solution(ex4):
    core = sync_minimal_core(ex4.span)
    M = core.core
    assert is_independent(M)
    assert is_compatible_square(LensSquare(M, ex4.cospan))
    with pytest.raises(PreconditionError) as err:
        comparison_lens(M, ex4)
    assert err.value.failed == ("proxy-pullback span is not sync minimal",)
    eps = comparison_functor(M, ex4)
    assert eps == core.inclusion
    assert enumerate_lens_structures(eps) == []
    assert lift_assignments(eps) == []


def test_comparison_lens_rejects_dependent_candidate():
    with pytest.raises(PreconditionError) as err:
        comparison_lens(free_product_projections(two(), two()), _proxy_product_of_intervals())
    assert err.value.failed == ("candidate is not independent",)


# ------------------------------------------------------------- enumeration

def test_enumeration_examples(ex4):
    assert enumerate_lens_structures(identity_functor(two())) == [identity_lens(two())]
    d2_to_1 = Functor(d2(), one(), {"0": "0", "1": "0"}, {"id_0": "id_0", "id_1": "id_0"})
    assert enumerate_lens_structures(d2_to_1) == [dopf_to_lens(d2_to_1)]
    assert enumerate_lens_structures(sync_minimal_core(ex4.span).inclusion) == []


@pytest.mark.parametrize("seed", range(30))
def test_enumeration_matches_brute_force(seed):
    cfg = GenConfig(seed=seed, max_objects=3, max_extra_morphisms=4)
    co = gen_cospan(cfg)
    for L in (co.left, co.right):
        found = [dict(M.put.lift) for M in enumerate_lens_structures(L.get)]
        oracle = lift_assignments(L.get)
        assert sorted(map(sorted_items, found)) == sorted(map(sorted_items, oracle))


def sorted_items(d):
    return tuple(sorted(d.items()))


def test_budget_exceeded_and_env_override(monkeypatch):
    sq = _proxy_product_of_intervals()
    P1 = free_product_projections(two(), two()).left
    with pytest.raises(BudgetExceeded):
        enumerate_lens_structures(P1.get, budget=1)
    monkeypatch.setenv("LENSLAB_BUDGET", "1")
    with pytest.raises(BudgetExceeded):
        enumerate_lens_structures(P1.get)
    monkeypatch.setenv("LENSLAB_BUDGET", "1000000")
    assert len(enumerate_lens_structures(P1.get)) >= 1
    assert sq is not None


@pytest.mark.parametrize("seed", range(25))
def test_inclusion_has_structure_iff_identity(seed):
    co = gen_cospan(GenConfig(seed=seed))
    span = proxy_pullback(co).span
    core = sync_minimal_core(span)
    structures = enumerate_lens_structures(core.inclusion)
    assert bool(structures) == core.is_whole


def test_pruned_and_plain_enumeration_agree():
    sq = _proxy_product_of_intervals()
    for cand in (sq.span, free_product_projections(two(), two())):
        L = comparison_functor(cand, sq)

        def commutes(M):
            return (compose_lens(M, sq.span.left) == cand.left
                    and compose_lens(M, sq.span.right) == cand.right)

        plain = sum(1 for M in iter_lens_structures(L) if commutes(M))
        assert [plain] == [v.count for v in verify_universal_property(sq, [cand])]


# ---------------------------------------------------------- universal property

def test_verdicts():
    sq = _proxy_product_of_intervals()
    cand = free_product_projections(two(), two())
    assert [str(v) for v in verify_universal_property(sq, [cand, sq.span])] == ["none", "unique"]
    assert str(Verdict(3)) == "multiple(3)" and Verdict(3).kind == "multiple"


def test_verify_rejects_non_commuting_candidate(ex4):
    Gbar, Fbar = ex4.span.left, ex4.span.right
    lift = {**Fbar.put.lift, ("⟨A1,B1⟩", "b"): "⟨a',b⟩"}
    bad = LensSpan(Gbar, Lens(Fbar.get, Cofunctor(Fbar.dom, Fbar.cod, Fbar.obj, lift)))
    with pytest.raises(PreconditionError):
        verify_universal_property(ex4, [bad])


def test_example_is_not_terminal(ex4):
    core = sync_minimal_core(ex4.span).core
    assert [str(v) for v in verify_universal_property(ex4, [core, ex4.span])] == ["none", "unique"]


@pytest.mark.parametrize("seed", range(200))
def test_non_sync_minimal_proxy_pullbacks_are_not_terminal(seed):
    # if every independent compatible candidate, the core included, had a
    # unique comparison lens, the span would be sync minimal
    sq = proxy_pullback(gen_cospan(GenConfig(seed=seed)))
    core = sync_minimal_core(sq.span)
    [verdict] = verify_universal_property(sq, [core.core])
    assert (verdict.kind == "unique") == core.is_whole
