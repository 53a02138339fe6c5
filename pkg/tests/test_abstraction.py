import pytest

from netrw.abstraction import (
    KINDS,
    AbstractionRelation,
    Partition,
    PartiallyQuotientAlgebra,
    center_uniqueness,
    check_equivalence_laws,
    check_partially_quotient,
    default_centers,
    default_theta,
    equivalence_closure,
    from_key,
    functor_check,
    identity_relation,
    induced_quotient,
    multidim_theta,
    sisters_check,
    sisters_relation,
    sum_product,
    symbol_renaming,
)
from netrw.checks import raw_sisters, rank_label
from netrw.corpus import chain, chain_rule, cycle
from netrw.errors import BudgetExceeded
from netrw.jungle import Jungle
from netrw.net import build_net, rename_symbols, sym
from netrw.rewrite import make_rns, normal_forms


def test_sister_of_itself():
    t = chain("ab")
    for kind in KINDS:
        assert sisters_check(t, t, kind) is not None


def test_relabelings_are_sisters():
    s, t = chain("ab"), chain("cd")
    w = sisters_check(s, t, "NBH")
    assert w is not None
    assert sisters_check(s, t, "UPRNS").renaming == (("a", "c"), ("b", "d"))


def test_port_counts_must_agree():
    assert sisters_check(chain("a"), cycle("a"), "NBH") is None
    assert sisters_check(chain("a"), cycle("a"), "PRNS") is None


def test_collapse_witness_between_chains():
    # a 3-chain collapses onto a 2-chain and onto a 1-chain
    w = sisters_check(chain("ab"), chain("a"), "NBH", origins=[chain("aab")])
    assert w is not None and w.origin is not None


def test_symbol_renaming_bijective():
    m = symbol_renaming(cycle("ab"), cycle("xy"))
    assert set(m.values()) == {"x", "y"}
    assert rename_symbols(cycle("ab"), m).key() == cycle("xy").key()


def test_identity_laws(universe):
    assert check_equivalence_laws(identity_relation(universe)).passed


@pytest.mark.parametrize("build", [from_key, default_theta])
def test_key_relations_lawful(universe, build):
    rel = build(universe)
    assert check_equivalence_laws(rel).passed
    assert Partition(rel.classes()).universe() == universe


def test_non_transitive_pairs_fail():
    a, b, c = chain("a"), chain("b"), chain("aa")
    U = Jungle.of(a, b, c)
    ka, kb, kc = a.key(), b.key(), c.key()
    pairs = {(k, k) for k in (ka, kb, kc)} | {(ka, kb), (kb, ka), (kb, kc), (kc, kb)}
    rep = check_equivalence_laws(AbstractionRelation("NBH", U, frozenset(pairs)))
    assert not rep.verdict("transitivity").passed
    assert rep.verdict("transitivity").witnesses
    closed = equivalence_closure(U, pairs)
    assert (ka, kc) in closed


def test_rank_merging_kernel_is_coarser_than_renaming(universe):
    theta = default_theta(universe)
    for s in universe:
        for t in universe:
            if s.key(True) == t.key(True):
                assert theta.related(s, t)
            if theta.related(s, t):
                assert rank_label(s) == rank_label(t)


def test_theta_is_distinctive(universe):
    assert Partition(default_theta(universe).classes()).is_distinctive()


@pytest.mark.parametrize("kind", ["PRNS", "UPRNS"])
def test_rename_sisters_are_equivalences_raw(small_universe, kind):
    assert check_equivalence_laws(raw_sisters(small_universe, kind)).passed


def test_block_sisters_need_closure(universe):
    raw = check_equivalence_laws(raw_sisters(universe, "NBH"))
    assert raw.verdict("reflexivity").passed and raw.verdict("symmetry").passed
    assert not raw.verdict("transitivity").passed
    assert check_equivalence_laws(sisters_relation(universe, "NBH")).passed


def _pqa(U, label, quotient):
    r = make_rns([chain_rule("ab", "a", "b")])
    f = lambda t: normal_forms(r, Jungle.of(t))
    return PartiallyQuotientAlgebra(U, None, {"nf": f}, {"nf": quotient(label, f)}, label)


def test_induced_quotient_commutes(universe):
    label = lambda n: n.key(True)
    assert check_partially_quotient(_pqa(universe, label, induced_quotient)).passed


def test_stray_class_map_fails(universe):
    label = lambda n: n.key(True)
    stray = lambda label, f: (lambda lab, members: {label(cycle("zzz"))})
    rep = check_partially_quotient(_pqa(universe, label, stray))
    assert not rep.passed and rep.verdict("commutation:nf").witnesses


def test_empty_operations_pass(universe):
    assert check_partially_quotient(PartiallyQuotientAlgebra(universe, None, {}, {})).passed


def test_center_uniqueness_cases():
    single = default_centers(Partition([Jungle.of(chain("a")), Jungle.of(chain("b"))]))
    assert center_uniqueness(single).passed
    twins = Partition([Jungle.of(chain("a"), chain("b"))], {0: [chain("a"), chain("b")]})
    assert center_uniqueness(twins).passed
    skew = build_net({"v": sym("p", 2, 1)})
    mixed = Partition([Jungle.of(chain("a"), skew)], {0: [chain("a"), skew]})
    assert not center_uniqueness(mixed).passed


def test_level_zero_is_base(universe):
    theta = default_theta(universe)
    assert multidim_theta(universe, 0).relation == theta.pairs


def test_isomorphic_pair_full_at_level_one():
    U = Jungle.of(chain("a"), chain("b"))
    keys = U.keys()
    full = frozenset((a, b) for a in keys for b in keys)
    assert multidim_theta(U, 1).relation == full


def test_identity_base_stays_identity(small_universe):
    ident = identity_relation(small_universe)
    for k in range(3):
        assert multidim_theta(small_universe, k, [ident]).relation == ident.pairs


def test_levels_above_three_refused(small_universe):
    with pytest.raises(BudgetExceeded):
        multidim_theta(small_universe, 4)


def test_sum_product_cases():
    assert sum_product([[[1], [1]]]) == 1
    assert sum_product([[[2]], [[3]]]) == 5
    assert sum_product([]) == 0


def test_functor_identity_and_mutation():
    objs = [Jungle.of(chain("a")), Jungle.of(chain("aa"), chain("b"))]
    r = make_rns([chain_rule("ab", "a", "b")])
    rels = [("nf", r, lambda j: normal_forms(r, j))]
    ident = lambda j: j
    assert functor_check(ident, lambda h: (lambda j: normal_forms(h, j)), objs, rels).passed
    broken = lambda h: (lambda j: j)
    rep = functor_check(ident, broken, objs, rels)
    assert not rep.passed and rep.verdict("functor:nf").witnesses


def test_renaming_projection_is_a_functor():
    sigma = {"a": "x", "b": "y"}
    gamma = lambda j: Jungle(rename_symbols(n, sigma) for n in j)
    r = make_rns([chain_rule("ab", "a", "b")])
    from netrw.rewrite import rename_rns

    objs = [Jungle.of(chain("a")), Jungle.of(chain("ab"), cycle("aa"))]
    rels = [("nf", r, lambda j: normal_forms(r, j))]
    rep = functor_check(gamma, lambda h: (lambda j: normal_forms(rename_rns(h, sigma), j)), objs, rels)
    assert rep.passed
