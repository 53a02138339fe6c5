
from hypothesis import given, strategies as st

from netrw.corpus import chain, chain_rule, cycle, oracle_corpus, single_fragment, unary
from netrw.jungle import Jungle
from netrw.net import IN, OUT, build_net, frontier, rename_symbols, sym
from netrw.rewrite import (
    Budget,
    NetSubstitution,
    admissible_matches,
    classify_rns,
    closure,
    find_matches,
    make_rns,
    make_rule,
    normal_forms,
    orn,
    rename_rns,
    rewrite_step,
    validate_uprns,
)
from netrw.transducer import relabeling_rns, rns_symbols

from strategies import nets

A, B = sym("a", 1, 1), sym("b", 1, 1)
AB = make_rns([chain_rule("ab", "a", "b")], name="ab")
ABC = make_rns([chain_rule("ab", "a", "b"), chain_rule("bc", "b", "c")], name="abc")


def names(j):
    return sorted("".join(sorted(s.name for s in n.vertices.values())) for n in j)


def test_wildcard_left_matches_every_vertex():
    lone = build_net({"f": frontier("x", OUT)})
    r = make_rns([make_rule("w", lone, lone)])
    assert len(find_matches(r, chain("ab"))) == 2


def test_two_occurrences_two_records():
    host = chain("aba")
    recs = find_matches(AB, host)
    want = [v for v, s in host.vertices.items() if s == A]
    assert sorted(r.position.vertices[0] for r in recs) == sorted(want)


def test_no_symbol_no_match():
    assert find_matches(AB, chain("bb")) == []


def test_step_without_redex_is_empty():
    assert len(rewrite_step(AB, Jungle.of(chain("b")))) == 0


def test_smallest_rewrite():
    assert rewrite_step(AB, Jungle.of(chain("a"))) == Jungle.of(chain("b"))


def test_two_right_substitutions_both_present():
    right = build_net({"v0": unary("b"), "f": frontier("y", OUT)}, [(("f", 1), ("v0", 1))], {("v0", OUT, 1): "o"})
    g1 = NetSubstitution({"y": single_fragment("c")}, "g1")
    g2 = NetSubstitution({"y": single_fragment("d")}, "g2")
    r = make_rns([make_rule("r", chain("a"), right, [g1, g2])])
    got = rewrite_step(r, Jungle.of(chain("a")))
    assert got == Jungle.of(chain("cb"), chain("db"))


def test_closure_without_rules_is_identity():
    S = Jungle.of(chain("b"), cycle("bb"))
    assert closure(AB, S) == S


def test_closure_two_steps():
    assert closure(ABC, Jungle.of(chain("a"))) == Jungle.of(chain("a"), chain("b"), chain("c"))


def test_growing_rule_exhausts_small_budget():
    grow = make_rns([chain_rule("g", "a", "aa")])
    got = closure(grow, Jungle.of(chain("a")), Budget(max_vertices=3))
    assert got.exhausted and chain("aaa") in got and len(got) == 3


def test_irreducible_jungle_is_its_own_normal_form():
    S = Jungle.of(chain("c"), cycle("cb"))
    got = normal_forms(ABC, Jungle.of(chain("cc")))
    assert normal_forms(AB, S) == S and not got.exhausted


def test_normal_form_single_rule():
    assert normal_forms(AB, Jungle.of(chain("aa"))) == Jungle.of(chain("bb"))


def test_looping_rule_has_no_normal_form():
    loop = make_rns([chain_rule("l", "a", "a")])
    got = normal_forms(loop, Jungle.of(chain("a")))
    assert len(got) == 0 and got.exhausted


def test_identity_rule_is_saving():
    r = make_rns([chain_rule("id", "a", "a")])
    flags = classify_rns(r, chain("aa"))
    assert flags.environmentally_saving and flags.orn_saving


def test_orn_mismatch():
    P = sym("p", 2, 1)
    x = frontier("x", OUT)
    left = build_net({"f": x, "v": P}, [(("f", 1), ("v", 1))], {("v", IN, 2): "j", ("v", OUT, 1): "o"})
    right = build_net({"f": x, "v": sym("q", 1, 1)}, [(("f", 1), ("v", 1))], {("v", OUT, 1): "o"})
    assert (orn(left), orn(right)) == (3, 2)
    r = make_rns([make_rule("r", left, right)])
    t = build_net({"u": A, "v": P}, [(("u", 1), ("v", 1))])
    assert not classify_rns(r, t).orn_saving


def test_minimal_uprns_passes():
    w = relabeling_rns([A], {"a": "z"})
    assert validate_uprns(w, Jungle.of(chain("aa"))).passed


def test_reused_apex_letter_fails_third_condition():
    w = make_rns([chain_rule("ab", "a", "b"), chain_rule("bz", "b", "z")])
    rep = validate_uprns(w, Jungle.of(chain("ab")))
    assert rep.failed() == ["apex-injective"]
    assert any(x.startswith("reused") for c in rep.conditions for x in c.witnesses)


def test_equal_images_fail_injectivity():
    w = relabeling_rns([A, B], {"a": "z", "b": "z"})
    rep = validate_uprns(w, Jungle.of(chain("ab")))
    assert "apex-injective" in rep.failed()


CORPUS = [r for r in oracle_corpus(1, 12) if not r.conditions.custom_predicates]


@given(nets(), st.sampled_from(CORPUS))
def test_closure_and_normal_forms_shape(n, r):
    S = Jungle.of(n)
    c = closure(r, S)
    nf = normal_forms(r, S)
    assert S <= c
    assert nf <= c
    for m in nf:
        assert not admissible_matches(r, m)


@given(nets(), st.sampled_from(CORPUS))
def test_renaming_commutes_with_rewriting(n, r):
    names_ = sorted({s.name for s in rns_symbols(r)} | {s.name for s in n.vertices.values()})
    sigma = {x: x + "'" for x in names_}
    direct = normal_forms(r, Jungle.of(n))
    renamed = normal_forms(rename_rns(r, sigma), Jungle.of(rename_symbols(n, sigma)))
    assert Jungle(rename_symbols(m, sigma) for m in direct) == renamed
    assert direct.exhausted == renamed.exhausted
