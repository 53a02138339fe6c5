import pytest
from hypothesis import given

from netrw.abstraction import default_theta
from netrw.checks import macro_triples, CheckConfig
from netrw.corpus import chain, chain_rule, cycle
from netrw.errors import InterfaceMismatch, MissingMacro, UnattachedVertex, ValidationError
from netrw.jungle import Jungle
from netrw.net import IN, OUT, build_net, sym
from netrw.rewrite import make_rns, normal_forms, rewrite_step
from netrw.transducer import (
    Macro,
    build_macro,
    chain_td,
    commutative_condition,
    identity_td,
    make_td,
    parallel_td_check,
    rns_parallel,
    run_td,
    run_until_stable,
    swap_parallel,
    td_abstraction_check,
    td_compose,
    td_normal_form,
    uma_build,
)

from strategies import nets

AB = make_rns([chain_rule("ab", "a", "b")], name="ab")
BC = make_rns([chain_rule("bc", "b", "c")], name="bc")
ABC = make_rns([chain_rule("ab", "a", "b"), chain_rule("bc", "b", "c")], name="abc")
LOOP = make_rns([chain_rule("aa", "a", "a")], name="loop")
S = Jungle.of(chain("a"))


def test_identity_system_returns_input():
    T = Jungle.of(chain("ab"), cycle("a"))
    assert run_td(identity_td(), T) == T


def test_chain_of_two_systems():
    # hand simulation: step ab gives {b}, then step bc gives {c}
    td = chain_td([AB, BC])
    assert run_td(td, S) == rewrite_step(BC, rewrite_step(AB, S)) == Jungle.of(chain("c"))


def test_two_systems_on_one_vertex_union():
    td = chain_td([[AB, make_rns([chain_rule("ac", "a", "c")])]])
    assert run_td(td, S) == Jungle.of(chain("b"), chain("c"))


def test_unmatched_nets_pass_through_a_step():
    assert run_td(chain_td([AB]), Jungle.of(chain("c"))) == Jungle.of(chain("c"))


def test_normal_form_transducer_matches_iteration():
    td = chain_td([ABC])
    nf = td_normal_form(td)
    assert run_td(nf, S) == Jungle.of(chain("c")) == run_until_stable(td, S)
    assert run_td(td_normal_form(chain_td([AB])), Jungle.of(chain("b"))) == Jungle.of(chain("b"))


def test_looping_normal_form_flags_exhaustion():
    assert run_td(td_normal_form(chain_td([LOOP])), S).exhausted


def test_compose_with_identity():
    td = chain_td([AB])
    for T in (S, Jungle.of(chain("ab"))):
        assert run_td(td_compose(td, identity_td()), T) == run_td(td, T) == run_td(td_compose(identity_td(), td), T)


def test_compose_chain():
    both = td_compose(chain_td([AB]), chain_td([BC]))
    assert run_td(both, S) == run_td(chain_td([BC]), run_td(chain_td([AB]), S)) == Jungle.of(chain("c"))


def test_compose_arity_mismatch():
    wide = build_net({"t0": sym("op", 1, 2)}, (), {("t0", IN, 1): "in", ("t0", OUT, 1): "o1", ("t0", OUT, 2): "o2"})
    two = make_td(wide, {"t0": AB})
    with pytest.raises(InterfaceMismatch):
        td_compose(two, chain_td([AB]))


def test_fan_out_carrier_unions_outputs():
    wide = build_net({"t0": sym("op", 1, 2)}, (), {("t0", IN, 1): "in", ("t0", OUT, 1): "o1", ("t0", OUT, 2): "o2"})
    td = make_td(wide, {("t0", 1, 1): AB, ("t0", 1, 2): LOOP})
    assert run_td(td, S) == Jungle.of(chain("a"), chain("b"))


def test_unattached_vertex_refused():
    td = make_td(chain_td([AB]).carrier, {})
    with pytest.raises(UnattachedVertex):
        run_td(td, S)


def test_carrier_needs_operations():
    with pytest.raises(ValidationError):
        make_td(build_net({"t0": sym("op", 0, 1)}), {})


def test_macro_parts():
    m = build_macro(AB)
    assert isinstance(m, Macro)
    assert rns_parallel(AB, m.r_m)
    via = normal_forms(m.w_o, normal_forms(m.r_m, normal_forms(m.w, S)))
    assert via == normal_forms(AB, S)


def test_identity_intervention_keeps_td():
    td = chain_td([AB])
    assert uma_build(td, []) is td


def test_macro_transducer_equals_original():
    td = chain_td([AB, BC])
    uma = uma_build(td, ["UPRNS"])
    assert run_td(uma, S) == run_td(td, S)
    assert parallel_td_check(td, uma)


def test_missing_macro():
    with pytest.raises(MissingMacro):
        build_macro(AB, "NBH")
    pred = make_rns([chain_rule("ab", "a", "b")], custom_predicates={"p": lambda n, m: True})
    with pytest.raises(MissingMacro):
        build_macro(pred)


def test_parallel_reflexive_and_swap():
    td = chain_td([AB, BC])
    assert parallel_td_check(td, td)
    swapped = swap_parallel(td, ("t0", 1, 1), 0, {"a": "x", "b": "y"})
    assert parallel_td_check(td, swapped)
    assert parallel_td_check(swapped, td)


def test_parallel_fails_on_other_carrier():
    assert not parallel_td_check(chain_td([AB]), chain_td([AB, BC]))
    assert not parallel_td_check(chain_td([AB]), chain_td([ABC]))


def test_abstraction_check():
    p, q = chain_td([AB]), chain_td([AB, BC])
    assert td_abstraction_check(p, p, "NBH")
    theta = default_theta(Jungle.of(p.carrier, q.carrier))
    assert td_abstraction_check(p, p, theta)
    assert not td_abstraction_check(p, q, theta)
    wide = build_net({"t0": sym("op", 1, 2)}, (), {("t0", IN, 1): "in", ("t0", OUT, 1): "o1", ("t0", OUT, 2): "o2"})
    assert not td_abstraction_check(p, make_td(wide, {"t0": AB}), "NBH")


def test_parallel_verdict_constant_on_class():
    p = chain_td([AB, BC])
    q = swap_parallel(p, ("t0", 1, 1), 0, {"a": "x", "b": "y"})
    others = [chain_td([AB]), chain_td([BC, AB]), chain_td([ABC, AB]), p]
    for third in others:
        assert parallel_td_check(p, third) == parallel_td_check(q, third)


@pytest.mark.parametrize("k", range(10))
def test_commutative_condition_on_corpus(k):
    r, T = macro_triples(CheckConfig(seed=k))[0]
    ok, via, direct = commutative_condition(r, T)
    assert ok, (len(via), len(direct))


@given(nets())
def test_macro_commutes_on_random_nets(n):
    ok, _, _ = commutative_condition(ABC, Jungle.of(n))
    assert ok
