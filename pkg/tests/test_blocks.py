import random
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from netrw.blocks import (
    NuoRepresentation,
    collapse,
    collapse_nbh,
    compile_nbh_to_rns,
    compile_rns_to_nbh,
    equivalence_check,
    micro_macro,
    nornuo,
    nuo_enumerate,
    nuo_invert,
    representation,
)
from netrw.checks import relabel_nbh
from netrw.corpus import chain, chain_rule, contracting_rule, cycle, micro_macro_instances, random_nbh, rns_bridge_corpus
from netrw.errors import InconsistentOccupancy, NoInducedPreimage, NotCompilable
from netrw.jungle import Jungle
from netrw.morphism import identity_nbh, make_nbh, nbh_image
from netrw.net import build_net, sym
from netrw.rewrite import make_rns, make_rule, normal_forms
from netrw.structure import connected_subsets
from netrw.transducer import symbol_net


A, B = sym("a", 1, 1), sym("b", 1, 1)


def test_single_vertex_has_only_trivial_representation():
    t = chain("a")
    reps = nuo_enumerate(t)
    assert len(reps) == 1 and reps[0].context.key() == t.key() and not reps[0].attachments


def test_chain_covers_match_direct_enumeration():
    t = chain("ab")
    whole = frozenset(t.vertices)
    cands = {frozenset(s) for s in connected_subsets(t)} | {whole}
    want = {frozenset(c) for k in (1, 2) for c in combinations(cands, k) if frozenset().union(*c) == whole}
    got = {frozenset([frozenset(r.context.vertices)] + [frozenset(a.vertices) for a in r.attachments]) for r in nuo_enumerate(t)}
    assert got == want and len(got) == 4


def test_one_block_only_trivial():
    t = chain("abb")
    assert len(nuo_enumerate(t, max_blocks=1)) == 1


def test_invert_round_trip(universe):
    for t in universe:
        for rep in nuo_enumerate(t):
            assert nuo_invert(rep).same_structure(t)
            assert nuo_invert(nornuo(rep)).same_structure(t)


def test_corrupted_occupancy():
    t = chain("a")
    with pytest.raises(InconsistentOccupancy):
        NuoRepresentation(t, chain("b"))


def test_nornuo_fixpoint_and_overlap():
    t = chain("ab")
    v0, v1 = sorted(t.vertices)
    flat = representation(t, [{v0}, {v1}])
    parts = lambda r: [p.key() for p in r.parts()]
    assert parts(nornuo(flat)) == parts(flat)
    over = representation(t, [{v0, v1}, {v1}])
    got = nornuo(over)
    assert set(got.context.vertices) == {v0}
    assert nuo_invert(got).same_structure(t)


def test_full_overlap_context_becomes_empty():
    t = chain("ab")
    got = nornuo(representation(t, [set(t.vertices), set(t.vertices)]))
    assert len(got.context) == 0
    assert nuo_invert(got).same_structure(t)


def test_identity_nbh_compiles_to_empty_system(universe):
    r = compile_nbh_to_rns(identity_nbh([symbol_net(A)]))
    assert not r.rules
    for t in list(universe)[:20]:
        assert normal_forms(r, Jungle.of(t)) == Jungle.of(t)


def test_single_relabel_compiles_to_one_rule():
    h = relabel_nbh([A], {"a": "w"})
    r = compile_nbh_to_rns(h)
    assert len(r.rules) == 1
    assert normal_forms(r, Jungle.of(chain("a"))) == nbh_image(h, chain("a")) == Jungle.of(chain("w"))


def test_overlapping_blocks_agree_on_enumeration(universe):
    z = lambda name: symbol_net(sym(name, 1, 1), "w")
    ab = build_net({"x": A, "y": B}, [(("x", 1), ("y", 1))], {("x", "in", 1): "i", ("y", "out", 1): "o"})
    h = make_nbh([(ab, [z("c")]), (symbol_net(A), [z("d")])])
    assert equivalence_check(h, compile_nbh_to_rns(h), universe).passed


def test_reused_block_letter_refused():
    h = make_nbh([(symbol_net(A), [symbol_net(B, "w")]), (symbol_net(B), [symbol_net(sym("c", 1, 1), "w")])])
    with pytest.raises(NotCompilable):
        compile_nbh_to_rns(h)


def test_identity_rules_give_identity_blocks(universe):
    h = compile_rns_to_nbh(make_rns([chain_rule("aa", "a", "a")]))
    assert all(nbh_image(h, t) == Jungle.of(t) for t in list(universe)[:20])


def test_simple_rule_becomes_block():
    h = compile_rns_to_nbh(make_rns([chain_rule("ab", "a", "b")]))
    assert len(h.blocks) == 1 and h.blocks[0].key() == chain("a").key()
    assert h.images[0][0].key() == chain("b").key()


def test_mutated_rule_is_caught(universe):
    h = relabel_nbh([A, B], {"a": "c", "b": "d"})
    r = compile_nbh_to_rns(h)
    bad = make_rns([r.rules[0], make_rule(r.rules[1].name, r.rules[1].left, symbol_net(sym("e", 1, 1), "w"))],
                   drop_links=True)
    rep = equivalence_check(h, bad, universe)
    assert not rep.passed and rep.failures()


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6))
def test_random_nbh_compiles(small_universe, seed):
    h = random_nbh(random.Random(seed))
    assert equivalence_check(h, compile_nbh_to_rns(h), small_universe).passed


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6))
def test_random_rns_decompiles(small_universe, seed):
    r = rns_bridge_corpus(seed, 1)[0]
    assert equivalence_check(compile_rns_to_nbh(r), r, small_universe).passed


def test_collapse_single_parts_keeps_shape():
    t = cycle("ab")
    parts = [{v} for v in t.vertices]
    got, _ = collapse(t, parts)
    assert len(got) == 2 and len(got.edges) == 2


def test_relabel_square_on_single_vertex():
    K = chain("a")
    w1 = collapse_nbh(K, [set(K.vertices)], "w1")
    A1, _ = collapse(K, [set(K.vertices)])
    r = contracting_rule("m", A1)
    mm = micro_macro(r, K, w1, w1)
    assert mm.commutes


def test_rule_outside_image_has_no_preimage():
    K = chain("a")
    w1 = collapse_nbh(K, [set(K.vertices)], "w1")
    with pytest.raises(NoInducedPreimage):
        micro_macro(make_rns([chain_rule("zz", "zz", "z")]).rules[0], K, w1, w1)


@settings(max_examples=10)
@given(st.integers(0, 10 ** 6))
def test_squares_commute(seed):
    for inst in micro_macro_instances(seed, 2):
        assert micro_macro(*inst).commutes
