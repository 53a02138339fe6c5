from itertools import product

import pytest
from hypothesis import given, strategies as st

from netrw.checks import relabel_nbh
from netrw.corpus import chain, cycle, injective_anbh
from netrw.errors import NotReversible
from netrw.jungle import Jungle, union_all
from netrw.morphism import (
    NetHomomorphism,
    apply_homomorphism,
    apply_substitution,
    classify_nbh,
    identity_nbh,
    invert_anbh,
    link_formula,
    make_nbh,
    nbh_image,
    new_link_count,
    placeholder,
)
from netrw.net import IN, OUT, build_net, empty_net, frontier, rename_symbols, sym
from netrw.rewrite import Fragment, NetSubstitution
from netrw.transducer import symbol_net

A, B = sym("a", 1, 1), sym("b", 1, 1)


def image_of(s, name):
    t = sym(name, len(s.ins), len(s.outs))
    return build_net({"u": t}, (), {p: placeholder(p) for p in t.ports("u")})


def test_identity_homomorphism():
    t = chain("ab")
    h = NetHomomorphism.identity([A, B])
    assert apply_homomorphism(h, t) == Jungle.of(t)


def test_relabeling_homomorphism():
    h = NetHomomorphism({A: (image_of(A, "w"),)})
    got = apply_homomorphism(h, chain("a"))
    assert got == Jungle.of(chain("w"))


def test_two_images_per_vertex_against_choice_functions():
    h = NetHomomorphism({A: (image_of(A, "w1"), image_of(A, "w2"))})
    t = chain("aa")
    got = apply_homomorphism(h, t)
    # every choice function, relabelled directly and deduplicated
    vids = sorted(t.vertices)
    want = set()
    for pick in product(["w1", "w2"], repeat=2):
        verts = {v: sym(n, 1, 1) for v, n in zip(vids, pick)}
        want.add(build_net(verts, t.edges, t.dangling).key())
    assert set(got.keys()) == want and len(want) == 4


def test_substitution_without_frontiers():
    t = chain("ab")
    assert apply_substitution(NetSubstitution({}), t).key() == t.key()


def test_one_variable_substitution():
    x = frontier("x", OUT)
    t = build_net({"f": x, "v": A}, [(("f", 1), ("v", 1))], {("v", OUT, 1): "o"})
    frag = Fragment(build_net({"u": B}, (), {("u", IN, 1): "i", ("u", OUT, 1): "p"}), ("u", OUT, 1))
    got = apply_substitution(NetSubstitution({"x": frag}), t)
    assert got.key() == chain("ba").key()


def test_loop_forming_substitution():
    x = frontier("x", OUT)
    t = build_net({"f": x, "v": A}, [(("f", 1), ("v", 1))], {("v", OUT, 1): "o"})
    frag = Fragment(build_net({"u": B}, (), {("u", IN, 1): "i", ("u", OUT, 1): "p"}), ("u", OUT, 1),
                    back_links=((("u", IN, 1), ("v", OUT, 1)),))
    got = apply_substitution(NetSubstitution({"x": frag}), t)
    assert got.key() == cycle("ab").key()


def test_relabel_is_alphabetic():
    h = relabel_nbh([A, B], {"a": "c", "b": "d"})
    flags = classify_nbh(h, [chain("ab")])
    assert {"AlpNBH", "AlpUnexNBH", "ANBH", "ESNBH", "LSNBH"} <= flags


def test_deleting_image_is_not_anbh():
    h = make_nbh([(symbol_net(A), [empty_net()])])
    assert "ANBH" not in classify_nbh(h, [chain("a")])


def test_dropping_a_linkage_breaks_link_saving():
    keep = build_net({"w": sym("c", 1, 0)}, (), {("w", IN, 1): "i1"})
    h = make_nbh([(symbol_net(A), [keep])])
    assert "LSNBH" not in classify_nbh(h, [chain("a")])
    assert "LSNBH" in classify_nbh(relabel_nbh([A], {"a": "c"}), [chain("a")])


def test_nbh_image_relabel():
    h = relabel_nbh([A, B], {"a": "c", "b": "d"})
    assert nbh_image(h, chain("ab")) == Jungle.of(chain("cd"))
    assert nbh_image(h, cycle("aab")) == Jungle.of(cycle("ccd"))


def test_invert_identity(universe):
    inv = invert_anbh(identity_nbh([symbol_net(A)]), [chain("a")])
    for t in universe:
        assert nbh_image(inv, t) == Jungle.of(t)


def test_invert_relabel_round_trip(universe):
    h = relabel_nbh([A, B], {"a": "c", "b": "d"})
    inv = invert_anbh(h, list(universe))
    for t in universe:
        back = union_all(nbh_image(inv, u) for u in nbh_image(h, t))
        assert back == Jungle.of(t)
        assert rename_symbols(next(iter(nbh_image(h, t))), {"c": "a", "d": "b"}).key() == t.key()


def test_invert_rejects_shared_image():
    z = symbol_net(sym("z", 1, 1), "w")
    h = make_nbh([(symbol_net(A), [z]), (symbol_net(B), [z])])
    with pytest.raises(NotReversible):
        invert_anbh(h, [chain("a")])


@given(st.randoms(use_true_random=False))
def test_random_injective_anbh_inverts(rnd):
    h = injective_anbh(rnd)
    t = chain("ab")
    inv = invert_anbh(h, [t])
    assert union_all(nbh_image(inv, u) for u in nbh_image(h, t)) == Jungle.of(t)


P = sym("p", 2, 1)
H = relabel_nbh([A, P], {"a": "c", "p": "q"})


def test_single_member_q_gains_nothing():
    t = chain("aa")
    cover = [frozenset(t.vertices)]
    assert new_link_count(H, t, cover, cover) == 0 == link_formula(t, cover)


def test_shared_rank_three_vertex():
    t = build_net({"u": A, "v": P, "w": A}, [(("u", 1), ("v", 1)), (("w", 1), ("v", 2))])
    Q = [{"u", "v"}, {"w", "v"}]
    assert new_link_count(H, t, Q, Q) == 3


def test_three_members_share_rank_two():
    t = build_net({"x": A, "v": A, "y": A}, [(("x", 1), ("v", 1)), (("v", 1), ("y", 1))])
    Q = [{"x", "v"}, {"v", "y"}, {"v"}]
    assert new_link_count(H, t, Q, Q) == 4
