from itertools import product

import pytest
from hypothesis import given, strategies as st

from netrw.corpus import chain, chain_rule, oracle_corpus
from netrw.jungle import Jungle
from netrw.net import build_net, sym
from netrw.oracle import (
    EnumerationSpec,
    brute_isomorphic,
    enumerate_nets,
    naive_normal_forms,
    naive_rewrite_closure,
    naive_successors,
    oracle_compare,
)
from netrw.rewrite import Budget, closure, make_rns, normal_forms, rewrite_net

from strategies import nets

A = sym("a", 1, 1)


def test_single_unary_vertex():
    got = enumerate_nets(EnumerationSpec(alphabet=(A,), max_vertices=1))
    assert len(got) == 2
    assert {len(n.edges) for n in got} == {0, 1}


def test_zero_vertices():
    assert len(enumerate_nets(EnumerationSpec(max_vertices=0))) == 0


def test_enumeration_deterministic():
    a = enumerate_nets(EnumerationSpec())
    b = enumerate_nets(EnumerationSpec())
    assert a.keys() == b.keys()


def test_two_vertex_enumeration_by_brute_force():
    # every symbol choice and every partial out->in matching, deduplicated
    # by the brute-force isomorphism test
    syms = [A, sym("b", 1, 1)]
    reps = []
    for k in (1, 2):
        ids = [f"v{i}" for i in range(k)]
        for choice in product(syms, repeat=k):
            outs = [(v, 1) for v in ids]
            for targets in product([None] + ids, repeat=k):
                used = [t for t in targets if t is not None]
                if len(set(used)) != len(used):
                    continue
                edges = [((o[0], 1), (t, 1)) for o, t in zip(outs, targets) if t is not None]
                n = build_net(dict(zip(ids, choice)), edges)
                if not any(brute_isomorphic(n, m) for m in reps):
                    reps.append(n)
    got = enumerate_nets(EnumerationSpec(max_vertices=2))
    assert len(got) == len(reps)
    assert set(got.keys()) == {n.key() for n in reps}


def test_identity_system():
    S = Jungle.of(chain("ab"))
    assert naive_rewrite_closure(make_rns([]), S) == S


def test_loop_flags_match():
    loop = make_rns([chain_rule("l", "a", "a")])
    S = Jungle.of(chain("a"))
    assert oracle_compare(normal_forms(loop, S), naive_normal_forms(loop, S)).passed
    grow = make_rns([chain_rule("g", "a", "aa")])
    b = Budget(max_vertices=3)
    eng, ora = closure(grow, S, b), naive_rewrite_closure(grow, S, b)
    assert eng.exhausted and ora.exhausted and oracle_compare(eng, ora).passed


def test_compare_verdicts():
    j = Jungle.of(chain("a"))
    assert oracle_compare(j, j).passed
    extra = oracle_compare(j | Jungle.of(chain("b")), j)
    assert not extra.passed and extra.diffs[0].startswith("engine-only")
    flag = oracle_compare(j.flagged(True), j)
    assert not flag.passed and "exhausted" in flag.diffs[0]


CORPUS = [r for r in oracle_corpus(0, 40)]


@given(nets(), st.sampled_from(CORPUS))
def test_successors_agree(n, r):
    assert Jungle(rewrite_net(r, n)) == Jungle(naive_successors(r, n))


@pytest.mark.parametrize("k", range(0, 40, 4))
def test_corpus_agreement(k, small_universe):
    r = CORPUS[k]
    for t in small_universe:
        S = Jungle.of(t)
        assert oracle_compare(closure(r, S), naive_rewrite_closure(r, S)).passed
        assert oracle_compare(normal_forms(r, S), naive_normal_forms(r, S)).passed
