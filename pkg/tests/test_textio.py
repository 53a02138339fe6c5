import pytest
from hypothesis import given

from netrw.checks import relabel_nbh
from netrw.corpus import chain, cycle, oracle_corpus, rns_bridge_corpus
from netrw.errors import ParseError, ValidationError
from netrw.jungle import Jungle
from netrw.net import IN, build_net, relabel_ids, sym
from netrw.rewrite import normal_forms
from netrw.solver import Recognizer
from netrw.textio import (
    parse_jungle,
    parse_nbh,
    parse_net,
    parse_nets,
    parse_problem,
    parse_rns,
    parse_td,
    serialize_nbh,
    serialize_net,
    serialize_nets,
    serialize_rns,
    serialize_td,
)
from netrw.transducer import run_td

from strategies import nets

SINGLE = """netrw-nets v1
node v1 a in=2 out=1
free v1.in1 = x
free v1.in2 = y
free v1.out1 = z
"""


def test_single_vertex_document():
    n = parse_net(SINGLE)
    assert list(n.vertices) == ["v1"] and n.vertices["v1"] == sym("a", 2, 1)
    assert n.dangling[("v1", IN, 2)] == "y"


def test_self_loop_document():
    n = parse_net("netrw-nets v1\nnode v1 a in=1 out=1\nedge v1.out1 -> v1.in1\n")
    assert n.key() == cycle("a").key()


def test_malformed_port_has_location():
    with pytest.raises(ParseError) as e:
        parse_net("netrw-nets v1\nnode v1 a in=1 out=1\nedge v1.ou1 -> v1.in1\n")
    assert e.value.line == 3 and e.value.column > 0


def test_bad_header():
    with pytest.raises(ParseError):
        parse_net("netrw-rns v1\n")


def test_double_occupancy_is_validation_error():
    text = "netrw-nets v1\nnode v a in=1 out=1\nnode w a in=1 out=1\nedge v.out1 -> w.in1\nedge w.out1 -> w.in1\n"
    with pytest.raises(ValidationError):
        parse_net(text)


def test_comments_and_blank_lines():
    n = parse_net("# a net\nnetrw-nets v1\n\nnode v a in=1 out=1  # one vertex\n")
    assert len(n) == 1


def test_round_trip_on_enumeration(universe):
    for n in universe:
        text = serialize_net(n)
        back = parse_net(text)
        assert back.key() == n.key()
        assert serialize_net(back) == text


@given(nets())
def test_isomorphic_inputs_same_document(n):
    m = relabel_ids(n, {v: "z" + v for v in n.vertices})
    m = build_net(m.vertices, m.edges, {p: "q" + l for p, l in m.dangling.items()})
    assert serialize_net(m) == serialize_net(n)


def test_jungle_document():
    j = Jungle.of(chain("ab"), cycle("a"))
    assert parse_jungle(serialize_nets(list(j))) == j
    assert len(parse_nets(serialize_nets(list(j)))) == 2


def test_rns_round_trip():
    for r in oracle_corpus(0, 20) + rns_bridge_corpus(0, 20):
        if r.conditions.custom_predicates:
            continue
        back = parse_rns(serialize_rns(r))
        assert back.key() == r.key()
        assert serialize_rns(back) == serialize_rns(r)
        S = Jungle.of(chain("ab"))
        assert normal_forms(back, S) == normal_forms(r, S)


def test_nbh_round_trip():
    h = relabel_nbh([sym("a", 1, 1), sym("b", 1, 1)], {"a": "c", "b": "d"})
    back = parse_nbh(serialize_nbh(h))
    assert [d.key() for d in back.blocks] == [d.key() for d in h.blocks]
    assert serialize_nbh(back) == serialize_nbh(h)


def test_td_round_trip():
    from netrw.checks import td_corpus

    for td in td_corpus():
        back = parse_td(serialize_td(td))
        assert serialize_td(back) == serialize_td(td)
        S = Jungle.of(chain("a"), chain("ab"))
        assert run_td(back, S) == run_td(td, S)


def test_problem_document():
    text = """netrw-prob v1
name: a-to-c
subject:
node v a in=1 out=1
final:
node w c in=1 out=1
mode: any
max-depth: 3
"""
    p = parse_problem(text)
    assert p.name == "a-to-c" and p.demands.max_depth == 3
    assert p.subject == Jungle.of(chain("a"))
    assert p.recognizer == Recognizer.of([chain("c")], "any")


def test_problem_depth_must_be_integer():
    with pytest.raises(ParseError):
        parse_problem("netrw-prob v1\nmax-depth: two\n")
