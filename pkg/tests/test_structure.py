from itertools import combinations

import pytest
from hypothesis import given

from netrw.corpus import chain, cycle
from netrw.errors import GluingConflict, InvalidPosition
from netrw.net import IN, OUT, build_net, induced_subnet, sym
from netrw.oracle import naive_link_counts
from netrw.structure import Position, connected_subsets, enclosures, link_stats, net_union, occurrence_stats, positions_of

from strategies import nets

A = sym("a", 1, 1)


def test_whole_net_position():
    n = chain("ab")
    assert positions_of(n, n) == [Position.of(n.vertices)]


def test_two_occurrences_of_a_vertex():
    host = chain("aba")
    pat = build_net({"x": A})
    found = positions_of(host, pat)
    # brute force: every single vertex with symbol a
    want = sorted(Position.of([v]) for v, s in host.vertices.items() if s == A)
    assert found == want and len(found) == 2


def test_absent_pattern():
    assert positions_of(chain("aa"), build_net({"x": sym("b", 1, 1)})) == []


def test_enclosures_counts():
    assert len(enclosures(chain("a"))) == 1
    assert len(enclosures(chain("ab"))) == 3
    assert len(enclosures(cycle("a"))) == 1


@given(nets())
def test_connected_subsets_brute_force(n):
    vids = sorted(n.vertices)
    want = set()
    for k in range(1, len(vids) + 1):
        for combo in combinations(vids, k):
            if induced_subnet(n, combo).is_connected():
                want.add(frozenset(combo))
    assert set(connected_subsets(n)) == want


def test_isolated_occurrence_orn():
    n = build_net({"v": sym("p", 2, 1)})
    st = link_stats(n, n, Position.of(["v"]))
    assert (st.ilc, st.olc, st.orn) == (0, 0, 3)


def test_orn_with_inward_link():
    host = chain("ab")
    occ = [v for v, s in host.vertices.items() if s.name == "b"]
    st = link_stats(induced_subnet(host, occ), host, Position.of(occ))
    assert st.unoccupied == 1 and st.ilc == 1 and st.orn == 2
    p = sym("p", 2, 1)
    host = build_net({"u": A, "v": p}, [(("u", 1), ("v", 1))])
    st = occurrence_stats(host, ["v"])
    assert (st.unoccupied, st.ilc, st.orn) == (2, 1, 3)


def test_whole_occurrence_has_no_crossings():
    n = cycle("ab")
    st = occurrence_stats(n, n.vertices)
    assert st.ilc == st.olc == 0


def test_wrong_position_rejected():
    n = chain("ab")
    with pytest.raises(InvalidPosition):
        link_stats(build_net({"x": sym("c", 1, 1)}), n, Position.of(["v0"]))


@given(nets())
def test_link_counts_match_oracle(n):
    for occ in connected_subsets(n):
        st = occurrence_stats(n, occ)
        assert (st.ilc, st.olc, st.unoccupied) == naive_link_counts(n, occ)


def test_union_identity_and_glue():
    n = chain("ab")
    assert net_union([n]).key() == n.key()
    a = build_net({"u": A}, (), {("u", IN, 1): "i", ("u", OUT, 1): "o"})
    b = build_net({"v": sym("b", 1, 1)}, (), {("v", IN, 1): "i", ("v", OUT, 1): "o"})
    glued = net_union([a, b], [(("u", OUT, 1), ("v", IN, 1))])
    assert glued.key() == n.key()


def test_conflicting_glue():
    a = build_net({"u": A, "v": A, "w": A})
    with pytest.raises(GluingConflict):
        net_union([a], [(("u", OUT, 1), ("v", IN, 1)), (("u", OUT, 1), ("w", IN, 1))])
