import pytest

from netrw.abstraction import identity_relation
from netrw.checks import CheckConfig, evolution_seed, run_evolution
from netrw.corpus import chain, chain_rule
from netrw.errors import BudgetExceeded, NotDistinctive
from netrw.jungle import Jungle
from netrw.rewrite import Budget, make_rns
from netrw.solver import (
    Demands,
    Problem,
    Recognizer,
    evolve,
    n_level_solve,
    order_objects,
    replay,
    seed_state,
    solvable,
    solve,
    td_classes,
)
from netrw.transducer import chain_td, run_td

AB = chain_td([make_rns([chain_rule("ab", "a", "b")], name="ab")], name="ab")
BC = chain_td([make_rns([chain_rule("bc", "b", "c")], name="bc")], name="bc")
A_TO_C = Problem(Jungle.of(chain("a")), Recognizer.of([chain("c")]), name="a>c")


def test_recognizer_modes():
    j = Jungle.of(chain("a"), chain("b"))
    assert Recognizer.of([chain("a"), chain("b")]).accepts(j)
    assert not Recognizer.of([chain("a")]).accepts(j)
    assert Recognizer.of([chain("a")], "any").accepts(j)
    assert not Recognizer.of([chain("a")], "equal").accepts(j)
    assert not Recognizer.of([chain("a")]).accepts(Jungle())
    assert Recognizer.everything().accepts(Jungle())


def test_everything_accepting_makes_every_member_a_presolution():
    p = Problem(Jungle.of(chain("a")), Recognizer.everything(), Demands(max_depth=1))
    res = solve(p, [AB, BC])
    assert [r.path for r in res.records] == [("ab",), ("bc",)]


def test_composite_solution_at_depth_two():
    res = solve(A_TO_C, [AB, BC])
    sols = res.solutions
    assert [r.path for r in sols] == [("ab", "bc")]
    assert sols[0].depth == 2
    # independent route: run the members one after the other
    assert run_td(BC, run_td(AB, A_TO_C.subject)) == sols[0].product
    assert replay(sols[0], A_TO_C)


def test_depth_one_finds_nothing():
    p = Problem(A_TO_C.subject, A_TO_C.recognizer, Demands(max_depth=1))
    res = solve(p, [AB, BC])
    assert not res.solutions and res.exhausted


def test_macros_do_not_change_products():
    res = solve(A_TO_C, [AB, BC], with_macros=True)
    assert {r.product for r in res.solutions} == {Jungle.of(chain("c"))}


def test_order_objects():
    assert order_objects([0, 1], 1, 10) == [0, 1]
    assert len(order_objects([0, 1], 2, 10)) == 3
    with pytest.raises(BudgetExceeded):
        order_objects(list(range(12)), 2, 100)


def test_order_zero_classes():
    mothers, lib, probs = evolution_seed()
    state = seed_state(mothers, lib, probs)
    assert state.families[0] == td_classes(state, 0, [0, 1])
    assert state.reports[0].passed


def test_order_one_family():
    mothers, lib, probs = evolution_seed()
    state = seed_state(mothers, lib, probs)
    n_level_solve(state, 1, 1)
    rep = state.reports[1]
    assert rep.passed
    assert set().union(*rep.classes) == {0, 1}


def test_non_distinctive_base_refused():
    renamed = chain_td([make_rns([chain_rule("ab", "a", "b")])], op_names=["zz"])
    with pytest.raises(NotDistinctive):
        seed_state(Jungle.of(chain("a")), [AB, renamed], [A_TO_C], theta=identity_relation)


def test_orders_above_two_refused():
    mothers, lib, probs = evolution_seed()
    state = seed_state(mothers, lib, probs)
    with pytest.raises(BudgetExceeded):
        n_level_solve(state, 3, 0)


def test_zero_levels_is_the_seed():
    mothers, lib, probs = evolution_seed()
    state = evolve(seed_state(mothers, lib, probs), 0, [])
    assert len(state.trace) == 1 and state.level == 0


def test_one_step_is_monotone():
    mothers, lib, probs = evolution_seed()
    state = seed_state(mothers, lib, probs)
    before = state.solved
    assert before == solvable(probs, lib, Budget())
    evolve(state, 1, [(1, 0)])
    assert before <= state.solved
    assert solvable(probs, state.library, Budget()) <= state.solved


def test_tight_schedule_is_flagged():
    mothers, lib, probs = evolution_seed()
    state = evolve(seed_state(mothers, lib, probs), 3, [(2, 0)], library_cap=3)
    assert state.exhausted
    assert state.trace[-1].endswith("exhausted=true")


def test_trace_replays():
    a = run_evolution(CheckConfig())
    b = run_evolution(CheckConfig())
    assert a.trace == b.trace
    assert all(line.startswith("level=") for line in a.trace)
