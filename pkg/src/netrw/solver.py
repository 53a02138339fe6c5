"""Problems, presolution search, layered abstraction algebras and evolution.

A problem pairs a subject jungle with a recognizer and a set of demands.  A
transducer whose product on the subject is accepted is a presolution; it is a
solution when the demands hold as well.  Evolution grows a library of
transducers level by level and reports one trace line per level.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .abstraction import AbstractionRelation, Partition, default_theta, multidim_theta
from .errors import BudgetExceeded, NotDistinctive
from .jungle import Jungle
from .net import Net
from .rewrite import DEFAULT_BUDGET, Budget
from .transducer import Macro, Transducer, run_td, td_compose, uma_build


# ---------------------------------------------------------------------------
# recognizers and problems


@dataclass(frozen=True)
class Recognizer:
    """Finite-state acceptor over jungles.

    Each net is sent to the state of its canonical form when that form is
    final and to the sink otherwise.  ``mode`` types the final condition:
    ``subset`` accepts nonempty jungles of final nets only, ``any`` accepts
    when some final net appears, ``equal`` wants exactly the final set and
    ``all`` accepts everything.
    """

    final: FrozenSet[bytes] = frozenset()
    mode: str = "subset"

    @classmethod
    def of(cls, nets: Iterable[Net], mode: str = "subset") -> "Recognizer":
        return cls(frozenset(n.key() for n in nets), mode)

    @classmethod
    def everything(cls) -> "Recognizer":
        return cls(frozenset(), "all")

    def state(self, net: Net) -> Optional[bytes]:
        k = net.key()
        return k if k in self.final else None

    def accepts(self, j: Jungle) -> bool:
        if self.mode == "all":
            return True
        states = [self.state(n) for n in j]
        if self.mode == "any":
            return any(s is not None for s in states)
        if self.mode == "equal":
            return set(states) == set(self.final) and None not in states
        return bool(states) and None not in states


Demand = Callable[[Transducer, Jungle], bool]


@dataclass(frozen=True)
class Demands:
    max_depth: int = 2
    max_product: Optional[int] = None
    custom: Tuple[Tuple[str, Demand], ...] = ()

    def check(self, td: Transducer, depth: int, product_: Jungle) -> bool:
        if depth > self.max_depth:
            return False
        if self.max_product is not None and len(product_) > self.max_product:
            return False
        return all(fn(td, product_) for _, fn in self.custom)


@dataclass(frozen=True)
class Problem:
    subject: Jungle
    recognizer: Recognizer
    demands: Demands = Demands()
    name: str = ""


@dataclass
class SolutionRecord:
    td: Transducer
    product: Jungle
    demands_met: bool
    depth: int
    path: Tuple[str, ...]
    exhausted: bool = False

    @property
    def is_solution(self) -> bool:
        return self.demands_met and not self.exhausted


@dataclass
class SolveResult:
    records: List[SolutionRecord]
    exhausted: bool

    @property
    def solutions(self) -> List[SolutionRecord]:
        return [r for r in self.records if r.is_solution]


def _candidates(library: Sequence[Transducer], with_macros: bool) -> List[Tuple[str, Transducer]]:
    out = []
    for k, td in enumerate(library):
        label = td.name or f"td{k}"
        out.append((label, td))
        if with_macros and not any(isinstance(op, Macro) for ops in td.attach.values() for op in ops):
            try:
                out.append((f"uma({label})", uma_build(td, ["UPRNS"])))
            except Exception:
                pass
    return out


def solve(p: Problem, library: Sequence[Transducer], budget: Budget = DEFAULT_BUDGET, with_macros: bool = False) -> SolveResult:
    """Breadth-first search over compositions of library members.

    Compositions of depth ``d`` are visited in lexicographic order of their
    library indices.  Products are computed incrementally along the path.
    """
    cands = _candidates(library, with_macros)
    records: List[SolutionRecord] = []
    exhausted = False
    layer: List[Tuple[Tuple[int, ...], Transducer, Jungle]] = [((), None, p.subject)]
    for depth in range(1, p.demands.max_depth + 1):
        nxt = []
        for path, td, prod in layer:
            for k, (label, c) in enumerate(cands):
                new_td = c if td is None else td_compose(td, c)
                new_prod = run_td(c, prod, budget)
                nxt.append((path + (k,), new_td, new_prod))
                if new_prod.exhausted:
                    exhausted = True
                if p.recognizer.accepts(new_prod):
                    labels = tuple(cands[i][0] for i in path + (k,))
                    records.append(
                        SolutionRecord(new_td, new_prod, p.demands.check(new_td, depth, new_prod), depth, labels, new_prod.exhausted)
                    )
        if len(nxt) > budget.max_jungle:
            exhausted = True
            break
        layer = nxt
    if not any(r.is_solution for r in records) and cands:
        exhausted = True
    return SolveResult(records, exhausted)


def replay(record: SolutionRecord, p: Problem, budget: Budget = DEFAULT_BUDGET) -> bool:
    """The stored product equals a fresh run of the stored transducer."""
    return run_td(record.td, p.subject, budget) == record.product


# ---------------------------------------------------------------------------
# quotient relation


def quotient_relation(universe: Sequence, coarse: Sequence[FrozenSet], fine: Sequence[FrozenSet],
                      f: Callable[[FrozenSet], FrozenSet]) -> List[FrozenSet]:
    """Fine classes lying inside the image of some coarse class under ``f``.

    ``fine`` must refine ``coarse``; the result lists, for every coarse class
    ``E``, the fine classes ``G`` with ``G`` contained in ``f(E)``.
    """
    for g in fine:
        if not any(g <= e for e in coarse):
            raise ValueError("fine relation does not refine the coarse one")
    out = []
    for e in coarse:
        img = f(e)
        out.extend(g for g in fine if g <= img and g not in out)
    return out


# ---------------------------------------------------------------------------
# layered relations on transducers


def td_key(td: Transducer) -> tuple:
    def op_key(op):
        if isinstance(op, Macro):
            return ("macro", op.w.key(), op.r_m.key(), op.w_o.key())
        return ("rns", op.key(), op.conditions.drop_links)

    attach = tuple(sorted((k, tuple(sorted(map(repr, map(op_key, ops))))) for k, ops in td.attach.items()))
    return (td.carrier.key(), attach, td.mode)


@dataclass
class LevelReport:
    order: int
    k: int
    classes: List[FrozenSet[int]]
    inclusions: List[Tuple[str, bool]]

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.inclusions)


@dataclass
class EvolutionState:
    level: int
    mothers: Jungle
    library: List[Transducer]
    problems: List[Problem]
    families: Dict[int, List[FrozenSet[int]]] = field(default_factory=dict)
    solution_families: Dict[int, List[FrozenSet[int]]] = field(default_factory=dict)
    reports: Dict[int, LevelReport] = field(default_factory=dict)
    relation_cache: Dict[Tuple[int, int], FrozenSet[Tuple[bytes, bytes]]] = field(default_factory=dict)
    solved: FrozenSet[int] = frozenset()
    trace: List[str] = field(default_factory=list)
    exhausted: bool = False
    theta: Optional[Callable[[Jungle], AbstractionRelation]] = None


def _carrier_universe(tds: Sequence[Transducer]) -> Jungle:
    return Jungle(td.carrier for td in tds)


def _base_relation(state: EvolutionState, universe: Jungle) -> AbstractionRelation:
    return state.theta(universe) if state.theta else default_theta(universe)


def _carrier_relation(state: EvolutionState, k: int, tds: Sequence[Transducer]) -> AbstractionRelation:
    universe = _carrier_universe(tds)
    key = (k, hash(tuple(universe.keys())))
    base = _base_relation(state, universe)
    if key not in state.relation_cache:
        state.relation_cache[key] = multidim_theta(universe, k, [base]).relation
    return AbstractionRelation("NBH", universe, state.relation_cache[key])


def require_distinct(universe: Jungle, rel: AbstractionRelation) -> None:
    part = Partition(rel.classes())
    if not part.is_distinctive():
        raise NotDistinctive("base relation separates nets that differ only by symbol names")


def td_classes(state: EvolutionState, k: int, members: Sequence[int]) -> List[FrozenSet[int]]:
    """Classes of library members whose carriers are related at level ``k``."""
    tds = [state.library[i] for i in members]
    rel = _carrier_relation(state, k, state.library)
    groups: Dict[FrozenSet[bytes], List[int]] = {}
    for i, td in zip(members, tds):
        groups.setdefault(frozenset(rel.class_of(td.carrier).keys()), []).append(i)
    return sorted((frozenset(g) for g in groups.values()), key=sorted)


def _flatten(obj) -> FrozenSet[int]:
    if isinstance(obj, int):
        return frozenset([obj])
    out = frozenset()
    for x in obj:
        out |= _flatten(x)
    return out


def order_objects(members: Sequence[int], n: int, cap: int) -> List:
    """Members of the iterated power set on which the order-``n`` relation lives."""
    objs: List = list(members)
    for _ in range(max(n - 1, 0)):
        nxt = []
        for size in range(1, len(objs) + 1):
            for c in combinations(objs, size):
                nxt.append(frozenset(c))
                if len(nxt) > cap:
                    raise BudgetExceeded("power set beyond budget")
        objs = nxt
    return objs


def n_level_solve(state: EvolutionState, n: int, k_n: int, budget: Budget = DEFAULT_BUDGET) -> EvolutionState:
    """Compute the order-``n`` class family and verify its closure inclusions.

    Objects at order ``n`` are the library members (``n <= 1``) or the
    nonempty subsets of the order below; two objects are related when their
    flattened member sets meet the same level-``k_n`` transducer classes.
    """
    if n > 2:
        raise BudgetExceeded("orders above 2 are outside the desk-scale budget")
    members = list(range(len(state.library)))
    base = td_classes(state, k_n, members)
    rel0 = _carrier_relation(state, 0, state.library)
    require_distinct(rel0.universe, rel0)
    class_of = {i: c for c in base for i in c}
    objs = order_objects(members, n, budget.max_jungle)
    groups: Dict[FrozenSet[FrozenSet[int]], List] = {}
    for o in objs:
        sig = frozenset(class_of[i] for i in _flatten(o))
        groups.setdefault(sig, []).append(o)
    classes = sorted((_flatten(g) for g in groups.values()), key=sorted)
    inclusions = []
    # closure under composition: composites of two classes fall in one class
    below = state.families.get(n - 1, base) if n else base
    for c, d in product(below, base):
        comps = [td_compose(state.library[p], state.library[q]) for p in sorted(c) for q in sorted(d)]
        comps = [t for t in comps if t is not None]
        universe = _carrier_universe(state.library + comps)
        key_rel = _base_relation(state, universe)
        rel = AbstractionRelation("NBH", universe, multidim_theta(universe, k_n, [key_rel]).relation)
        targets = {frozenset(rel.class_of(t.carrier).keys()) for t in comps}
        inclusions.append((f"compose:{sorted(c)}x{sorted(d)}", len(targets) <= 1))
    # each lower family lies inside one class of this order
    for c in state.families.get(n - 1, []):
        inclusions.append((f"refine:{sorted(c)}", any(c <= x for x in classes)))
    state.families[n] = classes
    prev = state.solution_families.get(n - 1, [])
    state.solution_families[n] = sorted(set(prev) | set(classes), key=sorted)
    state.reports[n] = LevelReport(n, k_n, classes, inclusions)
    return state


# ---------------------------------------------------------------------------
# evolution


def solvable(problems: Sequence[Problem], library: Sequence[Transducer], budget: Budget) -> FrozenSet[int]:
    """Indices of problems with a depth-one solution in ``library``."""
    out = set()
    for k, p in enumerate(problems):
        for td in library:
            prod = run_td(td, p.subject, budget)
            if not prod.exhausted and p.recognizer.accepts(prod) and p.demands.check(td, 1, prod):
                out.add(k)
                break
    return frozenset(out)


def seed_state(mothers: Jungle, library: Sequence[Transducer], problems: Sequence[Problem],
               k0: int = 0, budget: Budget = DEFAULT_BUDGET, theta=None) -> EvolutionState:
    state = EvolutionState(0, mothers, list(library), list(problems), theta=theta)
    n_level_solve(state, 0, k0, budget)
    state.solved = solvable(state.problems, state.library, budget)
    state.trace.append(_trace_line(state, 0))
    return state


def _trace_line(state: EvolutionState, order: int) -> str:
    return (
        f"level={state.level} order={order} families={len(state.families.get(order, []))} "
        f"solutions={len(state.solved)} exhausted={str(state.exhausted).lower()}"
    )


def evolve(state: EvolutionState, m_max: int, schedule: Sequence[Tuple[int, int]], budget: Budget = DEFAULT_BUDGET,
           library_cap: int = 64) -> EvolutionState:
    """Grow the library level by level.

    At level ``m`` with schedule entry ``(n, k)`` every class representative of
    the current solution families is composed with every library member; new
    transducers join the library, the order-``n`` family is recomputed and the
    solvable problems are recounted.
    """
    known = {td_key(t) for t in state.library}
    for m in range(1, m_max + 1):
        n, k = schedule[min(m - 1, len(schedule) - 1)] if schedule else (1, 0)
        state.level = m
        reps = sorted({min(c) for fam in state.solution_families.values() for c in fam})
        fresh = []
        for i in reps:
            for j in range(len(state.library)):
                t = td_compose(state.library[i], state.library[j], f"{state.library[i].name}.{state.library[j].name}")
                kk = td_key(t)
                if kk not in known:
                    known.add(kk)
                    fresh.append(t)
        room = library_cap - len(state.library)
        if len(fresh) > room:
            fresh = fresh[: max(room, 0)]
            state.exhausted = True
        state.library.extend(fresh)
        try:
            n_level_solve(state, n, k, budget)
        except BudgetExceeded:
            state.exhausted = True
            state.trace.append(_trace_line(state, n))
            break
        state.solved = state.solved | solvable(state.problems, state.library, budget)
        state.trace.append(_trace_line(state, n))
    return state
