"""The acceptance checks, shared by the command line and the test suite.

Every check returns a :class:`CheckResult`; ``line()`` gives the one-line
``PASS|FAIL <id> ...`` summary.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence

from .abstraction import (
    KINDS,
    AbstractionRelation,
    Partition,
    PartiallyQuotientAlgebra,
    cardinality_bound,
    center_uniqueness,
    check_equivalence_laws,
    check_partially_quotient,
    default_centers,
    default_theta,
    from_key,
    identity_relation,
    induced_quotient,
    multidim_theta,
    representative_quotient,
    sisters_check,
    sisters_relation,
)
from .blocks import compile_nbh_to_rns, compile_rns_to_nbh, equivalence_check, micro_macro
from .corpus import (
    chain,
    chain_rule,
    cycle,
    injective_anbh,
    micro_macro_instances,
    oracle_corpus,
    random_nbh,
    rns_bridge_corpus,
)
from .jungle import Jungle, union_all
from .morphism import invert_anbh, link_formula, make_nbh, nbh_image, new_link_count
from .net import Net, Symbol, build_net, rename_symbols, sym
from .oracle import EnumerationSpec, enumerate_nets, naive_normal_forms, naive_rewrite_closure, oracle_compare
from .rewrite import DEFAULT_BUDGET, RNS, Budget, closure, make_rns, make_rule, normal_forms, rename_rns, validate_uprns
from .solver import td_key
from .structure import connected_subsets
from .transducer import (
    chain_td,
    commutative_condition,
    parallel_td_check,
    relabeling_rns,
    rns_symbols,
    symbol_net,

)


@dataclass
class CheckConfig:
    seed: int = 0
    bound: int = 3
    budget: Budget = DEFAULT_BUDGET
    scale: float = 1.0

    def count(self, n: int) -> int:
        return max(1, int(round(n * self.scale)))


@dataclass
class CheckResult:
    id: str
    title: str
    passed: bool
    total: int
    failures: int
    seconds: float = 0.0
    detail: List[str] = field(default_factory=list)
    limit_seconds: Optional[float] = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.id} {self.total - self.failures}/{self.total} {self.seconds:.1f}s"


def universe(cfg: CheckConfig) -> Jungle:
    return enumerate_nets(EnumerationSpec(max_vertices=cfg.bound))


def _result(cid, title, total, fails, detail, start, limit=None, extra_ok=True) -> CheckResult:
    secs = time.perf_counter() - start
    ok = fails == 0 and extra_ok and (limit is None or secs < limit)
    if limit is not None and secs >= limit:
        detail = detail + [f"runtime {secs:.1f}s over {limit:.0f}s"]
    return CheckResult(cid, title, ok, total, fails, secs, detail[:20], limit)


# ---------------------------------------------------------------------------
# block homomorphisms and rule systems


def check_nbh_to_rns(cfg: CheckConfig) -> CheckResult:
    start = time.perf_counter()
    nets = list(universe(cfg))
    rng = random.Random(cfg.seed)
    total = fails = 0
    detail = []
    for k in range(cfg.count(50)):
        h = random_nbh(rng)
        r = compile_nbh_to_rns(h)
        rep = equivalence_check(h, r, nets, cfg.budget)
        total += len(rep.verdicts)
        bad = rep.failures()
        fails += len(bad)
        if bad:
            detail.append(f"nbh{k}: {len(bad)} nets differ, first {bad[0][1]}")
    return _result("nbh-to-rns", "block homomorphism equals its compiled rule system", total, fails, detail, start, 60.0)


def check_rns_to_nbh(cfg: CheckConfig) -> CheckResult:
    start = time.perf_counter()
    nets = list(universe(cfg))
    total = fails = 0
    detail = []
    for k, r in enumerate(rns_bridge_corpus(cfg.seed, cfg.count(50))):
        h = compile_rns_to_nbh(r)
        rep = equivalence_check(h, r, nets, cfg.budget)
        total += len(rep.verdicts)
        bad = rep.failures()
        fails += len(bad)
        if bad:
            detail.append(f"rns{k}: {len(bad)} nets differ, first {bad[0][1]}")
    return _result("rns-to-nbh", "rule system equals its block homomorphism", total, fails, detail, start)


def check_inverse_anbh(cfg: CheckConfig) -> CheckResult:
    start = time.perf_counter()
    nets = list(universe(cfg))
    rng = random.Random(cfg.seed)
    total = fails = 0
    detail = []
    for k in range(cfg.count(30)):
        h = injective_anbh(rng)
        inv = invert_anbh(h, nets)
        for t in nets:
            total += 1
            back = union_all(nbh_image(inv, u, cfg.budget) for u in nbh_image(h, t, cfg.budget))
            if back != Jungle.of(t):
                fails += 1
                detail.append(f"anbh{k}: {len(back)} preimages for one net")
    return _result("inverse-anbh", "inverse homomorphism fixes every preimage", total, fails, detail, start)


def relabel_nbh(symbols: Sequence[Symbol], mapping: Dict[str, str]):
    pairs = [(symbol_net(s), [symbol_net(Symbol(mapping[s.name], s.ins, s.outs), "w")]) for s in symbols]
    return make_nbh(pairs, "relabel")


def link_instances(cfg: CheckConfig, limit: int = 400):
    """(t, cover, Q) triples: covers of connected subsets with overlaps."""
    out = []
    for t in universe(cfg):
        if len(t) < 2 or not t.is_connected():
            continue
        subsets = sorted((frozenset(s) for s in connected_subsets(t)), key=lambda s: (len(s), sorted(s)))
        whole = frozenset(t.vertices)
        for size in (2, 3):
            for cover in combinations(subsets, size):
                if frozenset().union(*cover) != whole or whole in cover:
                    continue
                for qs in range(2, size + 1):
                    for Q in combinations(cover, qs):
                        if frozenset.intersection(*Q):
                            out.append((t, list(cover), list(Q)))
                            if len(out) >= limit:
                                return out
    return out


def check_link_formula(cfg: CheckConfig) -> CheckResult:
    start = time.perf_counter()
    h = relabel_nbh([sym("a", 1, 1), sym("b", 1, 1)], {"a": "c", "b": "d"})
    insts = link_instances(cfg, max(cfg.count(200), 100))
    fails = 0
    detail = []
    for t, cover, Q in insts:
        got, want = new_link_count(h, t, cover, Q), link_formula(t, Q)
        if got != want:
            fails += 1
            detail.append(f"{sorted(map(sorted, Q))}: counted {got}, formula {want}")
    ok = len(insts) >= 100
    if not ok:
        detail.append(f"only {len(insts)} instances")
    return _result("link-formula", "new outward links match the overlap formula", len(insts), fails, detail, start, extra_ok=ok)


# ---------------------------------------------------------------------------
# universal partitioning


def _net(verts, edges, dang=None) -> Net:
    return build_net(verts, edges, dang or {})


def uprns_cases():
    """Ten (system, jungle) pairs meeting all three conditions."""
    a, b, c = sym("a", 1, 1), sym("b", 1, 1), sym("c", 1, 1)
    p, q, s0 = sym("p", 2, 1), sym("q", 1, 2), sym("s", 0, 1)
    j = lambda *ns: Jungle(ns)
    fork = _net({"u": q, "x": a, "y": b}, [(("u", 1), ("x", 1)), (("u", 2), ("y", 1))])
    join = _net({"x": a, "y": b, "u": p}, [(("x", 1), ("u", 1)), (("y", 1), ("u", 2))])
    src = _net({"s": s0, "x": a}, [(("s", 1), ("x", 1))])
    cases = [
        ([a], {"a": "A"}, j(chain("a"))),
        ([a, b], {"a": "A", "b": "B"}, j(chain("ab"), cycle("aa"), chain("b"))),
        ([a, b, c], {"a": "A", "b": "B", "c": "C"}, j(chain("abc"))),
        ([a, b], {"a": "B1", "b": "A1"}, j(cycle("ab"), chain("ba"))),
        ([p, a, b], {"p": "P", "a": "A", "b": "B"}, j(join)),
        ([q, a, b], {"q": "Q", "a": "A", "b": "B"}, j(fork)),
        ([s0, a], {"s": "S", "a": "A"}, j(src)),
        ([a, b], {"a": "x1", "b": "x2"}, j(chain("aab"), chain("bb"))),
        ([a, b, c], {"a": "A", "b": "B", "c": "C"}, j(cycle("abc"), chain("ca"))),
        ([p, q, a, b], {"p": "P", "q": "Q", "a": "A", "b": "B"}, j(join, fork)),
    ]
    return [(relabeling_rns(syms, m, f"uprns{k}"), jungle, syms, m) for k, (syms, m, jungle) in enumerate(cases)]


def uprns_mutants(w: RNS, syms: Sequence[Symbol], mapping: Dict[str, str]):
    """One mutant per condition, named by the condition it breaks."""
    s = next(t for t in syms if len(t.ins) == len(t.outs) == 1)
    first = next(r for r in w.rules if r.name.startswith(s.name + ">"))
    rest = [r for r in w.rules if r is not first]
    wide = Symbol(mapping[s.name], s.ins, tuple(s.outs) + (len(s.outs) + 1,))
    saving = make_rns([make_rule(first.name, first.left, symbol_net(wide, "w"))] + rest, name="mut-i")
    fresh = make_rns(rest, name="mut-ii")
    other = next((t for t in syms if t != s and (t.ins, t.outs) == (s.ins, s.outs)), None)
    if other is not None:
        clash = relabeling_rns(syms, {**mapping, s.name: mapping[other.name]}, "mut-iii")
    else:
        twin = symbol_net(Symbol(mapping[s.name] + "2", s.ins, s.outs), "w")
        clash = make_rns(list(w.rules) + [make_rule(first.name + "2", first.left, twin)], name="mut-iii")
    return {"saving": saving, "fresh-letters": fresh, "apex-injective": clash}


def check_uprns_validator(cfg: CheckConfig) -> CheckResult:
    start = time.perf_counter()
    total = fails = 0
    detail = []
    for w, c, syms, mapping in uprns_cases():
        total += 1
        rep = validate_uprns(w, c, cfg.budget)
        if not rep.passed:
            fails += 1
            detail.append(f"{w.name}: valid system rejected: {rep.failed()}")
        for cond, mut in uprns_mutants(w, syms, mapping).items():
            total += 1
            try:
                got = validate_uprns(mut, c, cfg.budget).failed()
            except Exception as e:  # a mutant that crashes the validator counts as a miss
                got = [f"error:{type(e).__name__}"]
            if got != [cond]:
                fails += 1
                detail.append(f"{w.name}/{cond}: failed {got}")
    return _result("uprns-validator", "valid systems pass and single mutants fail one condition", total, fails, detail, start)


# ---------------------------------------------------------------------------
# squares and macros


def check_commuting_squares(cfg: CheckConfig) -> CheckResult:
    start = time.perf_counter()
    total = fails = 0
    detail = []
    for k, (r, K, w1, w2, s, t) in enumerate(micro_macro_instances(cfg.seed, cfg.count(25))):
        total += 1
        mm = micro_macro(r, K, w1, w2, s, t)
        if not mm.commutes:
            fails += 1
            detail.append(f"instance{k}: rule {r.name} square does not commute")
    ok = total >= 20
    return _result("commuting-squares", "micro and macro paths give equal jungles", total, fails, detail, start, extra_ok=ok)


def macro_triples(cfg: CheckConfig):
    nets = list(universe(cfg))
    rng = random.Random(cfg.seed)
    out = []
    for r in oracle_corpus(cfg.seed, 40):
        if r.conditions.custom_predicates:
            continue
        S = Jungle(rng.sample(nets, 3))
        if normal_forms(r, S, cfg.budget).exhausted:
            continue  # budget-cut sets are incomplete on both routes
        out.append((r, S))
    return out


def check_commutative_condition(cfg: CheckConfig) -> CheckResult:
    start = time.perf_counter()
    triples = macro_triples(cfg)
    fails = 0
    detail = []
    for k, (r, S) in enumerate(triples):
        ok, via, direct = commutative_condition(r, S, cfg.budget)
        if not ok:
            fails += 1
            detail.append(f"triple{k}: via macro {len(via)} nets, direct {len(direct)}")
    return _result("commutative-condition", "relabel, macro, relabel back equals the normal form", len(triples), fails,
                   detail, start, extra_ok=len(triples) >= 20)


# ---------------------------------------------------------------------------
# relations


def raw_sisters(U: Jungle, kind: str) -> AbstractionRelation:
    members = list(U)
    pairs = set()
    for s in members:
        for t in members:
            if sisters_check(s, t, kind) is not None:
                pairs.add((s.key(), t.key()))
    return AbstractionRelation(kind, U, frozenset(pairs))


def td_corpus():
    """Small chain transducers and renamed partners."""
    base = [
        make_rns([chain_rule("ab", "a", "b")], name="ab"),
        make_rns([chain_rule("bc", "b", "c")], name="bc"),
        make_rns([chain_rule("m", "ab", "c")], name="m"),
    ]
    systems = list(base)
    for r in base:
        names = sorted(s.name for s in rns_symbols(r))
        systems.append(rename_rns(r, dict(zip(names, ["x", "y", "z"])), r.name + "'"))
    tds = [chain_td([r], name=r.name) for r in systems]
    tds += [chain_td([r1, r2], name=f"{r1.name}.{r2.name}") for r1, r2 in combinations(systems[:4], 2)]
    return tds


def index_laws(n: int, related: Callable[[int, int], bool]) -> List[str]:
    """Equivalence-law failures of a relation on ``range(n)``."""
    m = [[related(i, j) for j in range(n)] for i in range(n)]
    bad = []
    if not all(m[i][i] for i in range(n)):
        bad.append("reflexivity")
    if any(m[i][j] and not m[j][i] for i in range(n) for j in range(n)):
        bad.append("symmetry")
    if any(m[i][j] and m[j][l] and not m[i][l] for i in range(n) for j in range(n) for l in range(n)):
        bad.append("transitivity")
    return bad


def check_equivalence_laws_all(cfg: CheckConfig) -> CheckResult:
    start = time.perf_counter()
    U = universe(cfg)
    rels = [
        ("identity", identity_relation(U)),
        ("dangling-signature", from_key(U)),
        ("rank-merging-kernel", default_theta(U)),
    ]
    for kind in KINDS:
        rels.append((f"sisters-{kind}", sisters_relation(U, kind)))
    for kind in KINDS[:4]:
        rels.append((f"raw-sisters-{kind}", raw_sisters(U, kind)))
    for k in range(3):
        rels.append((f"multidim-{k}", multidim_theta(U, k, [default_theta(U), from_key(U)]).as_abstraction()))
    fails = 0
    detail = []
    tds = td_corpus()
    bad = index_laws(len(tds), lambda i, j: parallel_td_check(tds[i], tds[j]))
    if bad:
        fails += 1
        detail.append("parallel-td: " + ",".join(bad))
    for name, rel in rels:
        rep = check_equivalence_laws(rel)
        if not rep.passed:
            fails += 1
            detail.extend(f"{name}: {line}" for line in rep.lines() if line.startswith("FAIL"))
    raw_nbh = check_equivalence_laws(raw_sisters(U, "NBH"))
    note = [f"note raw NBH sister search before closure: {line}" for line in raw_nbh.lines() if line.startswith("FAIL")]
    return _result("equivalence-laws", "every constructed relation is an equivalence", len(rels) + 1, fails,
                   detail + note, start)


def rank_label(n: Net) -> bytes:
    """Key of ``n`` with every symbol replaced by its rank."""
    return rename_symbols(n, {s.name: f"sig{len(s.ins)}.{len(s.outs)}" for s in n.vertices.values()}).key()


def quotient_algebras(cfg: CheckConfig):
    """(name, algebra) pairs: two class labellings times corpus systems, each
    with the induced class map and the map through a renamed system applied
    to a renamed representative."""
    U = universe(cfg)
    systems = [r for r in oracle_corpus(cfg.seed, 12) if not r.conditions.custom_predicates]
    labels = {
        "rename": lambda n: n.key(True),
        "rank-merging": rank_label,
    }
    out = []
    for lname, label in labels.items():
        base_ops, induced, routed = {}, {}, {}
        for k, r in enumerate(systems):
            f = (lambda r: lambda a: normal_forms(r, Jungle.of(a), cfg.budget))(r)
            names = sorted({s.name for s in rns_symbols(r)} | {"a", "b"})
            sigma = {n: f"{n}~" for n in names}
            back = {v: k for k, v in sigma.items()}
            g = (lambda r2, sigma, back: lambda a: Jungle(
                rename_symbols(b, back) for b in normal_forms(r2, Jungle.of(rename_symbols(a, sigma)), cfg.budget)
            ))(rename_rns(r, sigma), sigma, back)
            base_ops[f"nf{k}"] = f
            induced[f"nf{k}"] = induced_quotient(label, f)
            routed[f"nf{k}"] = representative_quotient(label, g, lambda ms: ms[-1])
        out.append((f"{lname}/induced", PartiallyQuotientAlgebra(U, None, base_ops, induced, label)))
        out.append((f"{lname}/renamed-route", PartiallyQuotientAlgebra(U, None, base_ops, routed, label)))
    return out


def check_partially_quotient_all(cfg: CheckConfig) -> CheckResult:
    start = time.perf_counter()
    U = universe(cfg)
    fails = total = 0
    detail = []
    for name, pqa in quotient_algebras(cfg):
        rep = check_partially_quotient(pqa)
        for v in rep.verdicts:
            if v.informational:
                continue
            total += 1
            if not v.passed:
                fails += 1
                detail.append(f"{name}: {v.line()}")
    for kind in KINDS[:4]:
        part = default_centers(Partition(sisters_relation(U, kind).classes()))
        rep = center_uniqueness(part)
        total += 1
        if not rep.passed:
            fails += 1
            detail.extend(f"centers {kind}: {line}" for line in rep.lines())
    return _result("partially-quotient", "class maps commute and centers are unique", total, fails, detail, start)


def bound_instances(cfg: CheckConfig):
    """(H, A, k, universe, family) toy instances over a small symbol pool."""
    pool = "abcd"
    U = enumerate_nets(EnumerationSpec(alphabet=tuple(sym(x, 1, 1) for x in pool), max_vertices=2, max_edges=2))
    ab = make_rns([chain_rule("ab", "a", "b")], name="ab")
    m = make_rns([chain_rule("m", "ab", "c")], name="m")
    out = []
    for A_sys in ([ab], [m], [ab, m]):
        A = [chain_td([r], name=r.name) for r in A_sys]
        fam = []
        for r in A_sys:
            names = sorted(s.name for s in rns_symbols(r))
            from itertools import permutations

            for perm in permutations(pool, len(names)):
                fam.append(chain_td([rename_rns(r, dict(zip(names, perm)))]))
        for H in (1, 2):
            for k in (0, 1, 2):
                out.append((H, A, k, U, fam))
    return out


def exhaustive_parallel_count(A, family) -> int:
    seen = set()
    for td in family:
        if any(parallel_td_check(a, td) for a in A):
            seen.add(td_key(td))
    return len(seen)


def check_cardinality_bound(cfg: CheckConfig) -> CheckResult:
    start = time.perf_counter()
    fails = 0
    detail = []
    insts = bound_instances(cfg)
    for H, A, k, U, fam in insts:
        mu = cardinality_bound(H, A, k, U)
        count = exhaustive_parallel_count(A, fam)
        if mu < count:
            fails += 1
            detail.append(f"H={H} k={k} |A|={len(A)}: bound {mu} below count {count}")
    return _result("cardinality-bound", "the sum-product bound dominates parallel counts", len(insts), fails, detail, start)


# ---------------------------------------------------------------------------
# evolution and oracle


def evolution_seed():
    from .solver import Problem, Recognizer

    ab = chain_td([make_rns([chain_rule("ab", "a", "b")], name="ab")], name="ab")
    bc = chain_td([make_rns([chain_rule("bc", "b", "c")], name="bc")], name="bc")
    mothers = Jungle.of(chain("a"), chain("b"))
    problems = [Problem(Jungle.of(m), Recognizer.of([chain(t)]), name=f"{k}>{t}")
                for k, m in enumerate(mothers) for t in "abc"]
    return mothers, [ab, bc], problems


def run_evolution(cfg: CheckConfig, m_max: int = 3, schedule=((1, 0), (2, 1), (2, 2)), library_cap: int = 8):
    from .solver import evolve, seed_state

    mothers, lib, problems = evolution_seed()
    state = seed_state(mothers, lib, problems, 0, cfg.budget)
    state = evolve(state, m_max, list(schedule), cfg.budget, library_cap)
    return state


def check_evolution(cfg: CheckConfig) -> CheckResult:
    start = time.perf_counter()
    state = run_evolution(cfg)
    again = run_evolution(cfg)
    detail = list(state.trace)
    fails = 0
    total = 0
    for n, rep in sorted(state.reports.items()):
        for name, ok in rep.inclusions:
            total += 1
            if not ok:
                fails += 1
                detail.append(f"order {n}: inclusion {name} fails")
    counts = [int(line.split("solutions=")[1].split()[0]) for line in state.trace]
    total += 1
    if counts != sorted(counts):
        fails += 1
        detail.append("solvable set shrank")
    total += 1
    if "\n".join(state.trace).encode() != "\n".join(again.trace).encode():
        fails += 1
        detail.append("trace differs on replay")
    total += 1
    if len(state.trace) < 2 or max(state.reports) > 2:
        fails += 1
        detail.append("levels or orders out of range")
    return _result("evolution", "closure inclusions, monotone solvability, replayable trace", total, fails, detail, start)


def check_oracle_agreement(cfg: CheckConfig) -> CheckResult:
    start = time.perf_counter()
    nets = list(universe(cfg))
    total = fails = 0
    detail = []
    for k, r in enumerate(oracle_corpus(cfg.seed, cfg.count(40))):
        for t in nets:
            S = Jungle.of(t)
            for name, eng, ora in (("closure", closure, naive_rewrite_closure), ("nf", normal_forms, naive_normal_forms)):
                total += 1
                v = oracle_compare(eng(r, S, cfg.budget), ora(r, S, cfg.budget))
                if not v.passed:
                    fails += 1
                    if len(detail) < 10:
                        detail.append(f"rns{k} {name}: {v.diffs[0]}")
    return _result("oracle-agreement", "engine and brute-force reference agree", total, fails, detail, start, 600.0)


CHECKS: Dict[str, Callable[[CheckConfig], CheckResult]] = {
    "nbh-to-rns": check_nbh_to_rns,
    "rns-to-nbh": check_rns_to_nbh,
    "inverse-anbh": check_inverse_anbh,
    "link-formula": check_link_formula,
    "uprns-validator": check_uprns_validator,
    "commuting-squares": check_commuting_squares,
    "commutative-condition": check_commutative_condition,
    "equivalence-laws": check_equivalence_laws_all,
    "partially-quotient": check_partially_quotient_all,
    "cardinality-bound": check_cardinality_bound,
    "evolution": check_evolution,
    "oracle-agreement": check_oracle_agreement,
}


def run_checks(ids: Optional[Sequence[str]] = None, cfg: Optional[CheckConfig] = None) -> List[CheckResult]:
    cfg = cfg or CheckConfig()
    return [CHECKS[i](cfg) for i in (ids or list(CHECKS))]
