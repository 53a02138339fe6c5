"""Renetting systems: matching, rewriting, catenation closure, normal forms.

A rule side is a net whose ranked vertices form the replaced material.  Its
interface consists of the ranked ports that are either dangling (named by an
arity letter) or joined to a frontier letter (named by that letter).  A
rewrite removes the matched occurrence, inserts a fresh copy of the right
side and reattaches every environment link through the interface name it
carried on the left.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import BudgetExceeded, DanglingEnvironment, ValidationError
from .jungle import Jungle
from .net import IN, OUT, Net, Port, Symbol, apex, build_net, fresh_ids, port_str, relabel_ids
from .structure import Position, enclosures, side_stats


@dataclass(frozen=True)
class Budget:
    max_steps: int = 8
    max_vertices: int = 6
    max_jungle: int = 2000
    max_matches: int = 20000

    def __le__(self, other: "Budget") -> bool:
        return all(getattr(self, f) <= getattr(other, f) for f in self.__dataclass_fields__)

    @classmethod
    def from_env(cls, var: str = "NETRW_BUDGET") -> "Budget":
        """Read ``steps,vertices,jungle[,matches]`` from the environment."""
        raw = os.environ.get(var)
        if not raw:
            return cls()
        nums = [int(x) for x in raw.split(",") if x.strip()]
        names = ["max_steps", "max_vertices", "max_jungle", "max_matches"]
        return cls(**dict(zip(names, nums)))


DEFAULT_BUDGET = Budget()


# ---------------------------------------------------------------------------
# substitutions and rules


@dataclass(frozen=True)
class Fragment:
    """A net with one designated dangling port where it is glued in."""

    net: Net
    port: Port
    back_links: Tuple[Tuple[Port, Port], ...] = ()

    def __post_init__(self):
        if self.port not in self.net.dangling:
            raise ValidationError(f"attachment port {port_str(self.port)} is not dangling")


@dataclass(frozen=True)
class NetSubstitution:
    frontier_map: Mapping[str, Fragment]
    name: str = ""

    def __hash__(self):
        return hash((self.name, tuple(sorted(self.frontier_map))))

    def domain(self) -> FrozenSet[str]:
        return frozenset(self.frontier_map)


def interface(side: Net) -> Dict[Port, str]:
    """Ranked ports of a rule side that face the environment, with their names."""
    out = {}
    for v in side.ranked():
        for p in side.ports(v):
            q = side.partner(p)
            if q is None:
                out[p] = side.dangling[p]
            elif side.vertices[q[0]].frontier:
                out[p] = side.vertices[q[0]].name
    return out


def is_lone_frontier(side: Net) -> bool:
    return len(side) == 1 and not side.ranked()


@dataclass(frozen=True, eq=False)
class RulePreform:
    name: str
    left: Net
    right: Net
    right_subs: Tuple[NetSubstitution, ...] = ()
    left_guards: Mapping[str, Fragment] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.left) == 0:
            raise ValidationError(f"rule {self.name}: empty left side")
        for side_name, side in (("left", self.left), ("right", self.right)):
            for a, b in side.edges:
                if side.vertices[a[0]].frontier and side.vertices[b[0]].frontier:
                    raise ValidationError(f"rule {self.name}: frontier letters joined on {side_name}")
            names = [side.vertices[v].name for v in side.frontiers()]
            if len(set(names)) != len(names):
                raise ValidationError(f"rule {self.name}: repeated frontier letter on {side_name}")
            labels = list(interface(side).values())
            if len(set(labels)) != len(labels):
                raise ValidationError(f"rule {self.name}: interface names repeat on {side_name}")
        if is_lone_frontier(self.left):
            return
        left_if = {l: p for p, l in interface(self.left).items()}
        right_if = {l: p for p, l in interface(self.right).items()}
        for label, p in right_if.items():
            if label in left_if and left_if[label][1] != p[1]:
                raise ValidationError(f"rule {self.name}: interface {label} changes direction")
        for v in self.right.frontiers():
            x = self.right.vertices[v].name
            bound = any(self.left.vertices[u].name == x for u in self.left.frontiers())
            covered = self.right_subs and all(x in g.frontier_map for g in self.right_subs)
            if not bound and not covered:
                raise ValidationError(f"rule {self.name}: frontier {x} on the right is unbound")
            if self.right.partner(next(self.right.ports(v))) is None:
                raise ValidationError(f"rule {self.name}: frontier {x} is not attached")

    @property
    def left_interface(self) -> Dict[Port, str]:
        return interface(self.left)

    @property
    def right_interface(self) -> Dict[Port, str]:
        return interface(self.right)

    def left_frontiers(self) -> Dict[str, str]:
        return {self.left.vertices[v].name: v for v in self.left.frontiers()}

    def key(self) -> Tuple[bytes, bytes]:
        return (self.left.key(), self.right.key())


Predicate = Callable[[Net, "MatchRecord"], bool]


@dataclass(frozen=True)
class ConditionSet:
    application_order: Optional[Tuple[str, ...]] = None
    instance_sensitive: bool = False
    binding: Mapping[str, Tuple[int, ...]] = field(default_factory=dict)
    custom_predicates: Mapping[str, Predicate] = field(default_factory=dict)
    drop_links: bool = False


@dataclass(frozen=True, eq=False)
class RNS:
    rules: Tuple[RulePreform, ...]
    conditions: ConditionSet = ConditionSet()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        names = [r.name for r in self.rules]
        if len(set(names)) != len(names):
            raise ValidationError("rule names must be unique")
        order = self.conditions.application_order
        if order is not None and set(order) != set(names):
            raise ValidationError("application order must cover every rule")

    def rule(self, name: str) -> RulePreform:
        for r in self.rules:
            if r.name == name:
                return r
        raise KeyError(name)

    def key(self) -> tuple:
        return tuple(sorted(r.key() for r in self.rules))


def make_rule(name: str, left: Net, right: Net, right_subs: Sequence[NetSubstitution] = (), **kw) -> RulePreform:
    return RulePreform(name, left, right, tuple(right_subs), **kw)


def make_rns(rules: Iterable[RulePreform], name: str = "", **conditions) -> RNS:
    return RNS(tuple(rules), ConditionSet(**conditions), name)


# ---------------------------------------------------------------------------
# matching


@dataclass(frozen=True, order=True)
class MatchRecord:
    rule: str
    position: Position
    mapping: Tuple[Tuple[str, str], ...]
    assignment: Tuple[Tuple[str, Port], ...] = ()

    @property
    def vmap(self) -> Dict[str, str]:
        return dict(self.mapping)

    @property
    def bindings(self) -> Dict[str, Port]:
        return dict(self.assignment)


def _pattern_order(left: Net) -> List[str]:
    """Ranked vertices in an order where each vertex after a component's first
    is adjacent (through a ranked-ranked edge) to an earlier one."""
    ranked = left.ranked()
    rset = set(ranked)
    order: List[str] = []
    placed = set()
    for start in ranked:
        if start in placed:
            continue
        queue = [start]
        placed.add(start)
        while queue:
            v = queue.pop(0)
            order.append(v)
            for w in sorted(left.neighbours(v)):
                if w in rset and w not in placed:
                    placed.add(w)
                    queue.append(w)
    return order


def embeddings(pattern: Net, host: Net, limit: int = DEFAULT_BUDGET.max_matches) -> List[Dict[str, str]]:
    """Injective, symbol-preserving maps of the ranked part of ``pattern`` into
    ``host`` under which every ranked-ranked pattern edge is a host edge."""
    order = _pattern_order(pattern)
    rset = set(order)
    by_symbol: Dict[Symbol, List[str]] = {}
    for v in sorted(host.vertices):
        by_symbol.setdefault(host.vertices[v], []).append(v)
    out: List[Dict[str, str]] = []

    def candidates(u: str, m: Dict[str, str]) -> List[str]:
        for p in pattern.ports(u):
            q = pattern.partner(p)
            if q is not None and q[0] in rset and q[0] in m:
                hq = (m[q[0]], q[1], q[2])
                hp = host.partner(hq)
                if hp is None or hp[1:] != p[1:]:
                    return []
                return [hp[0]]
        return by_symbol.get(pattern.vertices[u], [])

    def consistent(u: str, hv: str, m: Dict[str, str]) -> bool:
        if host.vertices[hv] != pattern.vertices[u]:
            return False
        for p in pattern.ports(u):
            q = pattern.partner(p)
            if q is None or q[0] not in rset or q[0] not in m and q[0] != u:
                continue
            target = hv if q[0] == u else m[q[0]]
            if host.partner((hv, p[1], p[2])) != (target, q[1], q[2]):
                return False
        return True

    def extend(i: int, m: Dict[str, str], used: set):
        if i == len(order):
            out.append(dict(m))
            if len(out) > limit:
                raise BudgetExceeded(f"more than {limit} matches")
            return
        u = order[i]
        for hv in candidates(u, m):
            if hv in used or not consistent(u, hv, m):
                continue
            m[u] = hv
            used.add(hv)
            extend(i + 1, m, used)
            used.discard(hv)
            del m[u]

    extend(0, {}, set())
    return out


def _guard_ok(guard: Fragment, host: Net, bound: Port) -> bool:
    gs = guard.net.vertices[guard.port[0]]
    return host.vertices[bound[0]] == gs and bound[1:] == guard.port[1:]


def rule_matches(rule: RulePreform, host: Net, budget: Budget = DEFAULT_BUDGET) -> List[MatchRecord]:
    left = rule.left
    if is_lone_frontier(left):
        x = left.vertices[left.frontiers()[0]].name
        return [
            MatchRecord(rule.name, Position.of([v]), (), ((x, (v, "", 0)),))
            for v in sorted(host.vertices)
        ]
    out = []
    attach = {}
    for v in left.frontiers():
        p = next(left.ports(v))
        attach[left.vertices[v].name] = left.partner(p)
    for m in embeddings(left, host, budget.max_matches):
        binding = {}
        ok = True
        for x, q in attach.items():
            hp = host.partner((m[q[0]], q[1], q[2]))
            if hp is None:
                ok = False
                break
            guard = rule.left_guards.get(x)
            if guard is not None and not _guard_ok(guard, host, hp):
                ok = False
                break
            binding[x] = hp
        if ok:
            out.append(
                MatchRecord(
                    rule.name,
                    Position.of(m.values()),
                    tuple(sorted(m.items())),
                    tuple(sorted(binding.items())),
                )
            )
    return sorted(out)


def find_matches(r: RNS, s: Net, budget: Budget = DEFAULT_BUDGET) -> List[MatchRecord]:
    out = []
    for rule in r.rules:
        out.extend(rule_matches(rule, s, budget))
        if len(out) > budget.max_matches:
            raise BudgetExceeded(f"more than {budget.max_matches} matches")
    return out


def admissible_matches(r: RNS, s: Net, budget: Budget = DEFAULT_BUDGET) -> List[MatchRecord]:
    """Matches surviving the condition set (order priority and predicates)."""
    recs = find_matches(r, s, budget)
    preds = r.conditions.custom_predicates
    if preds:
        recs = [m for m in recs if all(p(s, m) for _, p in sorted(preds.items()))]
    order = r.conditions.application_order
    if order:
        for name in order:
            chosen = [m for m in recs if m.rule == name]
            if chosen:
                return chosen
        return []
    return recs


# ---------------------------------------------------------------------------
# replacement


def right_substitutions(r: RNS, rule: RulePreform) -> List[Optional[NetSubstitution]]:
    subs = list(rule.right_subs)
    allowed = r.conditions.binding.get(rule.name)
    if allowed is not None:
        subs = [g for i, g in enumerate(subs) if i in allowed]
    return subs or [None]


def inserted_ids(rule: RulePreform, host: Net) -> Dict[str, str]:
    """Host ids given to the right side's ranked vertices by :func:`apply_match`."""
    r_ranked = rule.right.ranked()
    return dict(zip(r_ranked, fresh_ids(host.vertices, len(r_ranked), "r")))


def apply_match(
    rule: RulePreform,
    host: Net,
    match: MatchRecord,
    g: Optional[NetSubstitution] = None,
    drop_links: bool = False,
) -> Tuple[Net, List[str]]:
    """Replace one occurrence.  Returns the result and the ids of the inserted
    right-side vertices."""
    if is_lone_frontier(rule.left):
        extra = relabel_ids(
            _ranked_only(rule.right),
            dict(zip(rule.right.ranked(), fresh_ids(host.vertices, len(rule.right.ranked()), "r"))),
        )
        if not extra.vertices:
            return host, []
        verts = dict(host.vertices)
        verts.update(extra.vertices)
        dang = dict(host.dangling)
        dang.update(extra.dangling)
        return build_net(verts, list(host.edges) + list(extra.edges), dang), sorted(extra.vertices)
    m = match.vmap
    occ = set(m.values())
    covered = g.domain() if g is not None else frozenset()
    hlabel: Dict[Port, str] = {}
    for p, label in rule.left_interface.items():
        hlabel[(m[p[0]], p[1], p[2])] = label
    right_if = {label: p for p, label in rule.right_interface.items()}
    r_ranked = rule.right.ranked()
    new_ids = inserted_ids(rule, host)

    def translate(p: Port) -> Optional[Port]:
        label = hlabel[p]
        if label in covered:
            return None
        rp = right_if.get(label)
        if rp is None:
            return None
        return (new_ids[rp[0]], rp[1], rp[2])

    verts = {v: s for v, s in host.vertices.items() if v not in occ}
    for v in r_ranked:
        verts[new_ids[v]] = rule.right.vertices[v]
    edges = []
    for a, b in sorted(host.edges):
        a_in, b_in = a[0] in occ, b[0] in occ
        if not a_in and not b_in:
            edges.append((a, b))
            continue
        if (a_in and a not in hlabel) or (b_in and b not in hlabel):
            continue  # matched pattern edge
        na = translate(a) if a_in else a
        nb = translate(b) if b_in else b
        if na is not None and nb is not None:
            edges.append((na, nb))
            continue
        lost = [p for p, n in ((a, na), (b, nb)) if n is None]
        survivor = na if nb is None else nb
        if survivor is None:
            continue
        permitted = drop_links or all(hlabel[p] in covered for p in lost)
        if not permitted:
            raise DanglingEnvironment(
                f"rule {rule.name}: link {port_str(a)}->{port_str(b)} loses its attachment"
            )
    for a, b in rule.right.edges:
        if a[0] in new_ids and b[0] in new_ids:
            edges.append(((new_ids[a[0]], OUT, a[2]), (new_ids[b[0]], IN, b[2])))
    taken = set(verts)
    for v in rule.right.frontiers():
        x = rule.right.vertices[v].name
        if x not in covered:
            continue
        q = rule.right.partner(next(rule.right.ports(v)))
        frag = g.frontier_map[x]
        fids = dict(zip(sorted(frag.net.vertices), fresh_ids(taken, len(frag.net), "g")))
        taken |= set(fids.values())
        for fv, fs in frag.net.vertices.items():
            verts[fids[fv]] = fs
        for fa, fb in frag.net.edges:
            edges.append(((fids[fa[0]], OUT, fa[2]), (fids[fb[0]], IN, fb[2])))
        fp = (fids[frag.port[0]], frag.port[1], frag.port[2])
        rq = (new_ids[q[0]], q[1], q[2])
        edges.append((fp, rq) if fp[1] == OUT else (rq, fp))
        for fport, target in frag.back_links:
            fpp = (fids[fport[0]], fport[1], fport[2])
            edges.append((fpp, target) if fpp[1] == OUT else (target, fpp))
    dang = {p: l for p, l in host.dangling.items() if p[0] not in occ}
    left_by_label = {label: p for p, label in hlabel.items()}
    for p, letter in rule.right.dangling.items():
        if p[0] not in new_ids:
            continue
        np_ = (new_ids[p[0]], p[1], p[2])
        hp = left_by_label.get(letter)
        dang[np_] = host.dangling.get(hp, letter) if hp is not None else letter
    occupied = set()
    for a, b in edges:
        occupied.add(a)
        occupied.add(b)
    dang = {p: l for p, l in dang.items() if p not in occupied}
    root = host.root if host.root not in occ else None
    return build_net(verts, edges, dang, root), sorted(new_ids.values())


def _ranked_only(side: Net) -> Net:
    return apex(side)


def rewrite_net(r: RNS, s: Net, budget: Budget = DEFAULT_BUDGET) -> List[Net]:
    out = []
    for rec in admissible_matches(r, s, budget):
        rule = r.rule(rec.rule)
        for g in right_substitutions(r, rule):
            out.append(apply_match(rule, s, rec, g, r.conditions.drop_links)[0])
    return out


def rewrite_step(r: RNS, S: Jungle, budget: Budget = DEFAULT_BUDGET) -> Jungle:
    """One parallel step: the union of all single replacements in members of S.

    Members without a redex contribute nothing.
    """
    results = []
    for s in S:
        results.extend(rewrite_net(r, s, budget))
        if len(results) > budget.max_matches:
            raise BudgetExceeded("too many rewrite results")
    return Jungle(results)


# ---------------------------------------------------------------------------
# closure and normal forms


@dataclass
class Exploration:
    nets: Dict[bytes, Net]
    successors: Dict[bytes, set]
    exhausted: bool

    def has_cycle(self) -> bool:
        state: Dict[bytes, int] = {}
        for start in sorted(self.successors):
            if state.get(start):
                continue
            stack = [(start, iter(sorted(self.successors.get(start, ()))))]
            state[start] = 1
            while stack:
                node, it = stack[-1]
                nxt = next(it, None)
                if nxt is None:
                    state[node] = 2
                    stack.pop()
                    continue
                if nxt not in self.successors:
                    continue
                st = state.get(nxt, 0)
                if st == 1:
                    return True
                if st == 0:
                    state[nxt] = 1
                    stack.append((nxt, iter(sorted(self.successors.get(nxt, ())))))
        return False


def explore(r: RNS, S: Jungle, budget: Budget = DEFAULT_BUDGET, step=None) -> Exploration:
    """Breadth-first catenation closure recording the rewrite graph."""
    step = step or (lambda net: rewrite_net(r, net, budget))
    nets = {n.key(): n for n in S}
    succ: Dict[bytes, set] = {}
    frontier = list(S)
    exhausted = S.exhausted
    depth = 0
    while frontier:
        if depth >= budget.max_steps:
            if any(step(n) for n in frontier):
                exhausted = True
            break
        fresh: Dict[bytes, Net] = {}
        for n in frontier:
            keys = set()
            for t in step(n):
                if len(t) > budget.max_vertices:
                    exhausted = True
                    continue
                k = t.key()
                keys.add(k)
                if k not in nets:
                    fresh.setdefault(k, t)
            succ[n.key()] = keys
        room = budget.max_jungle - len(nets)
        new_keys = sorted(fresh)
        if len(new_keys) > room:
            exhausted = True
            new_keys = new_keys[: max(room, 0)]
        for k in new_keys:
            nets[k] = fresh[k]
        frontier = [fresh[k] for k in new_keys]
        depth += 1
    return Exploration(nets, succ, exhausted)


def closure(r: RNS, S: Jungle, budget: Budget = DEFAULT_BUDGET) -> Jungle:
    ex = explore(r, S, budget)
    return Jungle(ex.nets.values(), ex.exhausted)


def normal_forms(r: RNS, S: Jungle, budget: Budget = DEFAULT_BUDGET) -> Jungle:
    """Irreducible members of the closure.

    The result is flagged exhausted when the budget bound or when the explored
    rewrite graph has a cycle (a derivation that never terminates).
    """
    ex = explore(r, S, budget)
    irr = [n for n in ex.nets.values() if not admissible_matches(r, n, budget)]
    return Jungle(irr, ex.exhausted or ex.has_cycle())


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class RnsFlags:
    feedbacking: bool
    totally_feedbacking: bool
    innerly_feedbacking: bool
    self_feedbacking: bool
    environmentally_saving: bool
    thoroughly_feedbacking: bool
    orn_saving: bool
    instance_sensitive: bool

    def true_flags(self) -> List[str]:
        return [f for f in self.__dataclass_fields__ if getattr(self, f)]


def orn(side: Net) -> int:
    return side_stats(side).orn


def _fragment_nets(rule: RulePreform) -> List[List[Net]]:
    return [[f.net for _, f in sorted(g.frontier_map.items())] for g in rule.right_subs]


def _overlaps(frag: Net, t: Net) -> bool:
    # a common enclosure exists iff some single-vertex enclosure is shared
    return bool({s for s in frag.vertices.values()} & {s for s in t.vertices.values()})


def classify_rns(r: RNS, t: Net, applicant: Optional[Net] = None, budget: Budget = DEFAULT_BUDGET) -> RnsFlags:
    applicant = t if applicant is None else applicant
    recs = find_matches(r, applicant, budget)
    applicable = [rule for rule in r.rules if any(m.rule == rule.name for m in recs)]
    enc_keys = None

    def enclosed(frag: Net) -> bool:
        nonlocal enc_keys
        if enc_keys is None:
            enc_keys = set(enclosures(t).keys())
        return frag.key() in enc_keys

    def rule_fb(rule):
        groups = _fragment_nets(rule)
        return not groups or any(all(_overlaps(f, t) for f in grp) for grp in groups)

    def rule_total(rule):
        return all(all(_overlaps(f, t) for f in grp) for grp in _fragment_nets(rule))

    def rule_inner(rule):
        return all(all(enclosed(f) for f in grp) for grp in _fragment_nets(rule))

    feedbacking = any(rule_fb(rule) for rule in applicable)
    env_saving = True
    for rec in recs:
        rule = r.rule(rec.rule)
        before = _without(applicant, set(rec.position.vertices))
        for g in right_substitutions(r, rule):
            try:
                res, new = apply_match(rule, applicant, rec, g, r.conditions.drop_links)
            except DanglingEnvironment:
                env_saving = False
                continue
            if _without(res, set(new)).key() != before.key():
                env_saving = False
    return RnsFlags(
        feedbacking=feedbacking,
        totally_feedbacking=all(rule_total(rule) for rule in applicable),
        innerly_feedbacking=feedbacking and all(rule_inner(rule) for rule in applicable),
        self_feedbacking=feedbacking and applicant is t,
        environmentally_saving=env_saving,
        thoroughly_feedbacking=all(rule_fb(rule) for rule in r.rules),
        orn_saving=all(orn(rule.left) == orn(rule.right) for rule in r.rules),
        instance_sensitive=any(rule.right_subs for rule in r.rules),
    )


def _without(net: Net, vids: set) -> Net:
    from .net import remove_vertices

    return remove_vertices(net, vids)


@dataclass
class ConditionVerdict:
    name: str
    passed: bool
    witnesses: List[str] = field(default_factory=list)


@dataclass
class UprnsReport:
    conditions: List[ConditionVerdict]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def verdict(self, name: str) -> bool:
        return next(c.passed for c in self.conditions if c.name == name)

    def failed(self) -> List[str]:
        return [c.name for c in self.conditions if not c.passed]

    def lines(self) -> List[str]:
        out = []
        for c in self.conditions:
            tag = "PASS" if c.passed else "FAIL"
            out.append(" ".join([tag, c.name] + c.witnesses))
        return out


def _ranked_letters(j: Iterable[Net]) -> set:
    out = set()
    for n in j:
        out |= {s.name for s in n.vertices.values() if not s.frontier}
    return out


def validate_uprns(w: RNS, c: Jungle, budget: Budget = DEFAULT_BUDGET) -> UprnsReport:
    """Check the three universal-partitioning conditions of ``w`` on ``c``."""
    # (i) saving conditions
    wit_i = []
    for rule in w.rules:
        if orn(rule.left) != orn(rule.right):
            wit_i.append(f"orn:{rule.name}:{orn(rule.left)}!={orn(rule.right)}")
    for t in c:
        flags = classify_rns(w, t, budget=budget)
        for f in ("environmentally_saving", "thoroughly_feedbacking", "totally_feedbacking"):
            if not getattr(flags, f):
                wit_i.append(f"{f}:{_short(t)}")
    # (ii) fresh letters after rewriting
    lc = _ranked_letters(c)
    nf = normal_forms(w, c, budget)
    clash = sorted(lc & _ranked_letters(nf))
    step_clash = sorted(lc & _ranked_letters(rewrite_step(w, c, budget)))
    wit_ii = [f"letter:{x}" for x in clash]
    if clash and step_clash != clash:
        wit_ii.append("one-step:" + ",".join(step_clash))
    # (iii) singleton fresh apex letter, injective pairing
    wit_iii = []
    for rule in w.rules:
        right_letters = {s.name for s in apex(rule.right).vertices.values()}
        if len(right_letters) != 1:
            wit_iii.append(f"apex:{rule.name}:{','.join(sorted(right_letters))}")
        elif right_letters & lc:
            wit_iii.append(f"reused:{rule.name}:{next(iter(right_letters))}")
    lefts: Dict[bytes, str] = {}
    rights: Dict[bytes, str] = {}
    for rule in w.rules:
        lk, rk = apex(rule.left).key(), apex(rule.right).key()
        if lk in lefts:
            wit_iii.append(f"injective:{lefts[lk]}={rule.name}")
        if rk in rights:
            wit_iii.append(f"injective:{rights[rk]}={rule.name}")
        lefts.setdefault(lk, rule.name)
        rights.setdefault(rk, rule.name)
    return UprnsReport(
        [
            ConditionVerdict("saving", not wit_i, wit_i),
            ConditionVerdict("fresh-letters", not wit_ii, wit_ii),
            ConditionVerdict("apex-injective", not wit_iii, wit_iii),
        ]
    )


def _short(n: Net) -> str:
    return "[" + ",".join(sorted(s.name for s in n.vertices.values())) + "]"


def rename_rns(r: RNS, mapping: Mapping[str, str], name: Optional[str] = None) -> RNS:
    """Apply a symbol renaming to every rule side and substitution fragment."""
    from .net import rename_symbols

    rules = []
    for rule in r.rules:
        subs = tuple(
            NetSubstitution(
                {x: replace(f, net=rename_symbols(f.net, mapping)) for x, f in g.frontier_map.items()},
                g.name,
            )
            for g in rule.right_subs
        )
        guards = {x: replace(f, net=rename_symbols(f.net, mapping)) for x, f in rule.left_guards.items()}
        rules.append(
            RulePreform(
                rule.name,
                rename_symbols(rule.left, mapping),
                rename_symbols(rule.right, mapping),
                subs,
                guards,
            )
        )
    return RNS(tuple(rules), r.conditions, name if name is not None else r.name)

