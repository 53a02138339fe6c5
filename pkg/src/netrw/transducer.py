"""Transducers: carrier nets whose operation vertices run attached rule systems.

Every vertex of a carrier is an operation.  An attachment keyed by
``(vertex id, in-index, out-index)`` holds the rule systems that carry the
jungle arriving at that in-port over to that out-port.  Free in-ports of the
carrier receive the subject jungle; the union over free out-ports is the
result.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import permutations
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .errors import InterfaceMismatch, MissingMacro, UnattachedVertex, ValidationError
from .jungle import Jungle, union_all
from .net import IN, OUT, Net, Symbol, build_net, sym
from .rewrite import (
    DEFAULT_BUDGET,
    RNS,
    Budget,
    closure,
    make_rns,
    make_rule,
    normal_forms,
    rename_rns,
    rewrite_net,
)

MODES = ("step", "closure", "normal")
ITG = ("PRNS", "GPRNS", "CLRNS", "UPRNS")


# ---------------------------------------------------------------------------
# macros


@dataclass(frozen=True, eq=False)
class Macro:
    """Relabel in, run the conjugated system, relabel back."""

    w: RNS
    r_m: RNS
    w_o: RNS
    kind: str = "UPRNS"
    source: Optional[RNS] = None

    @property
    def name(self) -> str:
        return f"macro({self.r_m.name})"


Operator = Union[RNS, Macro]
SlotKey = Tuple[str, int, int]


def symbol_net(s: Symbol, vid: str = "v") -> Net:
    """One vertex with every port free, lettered ``i<k>`` and ``o<k>``."""
    dang = {(vid, IN, k): f"i{k}" for k in s.ins}
    dang.update({(vid, OUT, k): f"o{k}" for k in s.outs})
    return build_net({vid: s}, (), dang)


def relabeling_rns(symbols: Iterable[Symbol], mapping: Mapping[str, str], name: str = "relabel") -> RNS:
    """Rules sending each symbol vertex to its renamed twin, letters kept."""
    rules = []
    for s in sorted(set(symbols), key=lambda s: (s.name, s.ins, s.outs)):
        if s.frontier or s.name not in mapping:
            continue
        twin = Symbol(mapping[s.name], s.ins, s.outs)
        rules.append(make_rule(f"{s.name}>{twin.name}", symbol_net(s), symbol_net(twin, "w")))
    return make_rns(rules, name=name)


def rns_symbols(r: RNS) -> set:
    out = set()
    for rule in r.rules:
        nets = [rule.left, rule.right] + [f.net for g in rule.right_subs for f in g.frontier_map.values()]
        nets += [f.net for f in rule.left_guards.values()]
        for n in nets:
            out |= {s for s in n.vertices.values() if not s.frontier}
    return out


def fresh_mapping(names: Iterable[str], taken: Iterable[str], prefix: str = "M") -> Dict[str, str]:
    taken = set(taken)
    out = {}
    k = 0
    for n in sorted(set(names)):
        while f"{prefix}{k}" in taken:
            k += 1
        out[n] = f"{prefix}{k}"
        taken.add(out[n])
        k += 1
    return out


def build_macro(r: RNS, kind: str = "UPRNS", alphabet: Iterable[Symbol] = ()) -> Macro:
    """Macro of ``r`` over a relabelling intervention.

    The intervention renames every symbol of ``r`` and ``alphabet`` to fresh
    names; the macro system is ``r`` under that renaming and the reversed
    intervention renames back.
    """
    if kind not in ITG:
        raise MissingMacro(f"no intervention of kind {kind}")
    if r.conditions.custom_predicates:
        raise MissingMacro(f"{r.name or 'rns'} carries predicates that cannot be relabelled")
    symbols = rns_symbols(r) | set(alphabet)
    names = {s.name for s in symbols}
    mapping = fresh_mapping(names, names)
    back = {v: k for k, v in mapping.items()}
    twins = {Symbol(mapping[s.name], s.ins, s.outs) for s in symbols}
    w = relabeling_rns(symbols, mapping, "W")
    w_o = relabeling_rns(twins, back, "Wo")
    return Macro(w, rename_rns(r, mapping, f"{r.name}_M"), w_o, kind, r)


# ---------------------------------------------------------------------------
# transducers


@dataclass(frozen=True, eq=False)
class Transducer:
    carrier: Net
    attach: Mapping[SlotKey, Tuple[Operator, ...]]
    mode: str = "step"
    budget: Budget = DEFAULT_BUDGET
    name: str = ""

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"unknown mode {self.mode}")
        attach = {k: tuple(v) for k, v in self.attach.items()}
        object.__setattr__(self, "attach", attach)
        for (vid, i, j) in attach:
            s = self.carrier.vertices.get(vid)
            if s is None or i not in s.ins or j not in s.outs:
                raise ValidationError(f"attachment slot {vid}:{i}:{j} is not on the carrier")
        for vid, s in self.carrier.vertices.items():
            if s.frontier or not s.ins or not s.outs:
                raise ValidationError(f"carrier vertex {vid} must be an operation with in- and out-ports")

    def slots(self, vid: str) -> List[SlotKey]:
        return sorted(k for k in self.attach if k[0] == vid)

    def systems(self) -> List[RNS]:
        """Attached rule systems, macros unfolded to their macro system."""
        out = []
        for k in sorted(self.attach):
            for op in self.attach[k]:
                out.append(op.r_m if isinstance(op, Macro) else op)
        return out

    def inputs(self) -> List[Tuple[str, str, int]]:
        return sorted((l, p[0], p[2]) for p, l in self.carrier.dangling.items() if p[1] == IN)

    def outputs(self) -> List[Tuple[str, str, int]]:
        return sorted((l, p[0], p[2]) for p, l in self.carrier.dangling.items() if p[1] == OUT)

    def with_mode(self, mode: str) -> "Transducer":
        return replace(self, mode=mode)


def make_td(carrier: Net, attach: Mapping, mode: str = "step", budget: Budget = DEFAULT_BUDGET, name: str = "") -> Transducer:
    """Build a transducer; a value of ``attach`` keyed by a bare vertex id is
    attached to every (in, out) pair of that vertex."""
    slots: Dict[SlotKey, Tuple[Operator, ...]] = {}
    for k, ops in attach.items():
        ops = (ops,) if isinstance(ops, (RNS, Macro)) else tuple(ops)
        if isinstance(k, str):
            s = carrier.vertices[k]
            for i in s.ins:
                for j in s.outs:
                    slots[(k, i, j)] = slots.get((k, i, j), ()) + ops
        else:
            slots[tuple(k)] = slots.get(tuple(k), ()) + ops
    return Transducer(carrier, slots, mode, budget, name)


def chain_td(systems: Sequence[Union[Operator, Sequence[Operator]]], mode: str = "step",
             budget: Budget = DEFAULT_BUDGET, name: str = "", op_names: Optional[Sequence[str]] = None) -> Transducer:
    """A path of unary operation vertices, one per entry of ``systems``."""
    ids = [f"t{k}" for k in range(len(systems))]
    names = list(op_names) if op_names else [f"op{k}" for k in range(len(systems))]
    verts = {v: sym(n, 1, 1) for v, n in zip(ids, names)}
    edges = [((ids[k], 1), (ids[k + 1], 1)) for k in range(len(ids) - 1)]
    dang = {(ids[0], IN, 1): "in", (ids[-1], OUT, 1): "out"} if ids else {}
    carrier = build_net(verts, edges, dang)
    return make_td(carrier, {v: s for v, s in zip(ids, systems)}, mode, budget, name)


def identity_td(mode: str = "step", budget: Budget = DEFAULT_BUDGET) -> Transducer:
    return chain_td([make_rns([], name="id")], mode, budget, "id", ["id"])


# ---------------------------------------------------------------------------
# running


def step_jungle(r: RNS, S: Jungle, budget: Budget) -> Jungle:
    """One rewrite step; members without a redex pass through unchanged."""
    out = []
    for s in S:
        succ = rewrite_net(r, s, budget)
        out.extend(succ if succ else [s])
    return Jungle(out, S.exhausted)


def apply_operator(op: Operator, S: Jungle, mode: str, budget: Budget) -> Jungle:
    if isinstance(op, Macro):
        return normal_forms(op.w_o, normal_forms(op.r_m, normal_forms(op.w, S, budget), budget), budget)
    if mode == "step":
        return step_jungle(op, S, budget)
    if mode == "closure":
        return closure(op, S, budget)
    return normal_forms(op, S, budget)


def _topological(carrier: Net) -> List[str]:
    deps = {v: set() for v in carrier.vertices}
    for (u, _, _), (v, _, _) in carrier.edges:
        if u != v:
            deps[v].add(u)
        else:
            raise ValidationError(f"carrier has a feedback loop at {v}")
    order = []
    ready = sorted(v for v, d in deps.items() if not d)
    while ready:
        v = ready.pop(0)
        order.append(v)
        for w in sorted(deps):
            if v in deps[w]:
                deps[w].discard(v)
                if not deps[w] and w not in order and w not in ready:
                    ready.append(w)
        ready.sort()
    if len(order) != len(deps):
        raise ValidationError("carrier has a directed cycle")
    return order


def run_td(td: Transducer, S: Jungle, budget: Optional[Budget] = None) -> Jungle:
    """Evaluate the carrier from its free in-ports to its free out-ports."""
    budget = budget or td.budget
    carrier = td.carrier
    for vid in carrier.vertices:
        if not td.slots(vid):
            raise UnattachedVertex(vid)
    produced: Dict[Tuple[str, int], Jungle] = {}
    for vid in _topological(carrier):
        s = carrier.vertices[vid]
        arriving = {}
        for i in s.ins:
            src = carrier.partner((vid, IN, i))
            arriving[i] = S if src is None else produced[(src[0], src[2])]
        for j in s.outs:
            parts = []
            for i in s.ins:
                for op in td.attach.get((vid, i, j), ()):
                    parts.append(apply_operator(op, arriving[i], td.mode, budget))
            produced[(vid, j)] = union_all(parts)
    return union_all(produced[(vid, idx)] for _, vid, idx in td.outputs())


def td_normal_form(td: Transducer) -> Transducer:
    """Every attached system replaced by its normal-form operator."""
    return td.with_mode("normal")


def run_until_stable(td: Transducer, S: Jungle, limit: int = 16) -> Jungle:
    """Iterate ``run_td`` until the jungle stops changing."""
    cur = S
    for _ in range(limit):
        nxt = run_td(td, cur)
        if nxt == cur:
            return nxt
        cur = nxt
    return cur.flagged(True)


# ---------------------------------------------------------------------------
# composition


def _prefixed(td: Transducer, prefix: str):
    mapping = {v: prefix + v for v in td.carrier.vertices}
    attach = {(mapping[v], i, j): ops for (v, i, j), ops in td.attach.items()}
    return mapping, attach


def td_compose(s: Transducer, t: Transducer, name: str = "") -> Transducer:
    """Glue the free out-ports of ``s`` to the free in-ports of ``t``, both
    taken in letter order."""
    outs, ins = s.outputs(), t.inputs()
    if len(outs) != len(ins):
        raise InterfaceMismatch(f"{len(outs)} outputs against {len(ins)} inputs")
    if s.mode != t.mode:
        raise InterfaceMismatch(f"modes differ: {s.mode} and {t.mode}")
    ms, attach_s = _prefixed(s, "s.")
    mt, attach_t = _prefixed(t, "t.")
    verts = {ms[v]: x for v, x in s.carrier.vertices.items()}
    verts.update({mt[v]: x for v, x in t.carrier.vertices.items()})
    edges = [((ms[a[0]], a[2]), (ms[b[0]], b[2])) for a, b in s.carrier.edges]
    edges += [((mt[a[0]], a[2]), (mt[b[0]], b[2])) for a, b in t.carrier.edges]
    edges += [((ms[o[1]], o[2]), (mt[i[1]], i[2])) for o, i in zip(outs, ins)]
    dang = {(ms[p[0]], p[1], p[2]): l for p, l in s.carrier.dangling.items() if p[1] == IN}
    dang.update({(mt[p[0]], p[1], p[2]): l for p, l in t.carrier.dangling.items() if p[1] == OUT})
    carrier = build_net(verts, edges, dang)
    budget = Budget(*(max(a, b) for a, b in zip(_budget_tuple(s.budget), _budget_tuple(t.budget))))
    return Transducer(carrier, {**attach_s, **attach_t}, s.mode, budget, name or f"{s.name}.{t.name}")


def _budget_tuple(b: Budget):
    return (b.max_steps, b.max_vertices, b.max_jungle, b.max_matches)


# ---------------------------------------------------------------------------
# universal macros and parallel transducers


def uma_build(td: Transducer, kinds: Iterable[str], alphabet: Iterable[Symbol] = ()) -> Transducer:
    """Replace every attached system by its macro over the given kinds.

    An empty set of kinds is the identity intervention and returns ``td``.
    """
    kinds = sorted(set(kinds))
    if not kinds:
        return td
    kind = "UPRNS" if "UPRNS" in kinds else kinds[0]
    attach = {}
    for k, ops in td.attach.items():
        attach[k] = tuple(op if isinstance(op, Macro) else build_macro(op, kind, alphabet) for op in ops)
    return Transducer(td.carrier, attach, td.mode, td.budget, f"uma({td.name})")


def _unwrap(op: Operator) -> RNS:
    return op.r_m if isinstance(op, Macro) else op


def rns_renaming(r1: RNS, r2: RNS, limit: int = 50000) -> Optional[Dict[str, str]]:
    """A bijective symbol renaming carrying ``r1`` onto ``r2`` rule for rule."""
    if len(r1.rules) != len(r2.rules):
        return None
    s1 = sorted(rns_symbols(r1), key=lambda s: (s.ins, s.outs, s.name))
    s2 = sorted(rns_symbols(r2), key=lambda s: (s.ins, s.outs, s.name))
    if [(s.ins, s.outs) for s in s1] != [(s.ins, s.outs) for s in s2]:
        return None
    if len({s.name for s in s1}) != len(s1) or len({s.name for s in s2}) != len(s2):
        return None
    groups: Dict[Tuple[int, int], Tuple[List[str], List[str]]] = {}
    for a in s1:
        groups.setdefault((a.ins, a.outs), ([], []))[0].append(a.name)
    for b in s2:
        groups[(b.ins, b.outs)][1].append(b.name)
    target = r2.key()
    tried = 0

    def rec(items, acc):
        nonlocal tried
        if not items:
            tried += 1
            if tried > limit:
                return None
            return dict(acc) if rename_rns(r1, acc).key() == target else None
        (src, dst), rest = items[0], items[1:]
        for perm in permutations(dst):
            got = rec(rest, {**acc, **dict(zip(src, perm))})
            if got is not None:
                return got
        return None

    same = r1.conditions == r2.conditions or _conditions_match(r1, r2)
    if not same:
        return None
    return rec(list(groups.values()), {})


def _conditions_match(r1: RNS, r2: RNS) -> bool:
    c1, c2 = r1.conditions, r2.conditions
    if c1.custom_predicates or c2.custom_predicates:
        return False
    return (c1.drop_links, c1.instance_sensitive) == (c2.drop_links, c2.instance_sensitive) and (
        (c1.application_order is None) == (c2.application_order is None)
    )


def rns_parallel(r1: Operator, r2: Operator, kind: str = "UPRNS") -> bool:
    """Parallel systems under a relabelling intervention of the given kind."""
    if kind not in ITG:
        return False
    return rns_renaming(_unwrap(r1), _unwrap(r2)) is not None


def _carrier_isos(p: Net, q: Net) -> List[Dict[str, str]]:
    from .rewrite import embeddings

    if len(p) != len(q) or len(p.edges) != len(q.edges) or p.key() != q.key():
        return []
    return embeddings(p, q)


def parallel_td_check(p: Transducer, q: Transducer, kinds: Iterable[str] = ("UPRNS",)) -> bool:
    """Search a carrier correspondence under which every attached system of
    ``q`` is parallel to the matching system of ``p``."""
    kinds = list(kinds)
    for iso in _carrier_isos(p.carrier, q.carrier):
        ok = True
        for (v, i, j), ops in p.attach.items():
            other = q.attach.get((iso[v], i, j), ())
            if len(other) != len(ops):
                ok = False
                break
            if not _ops_pair(ops, other, kinds):
                ok = False
                break
        if ok and len(p.attach) == len(q.attach):
            return True
    return False


def _ops_pair(a: Sequence[Operator], b: Sequence[Operator], kinds: Sequence[str]) -> bool:
    if not a:
        return not b
    head, rest = a[0], a[1:]
    for k, cand in enumerate(b):
        if any(rns_parallel(head, cand, kind) for kind in kinds):
            if _ops_pair(rest, list(b[:k]) + list(b[k + 1:]), kinds):
                return True
    return False


def td_abstraction_check(p: Transducer, q: Transducer, theta) -> bool:
    """Carriers related by ``theta``: an abstraction relation over the carrier
    universe, or a kind name resolved by the sisters search."""
    from .abstraction import AbstractionRelation, sisters_check

    if isinstance(theta, AbstractionRelation):
        if p.carrier not in theta.universe or q.carrier not in theta.universe:
            return False
        return theta.related(p.carrier, q.carrier)
    return sisters_check(p.carrier, q.carrier, theta) is not None


def swap_parallel(td: Transducer, slot: SlotKey, index: int, mapping: Mapping[str, str]) -> Transducer:
    """``td`` with one attached system replaced by a renamed partner."""
    attach = dict(td.attach)
    ops = list(attach[slot])
    ops[index] = rename_rns(_unwrap(ops[index]), mapping, f"{_unwrap(ops[index]).name}'")
    attach[slot] = tuple(ops)
    return Transducer(td.carrier, attach, td.mode, td.budget, td.name + "'")


def commutative_condition(r: RNS, S: Jungle, budget: Budget = DEFAULT_BUDGET, kind: str = "UPRNS") -> Tuple[bool, Jungle, Jungle]:
    """Compare macro normal forms through the intervention with ``r`` direct."""
    macro = build_macro(r, kind, {s for n in S for s in n.vertices.values() if not s.frontier})
    via = apply_operator(macro, S, "normal", budget)
    direct = normal_forms(r, S, budget)
    ok = via == direct and via.exhausted == direct.exhausted
    return ok, via, direct
