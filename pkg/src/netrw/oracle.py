"""Brute-force reference semantics.

Nothing here calls the engine's matcher, replacement, closure or counting
code.  Only :meth:`Net.key` is shared, to compare results.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement, permutations
from typing import Dict, Iterable, List, Sequence, Tuple

from .errors import BudgetExceeded
from .jungle import Jungle
from .net import IN, OUT, Net, Symbol, build_net, sym


@dataclass(frozen=True)
class EnumerationSpec:
    alphabet: Tuple[Symbol, ...] = (sym("a", 1, 1), sym("b", 1, 1))
    max_vertices: int = 3
    max_edges: int = 6
    allow_loops: bool = True
    limit: int = 500000


def _matchings(outs: Sequence, ins: Sequence, max_edges: int, ok) -> Iterable[List[tuple]]:
    """Every partial injective pairing of out-ports with in-ports."""

    def rec(i: int, used: frozenset, acc: List[tuple]):
        if i == len(outs):
            yield list(acc)
            return
        yield from rec(i + 1, used, acc)
        if len(acc) >= max_edges:
            return
        for j, q in enumerate(ins):
            if j in used or not ok(outs[i], q):
                continue
            acc.append((outs[i], q))
            yield from rec(i + 1, used | {j}, acc)
            acc.pop()

    yield from rec(0, frozenset(), [])


def enumerate_nets(spec: EnumerationSpec = EnumerationSpec()) -> Jungle:
    alphabet = sorted(spec.alphabet)
    found: Dict[bytes, Net] = {}
    seen = 0
    for n in range(1, spec.max_vertices + 1):
        for combo in combinations_with_replacement(alphabet, n):
            verts = {f"v{i}": s for i, s in enumerate(combo)}
            outs = [(v, OUT, j) for v in sorted(verts) for j in verts[v].outs]
            ins = [(v, IN, i) for v in sorted(verts) for i in verts[v].ins]
            ok = (lambda a, b: True) if spec.allow_loops else (lambda a, b: a[0] != b[0])
            for edges in _matchings(outs, ins, spec.max_edges, ok):
                seen += 1
                if seen > spec.limit:
                    raise BudgetExceeded(f"enumeration exceeds {spec.limit} candidates")
                net = build_net(verts, edges)
                found.setdefault(net.key(), net)
    return Jungle(found.values())


def brute_isomorphic(a: Net, b: Net, rename_symbols: bool = False) -> bool:
    """Isomorphism by trying every vertex bijection."""
    if len(a) != len(b) or len(a.edges) != len(b.edges):
        return False
    av, bv = sorted(a.vertices), sorted(b.vertices)
    for perm in permutations(bv):
        m = dict(zip(av, perm))
        names: Dict[str, str] = {}
        good = True
        for v in av:
            sa, sb = a.vertices[v], b.vertices[m[v]]
            if sa.signature != sb.signature:
                good = False
                break
            if rename_symbols:
                if names.setdefault(sa.name, sb.name) != sb.name:
                    good = False
                    break
            elif sa.name != sb.name:
                good = False
                break
        if not good:
            continue
        if rename_symbols and len(set(names.values())) != len(names):
            continue
        if (a.root is None) != (b.root is None) or (a.root is not None and m[a.root] != b.root):
            continue
        mapped = {((m[x[0]], x[1], x[2]), (m[y[0]], y[1], y[2])) for x, y in a.edges}
        if mapped == set(b.edges):
            return True
    return False


def naive_link_counts(host: Net, occ: Iterable[str]) -> Tuple[int, int, int]:
    """(inward, outward, unoccupied) by walking every port of the occurrence."""
    occ = set(occ)
    inward = outward = free = 0
    for v in occ:
        s = host.vertices[v]
        for i in s.ins:
            src = [e[0] for e in host.edges if e[1] == (v, IN, i)]
            if not src:
                free += 1
            elif src[0][0] not in occ:
                inward += 1
        for j in s.outs:
            dst = [e[1] for e in host.edges if e[0] == (v, OUT, j)]
            if not dst:
                free += 1
            elif dst[0][0] not in occ:
                outward += 1
    return inward, outward, free


# ---------------------------------------------------------------------------
# naive rewriting


def _side_labels(side: Net) -> Dict[tuple, str]:
    labels = {}
    linked = {}
    for x, y in side.edges:
        linked[x] = y
        linked[y] = x
    for v, s in side.vertices.items():
        if s.frontier:
            continue
        for p in list((v, IN, i) for i in s.ins) + list((v, OUT, j) for j in s.outs):
            if p not in linked:
                labels[p] = side.dangling[p]
            elif side.vertices[linked[p][0]].frontier:
                labels[p] = side.vertices[linked[p][0]].name
    return labels


def _naive_matches(rule, host: Net):
    left = rule.left
    ranked = sorted(v for v, s in left.vertices.items() if not s.frontier)
    if not ranked:
        for v in sorted(host.vertices):
            yield {}, {left.vertices[next(iter(left.vertices))].name: (v, "", 0)}
        return
    host_link = {}
    for x, y in host.edges:
        host_link[x] = y
        host_link[y] = x
    for image in permutations(sorted(host.vertices), len(ranked)):
        m = dict(zip(ranked, image))
        if any(host.vertices[m[v]] != left.vertices[v] for v in ranked):
            continue
        ok = True
        binding = {}
        for x, y in left.edges:
            fx, fy = left.vertices[x[0]].frontier, left.vertices[y[0]].frontier
            if not fx and not fy:
                if ((m[x[0]], x[1], x[2]), (m[y[0]], y[1], y[2])) not in host.edges:
                    ok = False
                    break
            else:
                f, p = (x, y) if fx else (y, x)
                hp = (m[p[0]], p[1], p[2])
                if hp not in host_link:
                    ok = False
                    break
                name = left.vertices[f[0]].name
                partner = host_link[hp]
                guard = rule.left_guards.get(name)
                if guard is not None:
                    gs = guard.net.vertices[guard.port[0]]
                    if host.vertices[partner[0]] != gs or partner[1:] != guard.port[1:]:
                        ok = False
                        break
                binding[name] = partner
        if ok:
            yield m, binding


class _Dangling(Exception):
    pass


def _naive_replace(rule, host: Net, m: Dict[str, str], g, drop: bool) -> Net:
    occ = set(m.values())
    if not occ:
        extra = {v: s for v, s in rule.right.vertices.items() if not s.frontier}
        verts = dict(host.vertices)
        ids = {}
        k = 0
        for v in sorted(extra):
            while f"q{k}" in verts:
                k += 1
            ids[v] = f"q{k}"
            verts[ids[v]] = extra[v]
        edges = set(host.edges)
        for x, y in rule.right.edges:
            if x[0] in ids and y[0] in ids:
                edges.add(((ids[x[0]], x[1], x[2]), (ids[y[0]], y[1], y[2])))
        return build_net(verts, edges)
    left_labels = _side_labels(rule.left)
    right_labels = _side_labels(rule.right)
    by_label = {l: p for p, l in right_labels.items()}
    host_label = {(m[p[0]], p[1], p[2]): l for p, l in left_labels.items()}
    covered = set(g.frontier_map) if g is not None else set()
    verts = {v: s for v, s in host.vertices.items() if v not in occ}
    ids = {}
    k = 0
    for v in sorted(v for v, s in rule.right.vertices.items() if not s.frontier):
        while f"q{k}" in verts or f"q{k}" in host.vertices:
            k += 1
        ids[v] = f"q{k}"
        verts[ids[v]] = rule.right.vertices[v]
        k += 1

    def move(p):
        if p[0] not in occ:
            return p
        l = host_label.get(p)
        if l is None or l in covered or l not in by_label:
            return None
        q = by_label[l]
        return (ids[q[0]], q[1], q[2])

    edges = set()
    for x, y in host.edges:
        if x[0] in occ and y[0] in occ and (x not in host_label or y not in host_label):
            continue
        nx, ny = move(x), move(y)
        if nx is not None and ny is not None:
            edges.add((nx, ny))
        elif (nx is not None or ny is not None) and not drop:
            lost = [p for p, n in ((x, nx), (y, ny)) if n is None]
            if not all(host_label[p] in covered for p in lost):
                raise _Dangling()
    for x, y in rule.right.edges:
        if x[0] in ids and y[0] in ids:
            edges.add(((ids[x[0]], x[1], x[2]), (ids[y[0]], y[1], y[2])))
    k = 0
    for fv in sorted(v for v, s in rule.right.vertices.items() if s.frontier):
        name = rule.right.vertices[fv].name
        if name not in covered:
            continue
        frag = g.frontier_map[name]
        fid = {}
        for v in sorted(frag.net.vertices):
            while f"z{k}" in verts:
                k += 1
            fid[v] = f"z{k}"
            verts[fid[v]] = frag.net.vertices[v]
        for x, y in frag.net.edges:
            edges.add(((fid[x[0]], x[1], x[2]), (fid[y[0]], y[1], y[2])))
        (x, y), = [e for e in rule.right.edges if fv in (e[0][0], e[1][0])]
        inner = y if x[0] == fv else x
        rq = (ids[inner[0]], inner[1], inner[2])
        fp = (fid[frag.port[0]], frag.port[1], frag.port[2])
        edges.add((fp, rq) if fp[1] == OUT else (rq, fp))
        for fport, target in frag.back_links:
            pp = (fid[fport[0]], fport[1], fport[2])
            edges.add((pp, target) if pp[1] == OUT else (target, pp))
    return build_net(verts, edges)


def naive_successors(r, host: Net) -> List[Net]:
    cond = r.conditions
    found = []
    for rule in r.rules:
        for m, binding in _naive_matches(rule, host):
            found.append((rule, m, binding))
    if cond.custom_predicates:
        from .rewrite import MatchRecord
        from .structure import Position

        def keep(item):
            rule, m, binding = item
            rec = MatchRecord(
                rule.name, Position.of(m.values()), tuple(sorted(m.items())), tuple(sorted(binding.items()))
            )
            return all(p(host, rec) for _, p in sorted(cond.custom_predicates.items()))

        found = [it for it in found if keep(it)]
    if cond.application_order:
        for name in cond.application_order:
            chosen = [it for it in found if it[0].name == name]
            if chosen:
                found = chosen
                break
        else:
            found = []
    out = []
    for rule, m, _ in found:
        subs = list(rule.right_subs)
        allowed = cond.binding.get(rule.name)
        if allowed is not None:
            subs = [g for i, g in enumerate(subs) if i in allowed]
        for g in subs or [None]:
            out.append(_naive_replace(rule, host, m, g, cond.drop_links))
    return out


def _naive_explore(r, S: Jungle, budget):
    nets = {n.key(): n for n in S}
    edges = {}
    layer = dict(nets)
    exhausted = S.exhausted
    for depth in range(budget.max_steps + 1):
        if not layer:
            break
        if depth == budget.max_steps:
            if any(naive_successors(r, n) for n in layer.values()):
                exhausted = True
            break
        nxt = {}
        for k in sorted(layer):
            targets = set()
            for t in naive_successors(r, layer[k]):
                if len(t.vertices) > budget.max_vertices:
                    exhausted = True
                    continue
                targets.add(t.key())
                if t.key() not in nets:
                    nxt[t.key()] = t
            edges[k] = targets
        keys = sorted(nxt)
        room = budget.max_jungle - len(nets)
        if len(keys) > room:
            exhausted = True
            keys = keys[: max(room, 0)]
        layer = {k: nxt[k] for k in keys}
        nets.update(layer)
    return nets, edges, exhausted


def naive_rewrite_closure(r, S: Jungle, budget=None) -> Jungle:
    from .rewrite import Budget

    budget = budget or Budget()
    try:
        nets, _, exhausted = _naive_explore(r, S, budget)
    except _Dangling:
        from .errors import DanglingEnvironment

        raise DanglingEnvironment("oracle: environment link lost")
    return Jungle(nets.values(), exhausted)


def naive_normal_forms(r, S: Jungle, budget=None) -> Jungle:
    from .rewrite import Budget

    budget = budget or Budget()
    nets, edges, exhausted = _naive_explore(r, S, budget)
    # a cycle exists when some explored node reaches itself
    reach = {k: set(v) for k, v in edges.items()}
    changed = True
    while changed:
        changed = False
        for k in reach:
            extra = set()
            for t in reach[k]:
                extra |= reach.get(t, set())
            if not extra <= reach[k]:
                reach[k] |= extra
                changed = True
    cyclic = any(k in v for k, v in reach.items())
    irr = [n for n in nets.values() if not naive_successors(r, n)]
    return Jungle(irr, exhausted or cyclic)


@dataclass
class Verdict:
    passed: bool
    diffs: List[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.passed


def oracle_compare(engine_result: Jungle, oracle_result: Jungle) -> Verdict:
    diffs = []
    ek, ok = set(engine_result.keys()), set(oracle_result.keys())
    for k in sorted(ek - ok):
        diffs.append("engine-only " + k.decode())
    for k in sorted(ok - ek):
        diffs.append("oracle-only " + k.decode())
    if engine_result.exhausted != oracle_result.exhausted:
        diffs.append(f"exhausted engine={engine_result.exhausted} oracle={oracle_result.exhausted}")
    return Verdict(not diffs, diffs)
