"""Overlapping cover representations and the bridges between block
homomorphisms and rule systems."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .canon import canonical_order
from .errors import (
    BlockMismatch,
    BudgetExceeded,
    GluingConflict,
    InconsistentOccupancy,
    NoInducedPreimage,
    NotCompilable,
    ValidationError,
)
from .jungle import Jungle
from .morphism import (
    NBH,
    BlockOccurrence,
    apply_parts,
    apply_substitution,
    block_occurrences,
    make_nbh,
    maximal_partitions,
    nbh_image,
    part_occurrence,
)
from .net import IN, OUT, Edge, Net, Port, Symbol, apex, build_net, empty_net, frontier, induced_subnet
from .rewrite import (
    DEFAULT_BUDGET,
    RNS,
    Budget,
    RulePreform,
    apply_match,
    embeddings,
    inserted_ids,
    make_rns,
    make_rule,
    normal_forms,
    right_substitutions,
    rule_matches,
)
from .structure import connected_subsets, net_union


@dataclass(frozen=True, eq=False)
class NuoRepresentation:
    """A net presented by a context and attachments that may overlap it.

    Parts are induced subnets keeping the subject's vertex ids; ``linkage``
    lists the subject's edges that lie inside no part.
    """

    subject: Net
    context: Net
    attachments: Tuple[Net, ...] = ()
    linkage: Tuple[Edge, ...] = ()
    validate: bool = field(default=True, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "attachments", tuple(self.attachments))
        object.__setattr__(self, "linkage", tuple(sorted(self.linkage)))
        if self.validate:
            covered = set(self.context.vertices)
            for a in self.attachments:
                covered |= set(a.vertices)
            if covered != set(self.subject.vertices):
                raise ValidationError("parts do not cover the subject")
            if nuo_invert(self).same_structure(self.subject) is False:
                raise InconsistentOccupancy("parts do not reassemble the subject")

    def parts(self) -> List[Net]:
        return [p for p in (self.context,) + self.attachments if len(p)]

    def block(self) -> Jungle:
        return Jungle(self.parts())


def representation(t: Net, part_sets: Sequence[Iterable[str]]) -> NuoRepresentation:
    """Representation whose context is the first set and attachments the rest."""
    sets = [frozenset(s) for s in part_sets]
    parts = [induced_subnet(t, s) if s else empty_net() for s in sets]
    return NuoRepresentation(t, parts[0], tuple(parts[1:]), _linkage(t, sets))


def _linkage(t: Net, sets: Sequence[frozenset]) -> Tuple[Edge, ...]:
    out = []
    for a, b in t.edges:
        if not any(a[0] in s and b[0] in s for s in sets):
            out.append((a, b))
    return tuple(sorted(out))


def nuo_invert(rep: NuoRepresentation) -> Net:
    """Reassemble the subject from the parts and the linkage."""
    try:
        return net_union(rep.parts(), rep.linkage, rep.subject.root)
    except GluingConflict as exc:
        raise InconsistentOccupancy(str(exc)) from exc


def nuo_enumerate(t: Net, max_blocks: int = 2, limit: int = 20000) -> List[NuoRepresentation]:
    """One representation per cover of ``t`` by at most ``max_blocks`` connected
    vertex sets (the whole vertex set always counts as a member)."""
    whole = frozenset(t.vertices)
    cands = sorted({frozenset(s) for s in connected_subsets(t)} | {whole}, key=lambda s: (-len(s), sorted(s)))
    out = []
    for k in range(1, max_blocks + 1):
        for combo in combinations(cands, k):
            if frozenset().union(*combo) != whole:
                continue
            out.append(representation(t, combo))
            if len(out) > limit:
                raise BudgetExceeded(f"more than {limit} representations")
    return out


def nornuo(rep: NuoRepresentation) -> NuoRepresentation:
    """Flatten to pairwise disjoint parts: the context loses the material
    owned by attachments, and later attachments lose what earlier ones own."""
    t = rep.subject
    taken = set()
    sets = []
    for a in rep.attachments:
        s = frozenset(a.vertices) - taken
        taken |= s
        if s:
            sets.append(s)
    ctx = frozenset(rep.context.vertices) - taken
    return representation(t, [ctx] + sets)


# ---------------------------------------------------------------------------
# compilation


def compile_nbh_to_rns(h: NBH) -> RNS:
    """One rule per block image; identity blocks produce no rule.

    Links whose letter an image lacks are dropped, as the block homomorphism
    does.  Images may not reuse letters of rewritten blocks, otherwise the
    normal form would rewrite material the homomorphism leaves alone.
    """
    active = h.active()
    alpha = {s for i in active for s in h.blocks[i].vertices.values()}
    rules = []
    for i in active:
        for k, u in enumerate(h.images[i]):
            if {s for s in u.vertices.values()} & alpha:
                raise NotCompilable(f"image {k} of block {i} reuses a block letter")
            rules.append(make_rule(f"b{i}_{k}", h.blocks[i], u))
    return make_rns(rules, name=f"rns({h.name})", drop_links=True)


def compile_rns_to_nbh(r: RNS) -> NBH:
    """Blocks are the left apexes; images are the right sides with each
    allowed right substitution applied."""
    if r.conditions.application_order or r.conditions.custom_predicates:
        raise NotCompilable("ordered or predicated systems have no block form")
    pairs: List[Tuple[Net, List[Net]]] = []
    for rule in r.rules:
        if rule.left.frontiers():
            raise NotCompilable(f"rule {rule.name} binds frontier letters on the left")
        d = apex(rule.left)
        imgs = []
        for g in right_substitutions(r, rule):
            u = apply_substitution(g, rule.right) if g is not None else rule.right
            if u.frontiers():
                raise NotCompilable(f"rule {rule.name} keeps unbound frontier letters")
            if not r.conditions.drop_links and not set(d.dangling.values()) <= set(u.dangling.values()):
                raise NotCompilable(f"rule {rule.name} loses an interface letter")
            imgs.append(u)
        for j, (d0, imgs0) in enumerate(pairs):
            if d0.key() == d.key():
                rename = _letter_transfer(d, d0)
                imgs0.extend(_rename_letters(u, rename) for u in imgs)
                break
        else:
            pairs.append((d, imgs))
    return make_nbh([(d, _dedup(imgs)) for d, imgs in pairs], f"nbh({r.name})")


def _letter_transfer(src: Net, dst: Net) -> Dict[str, str]:
    for m in embeddings(src, dst):
        if len(m) == len(dst):
            return {l: dst.dangling[(m[p[0]], p[1], p[2])] for p, l in src.dangling.items()}
    raise ValidationError("blocks are not isomorphic")


def _rename_letters(net: Net, mapping: Dict[str, str]) -> Net:
    return build_net(net.vertices, net.edges, {p: mapping.get(l, l) for p, l in net.dangling.items()}, net.root)


def _dedup(nets: Iterable[Net]) -> List[Net]:
    out, seen = [], set()
    for n in nets:
        sig = (n.key(), tuple(sorted((n.vertices[p[0]].name, p[1], p[2], l) for p, l in n.dangling.items())))
        if sig not in seen:
            seen.add(sig)
            out.append(n)
    return out


@dataclass
class EquivalenceReport:
    verdicts: List[Tuple[Net, bool, str]]

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.verdicts)

    def failures(self) -> List[Tuple[Net, str]]:
        return [(n, w) for n, ok, w in self.verdicts if not ok]


def equivalence_check(h: NBH, r: RNS, sample: Iterable[Net], budget: Budget = DEFAULT_BUDGET) -> EquivalenceReport:
    """Per net: does the block image equal the normal-form image?"""
    out = []
    for t in sample:
        a = nbh_image(h, t, budget)
        b = normal_forms(r, Jungle([t]), budget)
        ok = a == b and not b.exhausted
        witness = "" if ok else f"nbh={len(a)} nf={len(b)} exhausted={b.exhausted}"
        out.append((t, ok, witness))
    return EquivalenceReport(out)


# ---------------------------------------------------------------------------
# collapsing partitions and the micro/macro square


def collapse_symbol(part: Net) -> Tuple[Symbol, List[Port], List[Port]]:
    """Single-vertex stand-in for a part.

    The name is derived from the part's canonical form, so isomorphic parts
    collapse to the same letter.  Ports follow the canonical vertex order.
    """
    order = {v: i for i, v in enumerate(canonical_order(part))}
    ports = sorted(part.dangling, key=lambda p: (order[p[0]], p[1], p[2]))
    ins = [p for p in ports if p[1] == IN]
    outs = [p for p in ports if p[1] == OUT]
    digest = hashlib.sha1(part.key()).hexdigest()[:8]
    s = Symbol(f"B{digest}", tuple(range(1, len(ins) + 1)), tuple(range(1, len(outs) + 1)))
    return s, ins, outs


def part_id(part: Iterable[str]) -> str:
    return "c:" + min(part)


def collapse(net: Net, parts: Sequence[Iterable[str]]) -> Tuple[Net, Dict[Port, Port]]:
    """Replace every part by one vertex, keeping letters and outside links."""
    owner: Dict[str, int] = {}
    sets = [frozenset(p) for p in parts]
    for k, s in enumerate(sets):
        for v in s:
            owner[v] = k
    verts = {v: s for v, s in net.vertices.items() if v not in owner}
    port_map: Dict[Port, Port] = {}
    for k, s in enumerate(sets):
        sym_k, ins, outs = collapse_symbol(induced_subnet(net, s))
        cid = part_id(s)
        verts[cid] = sym_k
        for i, p in enumerate(ins):
            port_map[p] = (cid, IN, i + 1)
        for j, p in enumerate(outs):
            port_map[p] = (cid, OUT, j + 1)
    edges = []
    for a, b in net.edges:
        if a[0] in owner and b[0] in owner and owner[a[0]] == owner[b[0]]:
            continue
        edges.append((port_map.get(a, a), port_map.get(b, b)))
    dang = {port_map.get(p, p): l for p, l in net.dangling.items()}
    return build_net(verts, edges, dang), port_map


def collapse_nbh(net: Net, parts: Sequence[Iterable[str]], name: str = "collapse") -> NBH:
    """The alphabetic, letter-saving block homomorphism collapsing ``parts``."""
    pairs = []
    keys = set()
    for s in parts:
        block = induced_subnet(net, s)
        if block.key() in keys:
            continue
        keys.add(block.key())
        img, _ = collapse(block, [s])
        pairs.append((block, [img]))
    return make_nbh(pairs, name)


def unique_letters(net: Net) -> Net:
    ports = sorted(net.dangling)
    return build_net(net.vertices, net.edges, {p: f"k{i}" for i, p in enumerate(ports)}, net.root)


def _occurrences_for(h: NBH, t: Net, rep: Optional[NuoRepresentation]) -> List[BlockOccurrence]:
    if rep is None:
        for parts in maximal_partitions(block_occurrences(h, t, include_identity=True)):
            if frozenset().union(*[o.vertices for o in parts]) == frozenset(t.vertices):
                return list(parts)
        raise BlockMismatch("no partition of the net into blocks")
    out = []
    for part in nornuo(rep).parts():
        occ = part_occurrence(h, t, part.vertices)
        if occ is None:
            raise BlockMismatch(f"part {sorted(part.vertices)} is not a block occurrence")
        out.append(occ)
    return out


def _require_alphabetic(h: NBH, occs: Sequence[BlockOccurrence]) -> None:
    for o in occs:
        d, u = h.blocks[o.block], h.images[o.block][0]
        if len(u) != 1 or sorted(d.dangling.values()) != sorted(u.dangling.values()):
            raise ValidationError("intervening block homomorphisms must be alphabetic and letter saving")


@dataclass
class MicroMacro:
    micro: List[RulePreform]
    r1: RulePreform
    r2: List[RulePreform]
    w_o1: NBH
    w_o2: NBH
    square1: Tuple[Jungle, Jungle]
    square2: Tuple[Jungle, Jungle]

    @property
    def commutes(self) -> bool:
        return self.square1[0] == self.square1[1] and self.square2[0] == self.square2[1]


def _micro_left(r: RulePreform, K: Net, region: frozenset, part_of: Dict[str, int], to_image: Dict[Port, Port], m) -> Net:
    """The region of ``K`` whose collapse is the matched left side of ``r``,
    with interface ports named as the rule names them."""
    vmap = m.vmap
    left_if = r.left_interface
    label_at = {(vmap[p[0]], p[1], p[2]): l for p, l in left_if.items()}
    rule_edges = set()
    for a, b in r.left.edges:
        if a[0] in vmap and b[0] in vmap:
            rule_edges.add(((vmap[a[0]], a[1], a[2]), (vmap[b[0]], b[1], b[2])))
    frontier_names = {r.left.vertices[v].name for v in r.left.frontiers()}
    verts = {v: K.vertices[v] for v in region}
    edges = []
    kept = set()
    for a, b in K.edges:
        if a[0] in region and b[0] in region:
            if part_of[a[0]] == part_of[b[0]] or (to_image[a], to_image[b]) in rule_edges:
                edges.append((a, b))
                kept |= {a, b}
    dang = {}
    for v in sorted(region):
        for p in K.ports(v):
            if p in kept:
                continue
            label = label_at[to_image[p]]
            if label in frontier_names:
                fid = f"x:{label}"
                verts[fid] = frontier(label, OUT if p[1] == IN else IN)
                edges.append(((fid, OUT, 1), p) if p[1] == IN else (p, (fid, IN, 1)))
            else:
                dang[p] = label
    return build_net(verts, edges, dang)


def micro_macro(
    r: RulePreform,
    K: Net,
    w1: NBH,
    w2: NBH,
    s: Optional[NuoRepresentation] = None,
    t: Optional[NuoRepresentation] = None,
) -> MicroMacro:
    """Build the micro rule on the origin ``K`` and the two-rule macro, and
    evaluate both sides of both squares at every match of ``r``.

    ``w1`` and ``w2`` collapse presentations ``s`` and ``t`` of ``K`` (the
    first covering block partition is used when they are omitted).  ``r``
    must match the ``w1``-image of ``K``.
    """
    K = unique_letters(K)
    if s is not None:
        s = representation(K, [p.vertices for p in s.parts()])
    if t is not None:
        t = representation(K, [p.vertices for p in t.parts()])
    occ1 = _occurrences_for(w1, K, s)
    occ2 = _occurrences_for(w2, K, t)
    _require_alphabetic(w1, occ1)
    _require_alphabetic(w2, occ2)
    A = apply_parts(w1, K, occ1, [w1.images[o.block][0] for o in occ1])
    B = apply_parts(w2, K, occ2, [w2.images[o.block][0] for o in occ2])
    matches = rule_matches(r, A.net)
    if not matches:
        raise NoInducedPreimage(f"rule {r.name} does not match the collapsed origin")
    part_of = {v: k for k, o in enumerate(occ1) for v in o.vertices}
    image_part = {v: int(owner[1:]) for v, owner in A.owner.items() if owner.startswith("#")}
    P1 = [o.vertices for o in occ1]
    P2 = [o.vertices for o in occ2]
    P3 = sorted({p & q for p in P1 for q in P2 if p & q}, key=sorted)
    KW3, _ = collapse(K, P3)
    r1 = RulePreform("r1", B.net, KW3)
    rec1 = rule_matches(r1, B.net)[0]
    X, _ = apply_match(r1, B.net, rec1)
    x_ids = inserted_ids(r1, B.net)
    subs = list(r.right_subs) or [None]
    s1a, s1b, s2a, s2b = [], [], [], []
    micros, r2s = [], []
    w_o1 = w_o2 = None
    for m in matches:
        parts_hit = sorted({image_part[v] for v in m.position.vertices})
        region = frozenset().union(*[P1[k] for k in parts_hit])
        micro = RulePreform(
            f"micro({r.name})",
            _micro_left(r, K, region, part_of, A.port_map, m),
            r.right,
            r.right_subs,
            r.left_guards,
        )
        identity = tuple(sorted((v, v) for v in region))
        rec = next(x for x in rule_matches(micro, K) if x.mapping == identity)
        rest1 = [o for k, o in enumerate(occ1) if k not in parts_hit]
        inner3 = [p for p in P3 if p <= region]
        rest3 = [p for p in P3 if not p <= region]
        left2, _ = collapse(micro.left, inner3)
        r2 = RulePreform(f"r2({r.name})", left2, r.right, r.right_subs, r.left_guards)
        want = tuple(sorted((part_id(p), x_ids[part_id(p)]) for p in inner3))
        rec2 = next(x for x in rule_matches(r2, X) if x.mapping == want)
        micros.append(micro)
        r2s.append(r2)
        w_o1 = make_nbh(
            [(w1.blocks[i], w1.images[i]) for i in sorted({o.block for o in rest1})], "w_o1"
        )
        w_o2 = collapse_nbh(K, rest3, "w_o2")
        for g in subs:
            s1a.append(apply_match(r, A.net, m, g)[0])
            K1, _ = apply_match(micro, K, rec, g)
            s1b.append(apply_parts(w1, K1, rest1, [w1.images[o.block][0] for o in rest1]).net)
            s2a.append(apply_match(r2, X, rec2, g)[0])
            s2b.append(collapse(K1, rest3)[0])
    return MicroMacro(
        micros, r1, r2s, w_o1, w_o2, (Jungle(s1a), Jungle(s1b)), (Jungle(s2a), Jungle(s2b))
    )
