"""Net homomorphisms, net substitutions and net block homomorphisms.

Replacement nets name the ports they stand for with placeholder letters
``in<i>`` / ``out<j>``.  Blocks of a block homomorphism name their dangling
ports with arity letters, and an image port plays the role of the block port
carrying the same letter.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .errors import (
    BlockMismatch,
    BudgetExceeded,
    DomainGap,
    EmptyIntersection,
    NotANBH,
    NotReversible,
    ValidationError,
)
from .jungle import Jungle
from .net import OUT, Net, Port, Symbol, build_net, fresh_ids, induced_subnet
from .rewrite import DEFAULT_BUDGET, Budget, Fragment, NetSubstitution, embeddings

NBH_FLAGS = ("AlpUnexNBH", "AlpNBH", "ANBH", "ESNBH", "OESNBH", "LSNBH", "OLSNBH", "SANBH")


def placeholder(p: Port) -> str:
    return f"{p[1]}{p[2]}"


def _copy(net: Net, prefix: str) -> Tuple[Dict[str, str], List, Dict[Port, str]]:
    ids = {v: f"{prefix}{v}" for v in net.vertices}
    edges = [((ids[a[0]], a[1], a[2]), (ids[b[0]], b[1], b[2])) for a, b in net.edges]
    dang = {(ids[p[0]], p[1], p[2]): l for p, l in net.dangling.items()}
    return ids, edges, dang


# ---------------------------------------------------------------------------
# homomorphisms


@dataclass(frozen=True, eq=False)
class NetHomomorphism:
    symbol_map: Mapping[Symbol, Tuple[Net, ...]]
    frontier_map: Mapping[str, Tuple[Fragment, ...]] = field(default_factory=dict)
    arity_map: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for s, images in self.symbol_map.items():
            want = {placeholder(p) for p in s.ports("_")}
            for img in images:
                have = sorted(img.dangling.values())
                if sorted(want) != have:
                    raise ValidationError(f"image of {s.name} must expose exactly {sorted(want)}")
                for p, l in img.dangling.items():
                    if not l.startswith(p[1]):
                        raise ValidationError(f"placeholder {l} sits on an {p[1]}-port")
                if s.rank == 0 and not (len(img) == 1 and next(iter(img.vertices.values())).rank == 0):
                    raise ValidationError(f"nullary {s.name} must map to a nullary letter")

    @classmethod
    def identity(cls, symbols: Iterable[Symbol], frontiers: Iterable[Symbol] = ()) -> "NetHomomorphism":
        smap = {}
        for s in symbols:
            smap[s] = (build_net({"u": s}, (), {p: placeholder(p) for p in s.ports("u")}),)
        fmap = {}
        for f in frontiers:
            net = build_net({"u": f})
            fmap[f.name] = (Fragment(net, next(f.ports("u"))),)
        return cls(smap, fmap)


def _image_choices(h: NetHomomorphism, t: Net) -> List[Tuple[str, list]]:
    out = []
    for v in sorted(t.vertices):
        s = t.vertices[v]
        if s.frontier:
            opts = h.frontier_map.get(s.name)
        else:
            opts = h.symbol_map.get(s)
        if not opts:
            raise DomainGap(f"no image for {'frontier' if s.frontier else 'symbol'} {s.name}")
        out.append((v, list(opts)))
    return out


def _homomorphic_images(h: NetHomomorphism, t: Net, budget: Budget) -> List[Net]:
    choices = _image_choices(h, t)
    total = 1
    for _, opts in choices:
        total *= len(opts)
    if total > budget.max_matches:
        raise BudgetExceeded(f"{total} homomorphic images exceed the budget")
    results = []
    for pick in product(*[opts for _, opts in choices]):
        verts, edges, dang = {}, [], {}
        port_of: Dict[Port, Port] = {}
        for (v, _), img in zip(choices, pick):
            prefix = f"{v}/"
            if isinstance(img, Fragment):
                ids, e, d = _copy(img.net, prefix)
                p = next(t.vertices[v].ports(v))
                port_of[p] = (ids[img.port[0]], img.port[1], img.port[2])
                d.pop(port_of[p], None)
            else:
                ids, e, d = _copy(img, prefix)
                by_letter = {l: q for q, l in d.items()}
                for p in t.vertices[v].ports(v):
                    port_of[p] = by_letter[placeholder(p)]
                    del d[port_of[p]]
            verts.update({ids[u]: s for u, s in (img.net if isinstance(img, Fragment) else img).vertices.items()})
            edges.extend(e)
            dang.update(d)
        for a, b in t.edges:
            edges.append((port_of[a], port_of[b]))
        for p, l in t.dangling.items():
            dang[port_of[p]] = h.arity_map.get(l, l)
        results.append(build_net(verts, edges, dang))
    return results


def apply_homomorphism(h: NetHomomorphism, t: Net, budget: Budget = DEFAULT_BUDGET) -> Jungle:
    """Every net obtained by choosing one image per vertex and gluing the
    images along the edges of ``t``."""
    return Jungle(_homomorphic_images(h, t, budget))


def compose_homomorphisms(h1: NetHomomorphism, h2: NetHomomorphism, budget: Budget = DEFAULT_BUDGET) -> NetHomomorphism:
    """Relational composition: first ``h1``, then ``h2``."""
    smap = {}
    for s, images in h1.symbol_map.items():
        out: List[Net] = []
        seen = set()
        for img in images:
            for u in _homomorphic_images(h2, img, budget):
                sig = (u.key(), _letter_signature(u))
                if sig not in seen:
                    seen.add(sig)
                    out.append(u)
        smap[s] = tuple(out)
    fmap = {}
    for x, frags in h1.frontier_map.items():
        out_f = []
        for f in frags:
            marked = build_net(f.net.vertices, f.net.edges, {**f.net.dangling, f.port: "@"})
            for u in _homomorphic_images(h2, marked, budget):
                port = next(p for p, l in u.dangling.items() if l == "@")
                out_f.append(Fragment(u, port))
        fmap[x] = tuple(out_f)
    amap = {l: h2.arity_map.get(m, m) for l, m in h1.arity_map.items()}
    return NetHomomorphism(smap, fmap, amap)


def _letter_signature(net: Net) -> tuple:
    # letters matter for replacement nets; record which vertex kind carries each
    return tuple(sorted((l, net.vertices[p[0]].name, p[1], p[2]) for p, l in net.dangling.items()))


def apply_substitution(f: NetSubstitution, t: Net) -> Net:
    """Replace every frontier vertex of ``t`` by a copy of its fragment."""
    verts = {v: s for v, s in t.vertices.items() if not s.frontier}
    edges = []
    dang = {p: l for p, l in t.dangling.items() if not t.vertices[p[0]].frontier}
    partner_of: Dict[str, Optional[Port]] = {}
    for a, b in t.edges:
        fa, fb = t.vertices[a[0]].frontier, t.vertices[b[0]].frontier
        if fa:
            partner_of[a[0]] = b
        elif fb:
            partner_of[b[0]] = a
        else:
            edges.append((a, b))
    taken = set(t.vertices)
    for v in t.frontiers():
        x = t.vertices[v].name
        frag = f.frontier_map.get(x)
        if frag is None:
            raise DomainGap(f"substitution does not cover frontier letter {x}")
        new = fresh_ids(taken, len(frag.net), f"{x}_")
        taken |= set(new)
        ids = dict(zip(sorted(frag.net.vertices), new))
        for u, s in frag.net.vertices.items():
            verts[ids[u]] = s
        for a, b in frag.net.edges:
            edges.append(((ids[a[0]], a[1], a[2]), (ids[b[0]], b[1], b[2])))
        for p, l in frag.net.dangling.items():
            dang[(ids[p[0]], p[1], p[2])] = l
        fp = (ids[frag.port[0]], frag.port[1], frag.port[2])
        q = partner_of.get(v)
        if q is not None:
            edges.append((fp, q) if fp[1] == OUT else (q, fp))
            dang.pop(fp, None)
        for fport, target in frag.back_links:
            pp = (ids[fport[0]], fport[1], fport[2])
            edges.append((pp, target) if pp[1] == OUT else (target, pp))
            dang.pop(pp, None)
            dang.pop(target, None)
    return build_net(verts, edges, dang, t.root if t.root in verts else None)


# ---------------------------------------------------------------------------
# block homomorphisms


@dataclass(frozen=True, eq=False)
class NBH:
    """Blocks with their (set-valued) images.

    ``images[i]`` are the replacement nets of ``blocks[i]``.  A block whose only
    image is the block itself acts as the identity and is never rewritten.
    """

    blocks: Tuple[Net, ...]
    images: Tuple[Tuple[Net, ...], ...]
    frontier_map: Mapping[str, Tuple[Fragment, ...]] = field(default_factory=dict)
    arity_map: Mapping[str, str] = field(default_factory=dict)
    type_flags: FrozenSet[str] = frozenset()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        object.__setattr__(self, "images", tuple(tuple(i) for i in self.images))
        if len(self.blocks) != len(self.images):
            raise ValidationError("every block needs an image set")
        keys = set()
        for d, imgs in zip(self.blocks, self.images):
            if len(d) == 0 or d.frontiers():
                raise ValidationError("blocks are nonempty nets of ranked letters")
            if d.key() in keys:
                raise ValidationError("isomorphic blocks listed twice")
            keys.add(d.key())
            letters = list(d.dangling.values())
            if len(set(letters)) != len(letters):
                raise ValidationError("block letters must be distinct")
            if not imgs:
                raise ValidationError("a block needs at least one image")
            direction = {l: p[1] for p, l in d.dangling.items()}
            for img in imgs:
                seen = set()
                for p, l in img.dangling.items():
                    if l in direction:
                        if direction[l] != p[1] or l in seen:
                            raise ValidationError(f"image letter {l} does not fit the block")
                        seen.add(l)
        unknown = set(self.type_flags) - set(NBH_FLAGS)
        if unknown:
            raise ValidationError(f"unknown type flags {sorted(unknown)}")

    @property
    def block_map(self) -> Dict[bytes, Tuple[Net, ...]]:
        return {d.key(): imgs for d, imgs in zip(self.blocks, self.images)}

    def is_identity_block(self, i: int) -> bool:
        imgs = self.images[i]
        return len(imgs) == 1 and _same_lettered(imgs[0], self.blocks[i])

    def active(self) -> List[int]:
        return [i for i in range(len(self.blocks)) if not self.is_identity_block(i)]

    def block_alphabet(self) -> set:
        return {s for d in self.blocks for s in d.vertices.values()}

    def image_alphabet(self) -> set:
        return {s for imgs in self.images for u in imgs for s in u.vertices.values()}

    def with_flags(self, flags: Iterable[str]) -> "NBH":
        return NBH(self.blocks, self.images, self.frontier_map, self.arity_map, frozenset(flags), self.name)


def _same_lettered(a: Net, b: Net) -> bool:
    return a.same_structure(b) and dict(a.dangling) == dict(b.dangling)


def make_nbh(pairs: Sequence[Tuple[Net, Sequence[Net]]], name: str = "") -> NBH:
    return NBH(tuple(d for d, _ in pairs), tuple(tuple(i) for _, i in pairs), name=name)


def identity_nbh(blocks: Sequence[Net]) -> NBH:
    return make_nbh([(d, [d]) for d in blocks], "identity")


@dataclass(frozen=True)
class BlockOccurrence:
    block: int
    mapping: Tuple[Tuple[str, str], ...]

    @property
    def vertices(self) -> FrozenSet[str]:
        return frozenset(v for _, v in self.mapping)


def block_occurrences(h: NBH, t: Net, include_identity: bool = False) -> List[BlockOccurrence]:
    """Occurrences of blocks in ``t``; matched like rule left sides."""
    out = []
    idx = range(len(h.blocks)) if include_identity else h.active()
    for i in idx:
        for m in embeddings(h.blocks[i], t):
            out.append(BlockOccurrence(i, tuple(sorted(m.items()))))
    return sorted(out, key=lambda o: (o.block, o.mapping))


def maximal_partitions(occs: Sequence[BlockOccurrence]) -> List[Tuple[BlockOccurrence, ...]]:
    """Sets of pairwise disjoint occurrences that leave no further occurrence
    among the uncovered vertices."""
    out = []

    def rec(i: int, chosen: List[BlockOccurrence], used: FrozenSet[str]):
        if i == len(occs):
            if all(o.vertices & used for o in occs if o not in chosen):
                out.append(tuple(chosen))
            return
        o = occs[i]
        if not (o.vertices & used):
            chosen.append(o)
            rec(i + 1, chosen, used | o.vertices)
            chosen.pop()
        rec(i + 1, chosen, used)

    rec(0, [], frozenset())
    return out


@dataclass
class BlockApplication:
    net: Net
    owner: Dict[str, str]
    port_map: Dict[Port, Port] = field(default_factory=dict)


def apply_parts(h: NBH, t: Net, parts: Sequence[BlockOccurrence], picks: Sequence[Net]) -> BlockApplication:
    """Replace each occurrence by the chosen image, reconnecting through letters.

    Links whose letter is missing from an image are dropped.  ``owner`` maps
    every result vertex to the part (``"#k"``) or host vertex it came from.
    """
    covered: Dict[str, int] = {}
    block_port: Dict[Port, Tuple[int, Port]] = {}
    for k, occ in enumerate(parts):
        m = dict(occ.mapping)
        for u, v in m.items():
            covered[v] = k
            for p in h.blocks[occ.block].ports(u):
                block_port[(v, p[1], p[2])] = (k, p)
    verts = {v: s for v, s in t.vertices.items() if v not in covered}
    owner = {v: v for v in verts}
    edges = []
    dang = {p: l for p, l in t.dangling.items() if p[0] not in covered}
    by_letter: List[Dict[str, Port]] = []
    for k, (occ, img) in enumerate(zip(parts, picks)):
        ids, e, d = _copy(img, f"h{k}_")
        for u, s in img.vertices.items():
            verts[ids[u]] = s
            owner[ids[u]] = f"#{k}"
        edges.extend(e)
        dang.update(d)
        by_letter.append({l: q for q, l in d.items()})

    def translate(p: Port) -> Optional[Port]:
        if p[0] not in covered:
            return p
        k, bp = block_port[p]
        letter = h.blocks[parts[k].block].dangling.get(bp)
        if letter is None:
            return None
        return by_letter[k].get(letter)

    for a, b in sorted(t.edges):
        if a[0] in covered and b[0] in covered and covered[a[0]] == covered[b[0]]:
            blk = h.blocks[parts[covered[a[0]]].block]
            if block_port[a][1] not in blk.dangling:
                continue
        na, nb = translate(a), translate(b)
        if na is not None and nb is not None:
            edges.append((na, nb))
            dang.pop(na, None)
            dang.pop(nb, None)
    port_map = {}
    for k, occ in enumerate(parts):
        for v in dict(occ.mapping).values():
            for p in t.vertices[v].ports(v):
                q = translate(p)
                if q is None:
                    continue
                port_map[p] = q
                if p in t.dangling:
                    dang[q] = t.dangling[p]
    return BlockApplication(build_net(verts, edges, dang), owner, port_map)


def nbh_applications(h: NBH, t: Net, budget: Budget = DEFAULT_BUDGET) -> List[Tuple[Tuple[BlockOccurrence, ...], BlockApplication]]:
    out = []
    for parts in maximal_partitions(block_occurrences(h, t)):
        for picks in product(*[h.images[o.block] for o in parts]):
            out.append((parts, apply_parts(h, t, parts, picks)))
            if len(out) > budget.max_matches:
                raise BudgetExceeded("too many block applications")
    return out


def nbh_image(h: NBH, t: Net, budget: Budget = DEFAULT_BUDGET) -> Jungle:
    """All images of ``t`` over maximal block partitions and image choices."""
    return Jungle(app.net for _, app in nbh_applications(h, t, budget))


def part_occurrence(h: NBH, t: Net, vids: Iterable[str]) -> Optional[BlockOccurrence]:
    """The first block occurrence covering exactly ``vids`` (identity blocks
    included), or None."""
    want = frozenset(vids)
    sub = induced_subnet(t, want)
    for i in range(len(h.blocks)):
        if len(h.blocks[i]) != len(want):
            continue
        for m in embeddings(h.blocks[i], sub):
            return BlockOccurrence(i, tuple(sorted(m.items())))
    return None


def apply_nbh(h: NBH, rep) -> Net:
    """Image of a NUO representation: flatten it, then map each part by the
    first image of the block it is an occurrence of."""
    from .blocks import nornuo

    flat = nornuo(rep)
    t = flat.subject
    parts = []
    for part in flat.parts():
        occ = part_occurrence(h, t, part.vertices)
        if occ is None:
            raise BlockMismatch(f"part {sorted(part.vertices)} is not a block occurrence")
        parts.append(occ)
    return apply_parts(h, t, parts, [h.images[o.block][0] for o in parts]).net


# ---------------------------------------------------------------------------
# classification


def _link_profile(t: Net, owner: Mapping[str, str]) -> Dict[Tuple[str, str], int]:
    counts: Dict[Tuple[str, str], int] = {}
    for a, b in t.edges:
        x, y = owner[a[0]], owner[b[0]]
        if x != y:
            key = (min(x, y), max(x, y))
            counts[key] = counts.get(key, 0) + 1
    return counts


def _saving(h: NBH, t: Net, parts: Sequence[BlockOccurrence], app: BlockApplication) -> Tuple[bool, bool]:
    """(environment saving, linkage saving) for one application."""
    host_owner = {}
    for k, occ in enumerate(parts):
        for v in occ.vertices:
            host_owner[v] = f"#{k}"
    for v in t.vertices:
        host_owner.setdefault(v, v)
    before = _link_profile(t, host_owner)
    after = _link_profile(app.net, app.owner)
    es = all(after.get(k, 0) >= 1 for k in before)
    ls = all(after.get(k, 0) == n for k, n in before.items())
    return es, ls


def classify_nbh(h: NBH, sample: Iterable[Net] = ()) -> FrozenSet[str]:
    flags = set()
    singles = all(len(u) == 1 and not u.frontiers() for imgs in h.images for u in imgs)
    if singles:
        flags.add("AlpNBH")
        if all(u.dangling_counts() == d.dangling_counts() for d, imgs in zip(h.blocks, h.images) for u in imgs):
            flags.add("AlpUnexNBH")
    nonempty = all(len(u) > 0 for imgs in h.images for u in imgs)
    letters_kept = all(
        set(d.dangling.values()) <= set(u.dangling.values()) for d, imgs in zip(h.blocks, h.images) for u in imgs
    )
    es = ls = nonempty
    ls = ls and letters_kept
    oes, ols = es, ls
    sample = list(sample)
    for t in sample:
        for parts, app in nbh_applications(h, t):
            e, l = _saving(h, t, parts, app)
            es, ls = es and e, ls and l
    if es or ls:
        from .blocks import nornuo, nuo_enumerate

        for t in sample:
            for rep in nuo_enumerate(t, 2):
                flat = nornuo(rep)
                parts = [part_occurrence(h, t, p.vertices) for p in flat.parts()]
                if any(p is None for p in parts):
                    continue
                app = apply_parts(h, t, parts, [h.images[p.block][0] for p in parts])
                e, l = _saving(h, t, parts, app)
                oes, ols = oes and e, ols and l
    if es:
        flags.add("ESNBH")
        flags.add("ANBH")
    if oes and es:
        flags.add("OESNBH")
    if ls:
        flags.add("LSNBH")
    if ols and ls:
        flags.add("OLSNBH")
    if "ANBH" in flags and ls:
        flags.add("SANBH")
    return frozenset(flags)


def classified(h: NBH, sample: Iterable[Net] = ()) -> NBH:
    return h.with_flags(classify_nbh(h, sample))


def invert_anbh(h: NBH, sample: Iterable[Net] = ()) -> NBH:
    """The inverse block homomorphism mapping every image back to its block."""
    if "ANBH" not in classify_nbh(h, sample):
        raise NotANBH("inversion needs a context-preserving, environment-saving NBH")
    pairs = []
    seen: Dict[bytes, int] = {}
    blocks_alpha = {s for i in h.active() for s in h.blocks[i].vertices.values()}
    for i, (d, imgs) in enumerate(zip(h.blocks, h.images)):
        if h.is_identity_block(i):
            continue
        for u in imgs:
            k = u.key()
            if k in seen:
                raise NotReversible(f"blocks {seen[k]} and {i} share an image")
            seen[k] = i
            du = {l: p[1] for p, l in d.dangling.items()}
            uu = {l: p[1] for p, l in u.dangling.items()}
            if du != uu:
                raise NotReversible(f"letters of block {i} and its image do not correspond")
            if {s for s in u.vertices.values()} & blocks_alpha:
                raise NotReversible(f"image of block {i} reuses a block letter")
            pairs.append((u, [d]))
    return make_nbh(pairs, f"inverse({h.name})")


# ---------------------------------------------------------------------------
# link creation between overlapping cover members


def _vertex_sets(members: Iterable) -> List[FrozenSet[str]]:
    out = []
    for m in members:
        out.append(frozenset(m.vertices) if isinstance(m, Net) else frozenset(m))
    return out


def exploded_net(t: Net, Q: Sequence[FrozenSet[str]]) -> Tuple[Net, List[List[str]]]:
    """``t`` with the common part of ``Q`` present once per member of ``Q``.

    The first copy keeps the original links; the others keep only their
    internal edges and expose stubs where the original copy is linked out.
    """
    shared = frozenset.intersection(*Q)
    verts = dict(t.vertices)
    edges = list(t.edges)
    copies = [sorted(shared)]
    for k in range(1, len(Q)):
        ids = {v: f"{v}#{k}" for v in shared}
        for v in shared:
            verts[ids[v]] = t.vertices[v]
        for a, b in t.edges:
            if a[0] in shared and b[0] in shared:
                edges.append(((ids[a[0]], a[1], a[2]), (ids[b[0]], b[1], b[2])))
        copies.append(sorted(ids.values()))
    return build_net(verts, edges), copies


def new_link_count(h: NBH, t: Net, cover: Sequence, Q: Sequence) -> int:
    """Outward links gained when the common part of ``Q`` is imaged once per
    member, counted on the exploded net."""
    cover_sets = _vertex_sets(cover)
    q_sets = _vertex_sets(Q)
    if frozenset().union(*cover_sets) != frozenset(t.vertices):
        raise ValidationError("cover does not cover the net")
    if any(q not in cover_sets for q in q_sets):
        raise ValidationError("Q is not a subset of the cover")
    if not q_sets or not frozenset.intersection(*q_sets):
        raise EmptyIntersection("members of Q share no vertex")
    if "ESNBH" not in classify_nbh(h, [t]):
        raise NotANBH("link counting needs an environment-saving NBH")
    net, copies = exploded_net(t, q_sets)

    def outward(vids) -> int:
        group = set(vids)
        n = 0
        for v in group:
            for p in net.ports(v):
                q = net.partner(p)
                if q is None or q[0] not in group:
                    n += 1
        return n

    before = 0
    shared = set(copies[0])
    for v in shared:
        for p in t.ports(v):
            q = t.partner(p)
            if q is None or q[0] not in shared:
                before += 1
    return sum(outward(c) for c in copies) - before


def link_formula(t: Net, Q: Sequence) -> int:
    q_sets = _vertex_sets(Q)
    shared = frozenset.intersection(*q_sets)
    if not shared:
        raise EmptyIntersection("members of Q share no vertex")
    rank = len(induced_subnet(t, shared).dangling)
    return (len(q_sets) - 1) * rank
