"""Occurrences, enclosures, linkage statistics and saturated unions."""

from __future__ import annotations

from dataclasses import dataclass
from collections import Counter
from itertools import combinations
from typing import Iterable, List, Mapping, Optional, Tuple

from .errors import GluingConflict, InvalidPosition, SizeBudgetExceeded
from .jungle import Jungle
from .net import IN, OUT, Net, Port, build_net, induced_subnet, port_str


@dataclass(frozen=True, order=True)
class Position:
    """An occurrence in a host net, addressed by the host vertices it occupies."""

    vertices: Tuple[str, ...]

    @classmethod
    def of(cls, vids: Iterable[str]) -> "Position":
        return cls(tuple(sorted(vids)))

    def is_whole(self, host: Net) -> bool:
        return set(self.vertices) == set(host.vertices)


@dataclass(frozen=True)
class LinkStats:
    ilc: int
    olc: int
    unoccupied: int

    @property
    def orn(self) -> int:
        """Outward rank number: unoccupied ports plus inward linkages."""
        return self.unoccupied + self.ilc


def positions_of(host: Net, pattern: Net) -> List[Position]:
    """All vertex sets of ``host`` whose induced subnet is isomorphic to ``pattern``."""
    k = len(pattern)
    if k == 0 or k > len(host):
        return []
    want = Counter(pattern.vertices.values())
    key = pattern.key()
    by_symbol = sorted(v for v in host.vertices if host.vertices[v] in want)
    out = []
    for combo in combinations(by_symbol, k):
        if Counter(host.vertices[v] for v in combo) != want:
            continue
        if induced_subnet(host, combo).key() == key:
            out.append(Position.of(combo))
    return sorted(out)


def connected_subsets(net: Net, limit: Optional[int] = None) -> List[frozenset]:
    """Every nonempty connected vertex subset, each reported once."""
    order = sorted(net.vertices)
    rank = {v: i for i, v in enumerate(order)}
    found: List[frozenset] = []

    def grow(current: frozenset, frontier: frozenset, banned: frozenset, root: str):
        found.append(current)
        if limit is not None and len(found) > limit:
            raise SizeBudgetExceeded(f"more than {limit} connected subnets")
        banned = set(banned)
        for w in sorted(frontier, key=rank.get):
            new_front = (frontier | {
                u for u in net.neighbours(w)
                if rank[u] > rank[root] and u not in current and u not in banned
            }) - {w}
            grow(current | {w}, frozenset(new_front - banned), frozenset(banned), root)
            banned.add(w)

    for v in order:
        start = frozenset(u for u in net.neighbours(v) if rank[u] > rank[v])
        grow(frozenset([v]), start, frozenset(), v)
    return found


def enclosures(net: Net, limit: int = 5000) -> Jungle:
    """Connected induced subnets of ``net``, deduplicated."""
    return Jungle(induced_subnet(net, s) for s in connected_subsets(net, limit))


def link_stats(s: Net, host: Net, at: Position) -> LinkStats:
    occ = set(at.vertices)
    if not occ <= set(host.vertices):
        raise InvalidPosition(f"position {at.vertices} is not in the host")
    if induced_subnet(host, occ).key() != s.key():
        raise InvalidPosition("position does not address an occurrence of the net")
    return occurrence_stats(host, occ)


def occurrence_stats(host: Net, occ: Iterable[str]) -> LinkStats:
    occ = set(occ)
    ilc = olc = 0
    for a, b in host.edges:
        if a[0] not in occ and b[0] in occ:
            ilc += 1
        elif a[0] in occ and b[0] not in occ:
            olc += 1
    unocc = sum(1 for p in host.dangling if p[0] in occ)
    return LinkStats(ilc, olc, unocc)


def side_stats(side: Net) -> LinkStats:
    """Linkage statistics of a rule side's ranked part against its frontier letters."""
    return occurrence_stats(side, side.ranked())


def net_union(
    parts: Iterable[Net],
    gluing: Mapping[Port, Port] | Iterable[Tuple[Port, Port]] = (),
    root: Optional[str] = None,
) -> Net:
    """The net saturated by ``parts``.

    Parts sharing a vertex id are overlapping views of one vertex.  Each glued
    pair of dangling ports becomes one edge.
    """
    verts = {}
    partner = {}
    edges = set()
    letters = {}
    for part in parts:
        for v, s in part.vertices.items():
            if verts.setdefault(v, s) != s:
                raise GluingConflict(f"vertex {v} carries two symbols")
        for a, b in part.edges:
            for p, q in ((a, b), (b, a)):
                if partner.setdefault(p, q) != q:
                    raise GluingConflict(f"port {port_str(p)} linked twice")
            edges.add((a, b))
        for p, l in part.dangling.items():
            letters.setdefault(p, l)
    pairs = gluing.items() if isinstance(gluing, Mapping) else gluing
    for a, b in pairs:
        if a[1] == IN and b[1] == OUT:
            a, b = b, a
        if a[1] != OUT or b[1] != IN:
            raise GluingConflict(f"cannot glue {port_str(a)} to {port_str(b)}")
        for p in (a, b):
            if p[0] not in verts:
                raise GluingConflict(f"glued port {port_str(p)} has no vertex")
        if (a, b) in edges:
            continue
        for p, q in ((a, b), (b, a)):
            if p in partner:
                raise GluingConflict(f"port {port_str(p)} glued while occupied")
            partner[p] = q
        edges.add((a, b))
    dang = {p: l for p, l in letters.items() if p not in partner}
    try:
        return build_net(verts, edges, dang, root)
    except Exception as exc:  # invalid port references
        raise GluingConflict(str(exc)) from exc

