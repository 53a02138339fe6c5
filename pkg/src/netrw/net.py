"""Nets: port graphs over a ranked alphabet.

A vertex carries a :class:`Symbol` with indexed in-ports and out-ports.  An
edge joins an out-port to an in-port.  Every port is either the endpoint of
exactly one edge or *dangling*, in which case it carries an arity letter that
names it as an attachment point.  Frontier letters are one-port vertices that
act as variables in rule sides.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Dict, FrozenSet, Iterable, Iterator, Mapping, Optional, Tuple

from .errors import DuplicatePortOccupancy, FrontierArityViolation, UnknownPort

IN = "in"
OUT = "out"

Port = Tuple[str, str, int]
Edge = Tuple[Port, Port]


@dataclass(frozen=True, order=True)
class Symbol:
    """A ranked letter, or a frontier letter when ``frontier`` is set."""

    name: str
    ins: Tuple[int, ...] = ()
    outs: Tuple[int, ...] = ()
    frontier: bool = False

    def __post_init__(self):
        if len(set(self.ins)) != len(self.ins) or len(set(self.outs)) != len(self.outs):
            raise ValueError(f"repeated arity index in symbol {self.name}")
        object.__setattr__(self, "ins", tuple(sorted(self.ins)))
        object.__setattr__(self, "outs", tuple(sorted(self.outs)))

    @property
    def rank(self) -> int:
        return len(self.ins) + len(self.outs)

    @property
    def signature(self) -> Tuple[Tuple[int, ...], Tuple[int, ...], bool]:
        return (self.ins, self.outs, self.frontier)

    def ports(self, vid: str) -> Iterator[Port]:
        for i in self.ins:
            yield (vid, IN, i)
        for j in self.outs:
            yield (vid, OUT, j)


def sym(name: str, n_in: int = 0, n_out: int = 0) -> Symbol:
    """Ranked symbol with in-ports ``1..n_in`` and out-ports ``1..n_out``."""
    return Symbol(name, tuple(range(1, n_in + 1)), tuple(range(1, n_out + 1)))


def frontier(name: str, direction: str = OUT) -> Symbol:
    """Frontier letter whose single port has the given direction."""
    if direction == OUT:
        return Symbol(name, (), (1,), True)
    return Symbol(name, (1,), (), True)


def port_str(p: Port) -> str:
    return f"{p[0]}.{p[1]}{p[2]}"


class Net:
    """An immutable, validated net.  Build instances with :func:`build_net`."""

    __slots__ = ("vertices", "edges", "dangling", "root", "_partner", "_keys")

    def __init__(self, vertices, edges, dangling, root, partner):
        self.vertices: Mapping[str, Symbol] = MappingProxyType(dict(vertices))
        self.edges: FrozenSet[Edge] = frozenset(edges)
        self.dangling: Mapping[Port, str] = MappingProxyType(dict(dangling))
        self.root: Optional[str] = root
        self._partner: Dict[Port, Port] = partner
        self._keys: Dict[bool, bytes] = {}

    def __setattr__(self, name, value):
        if hasattr(self, "_keys") and name != "_keys":
            raise AttributeError("Net is immutable")
        object.__setattr__(self, name, value)

    # structure -----------------------------------------------------------
    def __len__(self) -> int:
        return len(self.vertices)

    def ports(self, vid: Optional[str] = None) -> Iterator[Port]:
        if vid is not None:
            yield from self.vertices[vid].ports(vid)
            return
        for v in sorted(self.vertices):
            yield from self.vertices[v].ports(v)

    def partner(self, port: Port) -> Optional[Port]:
        return self._partner.get(port)

    def has_port(self, port: Port) -> bool:
        v, kind, idx = port
        s = self.vertices.get(v)
        if s is None:
            return False
        return idx in (s.ins if kind == IN else s.outs)

    def ranked(self) -> list:
        return sorted(v for v, s in self.vertices.items() if not s.frontier)

    def frontiers(self) -> list:
        return sorted(v for v, s in self.vertices.items() if s.frontier)

    def neighbours(self, vid: str) -> set:
        out = set()
        for p in self.ports(vid):
            q = self._partner.get(p)
            if q is not None:
                out.add(q[0])
        return out

    def letters(self) -> set:
        """Ranked and frontier symbol names occurring in the net."""
        return {s.name for s in self.vertices.values()}

    def symbols(self) -> set:
        return set(self.vertices.values())

    def dangling_counts(self) -> Tuple[int, int]:
        ins = sum(1 for p in self.dangling if p[1] == IN)
        return ins, len(self.dangling) - ins

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        start = next(iter(sorted(self.vertices)))
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for w in self.neighbours(v):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self.vertices)

    # identity ------------------------------------------------------------
    def key(self, rename_symbols: bool = False) -> bytes:
        k = self._keys.get(rename_symbols)
        if k is None:
            from .canon import canonical_form

            k = canonical_form(self, rename_symbols=rename_symbols)
            self._keys[rename_symbols] = k
        return k

    def __repr__(self) -> str:
        vs = ", ".join(f"{v}:{s.name}" for v, s in sorted(self.vertices.items()))
        es = ", ".join(f"{port_str(a)}->{port_str(b)}" for a, b in sorted(self.edges))
        return f"Net([{vs}] [{es}])"

    def same_structure(self, other: "Net") -> bool:
        return (
            dict(self.vertices) == dict(other.vertices)
            and self.edges == other.edges
            and self.root == other.root
        )


def build_net(
    vertices: Mapping[str, Symbol] | Iterable[Tuple[str, Symbol]],
    edges: Iterable[Tuple[Tuple[str, int], Tuple[str, int]] | Edge] = (),
    dangling: Optional[Mapping[Port, str]] = None,
    root: Optional[str] = None,
    fill: bool = True,
) -> Net:
    """Validate the parts of a net and return it.

    Edges may be given as ``((u, j), (v, i))`` meaning ``u.out j -> v.in i`` or
    as full port triples.  With ``fill`` set, ports that are neither occupied
    nor listed in ``dangling`` get a generated arity letter.
    """
    verts = dict(vertices)
    for v, s in verts.items():
        if s.frontier and s.rank != 1:
            raise FrontierArityViolation(f"frontier vertex {v} must have exactly one port")
    partner: Dict[Port, Port] = {}
    norm_edges = set()

    def check(p: Port, kind: str) -> None:
        s = verts.get(p[0])
        if s is None:
            raise UnknownPort(f"unknown vertex in port {port_str(p)}")
        if p[1] != kind or p[2] not in (s.ins if kind == IN else s.outs):
            raise UnknownPort(f"vertex {p[0]} has no port {p[1]}{p[2]}")

    for e in edges:
        a, b = e
        if len(a) == 2:
            a = (a[0], OUT, a[1])
            b = (b[0], IN, b[1])
        check(a, OUT)
        check(b, IN)
        for p, q in ((a, b), (b, a)):
            if p in partner:
                raise DuplicatePortOccupancy(f"port {port_str(p)} occupied twice")
            partner[p] = q
        norm_edges.add((a, b))
    dang: Dict[Port, str] = {}
    for p, letter in (dangling or {}).items():
        if not (p[0] in verts and p[1] in (IN, OUT)):
            raise UnknownPort(f"unknown dangling port {port_str(p)}")
        check(p, p[1])
        if p in partner:
            raise DuplicatePortOccupancy(f"port {port_str(p)} is both linked and dangling")
        dang[p] = letter
    for v in sorted(verts):
        for p in verts[v].ports(v):
            if p not in partner and p not in dang:
                if not fill:
                    raise UnknownPort(f"port {port_str(p)} neither linked nor dangling")
                dang[p] = f"{p[0]}.{p[1]}{p[2]}"
    if root is not None and root not in verts:
        raise UnknownPort(f"root {root} is not a vertex")
    return Net(verts, norm_edges, dang, root, partner)


def empty_net() -> Net:
    return build_net({}, ())


def induced_subnet(net: Net, vids: Iterable[str], cut_letters: bool = True) -> Net:
    """Restrict ``net`` to ``vids``.

    Ports whose edge leaves the subset become dangling.  With ``cut_letters``
    the new letter records the cut edge, so both sides of a cut share a name.
    """
    keep = set(vids)
    verts = {v: net.vertices[v] for v in keep}
    edges = [e for e in net.edges if e[0][0] in keep and e[1][0] in keep]
    dang = {}
    for p, letter in net.dangling.items():
        if p[0] in keep:
            dang[p] = letter
    for e in net.edges:
        a, b = e
        if (a[0] in keep) != (b[0] in keep):
            inside = a if a[0] in keep else b
            dang[inside] = f"~{port_str(a)}>{port_str(b)}" if cut_letters else port_str(inside)
    root = net.root if net.root in keep else None
    return build_net(verts, edges, dang, root)


def remove_vertices(net: Net, vids: Iterable[str]) -> Net:
    drop = set(vids)
    return induced_subnet(net, [v for v in net.vertices if v not in drop])


def apex(net: Net) -> Net:
    """The net stripped of its frontier attachments.

    A ranked port that was joined to a frontier letter becomes dangling and
    takes the frontier letter's name as its arity letter.
    """
    keep = net.ranked()
    verts = {v: net.vertices[v] for v in keep}
    keepset = set(keep)
    edges = [e for e in net.edges if e[0][0] in keepset and e[1][0] in keepset]
    dang = {p: l for p, l in net.dangling.items() if p[0] in keepset}
    for e in net.edges:
        for p, q in (e, e[::-1]):
            if p[0] in keepset and q[0] not in keepset:
                dang[p] = net.vertices[q[0]].name
    return build_net(verts, edges, dang, net.root if net.root in keepset else None)


def relabel_ids(net: Net, mapping: Mapping[str, str]) -> Net:
    """Rename vertex ids (``mapping`` must be injective on ``net``)."""

    def mp(p: Port) -> Port:
        return (mapping.get(p[0], p[0]), p[1], p[2])

    verts = {mapping.get(v, v): s for v, s in net.vertices.items()}
    if len(verts) != len(net.vertices):
        raise ValueError("vertex renaming is not injective")
    edges = [(mp(a), mp(b)) for a, b in net.edges]
    dang = {mp(p): l for p, l in net.dangling.items()}
    root = mapping.get(net.root, net.root) if net.root else None
    return build_net(verts, edges, dang, root)


def rename_symbols(net: Net, mapping: Mapping[str, str]) -> Net:
    """Rename ranked/frontier symbol names, keeping arities."""
    verts = {
        v: Symbol(mapping.get(s.name, s.name), s.ins, s.outs, s.frontier)
        for v, s in net.vertices.items()
    }
    return build_net(verts, net.edges, net.dangling, net.root)


def with_letters(net: Net, letters: Mapping[Port, str]) -> Net:
    dang = dict(net.dangling)
    for p, l in letters.items():
        if p not in dang:
            raise UnknownPort(f"port {port_str(p)} is not dangling")
        dang[p] = l
    return build_net(net.vertices, net.edges, dang, net.root)


def disjoint_union(nets: Iterable[Net], prefix: str = "u") -> Net:
    verts, edges, dang = {}, [], {}
    for k, n in enumerate(nets):
        m = {v: f"{prefix}{k}_{v}" for v in n.vertices}
        r = relabel_ids(n, m)
        verts.update(r.vertices)
        edges.extend(r.edges)
        dang.update(r.dangling)
    return build_net(verts, edges, dang)


def fresh_ids(taken: Iterable[str], count: int, prefix: str = "n") -> list:
    taken = set(taken)
    out, k = [], 0
    while len(out) < count:
        cand = f"{prefix}{k}"
        if cand not in taken:
            out.append(cand)
            taken.add(cand)
        k += 1
    return out
