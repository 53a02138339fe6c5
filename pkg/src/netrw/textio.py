"""Plain-text documents for nets, rule systems, block homomorphisms,
transducers and problems.

Every document starts with a ``netrw-<kind> v1`` header, ``#`` starts a
comment and blank lines are ignored.  Net lines::

    node <id> <symbol> in=<k> out=<m>
    frontier <id> <name> in|out
    edge <id>.out<i> -> <id>.in<j>
    free <id>.(in|out)<i> = <letter>
    root <id>

``---`` separates the nets of a jungle.
"""

from __future__ import annotations

import re
from typing import Dict, List, Optional, Tuple

from .canon import canonical_order
from .errors import ParseError
from .jungle import Jungle
from .net import IN, OUT, Net, Symbol, build_net, frontier
from .rewrite import RNS, ConditionSet, Fragment, NetSubstitution, RulePreform

PORT_RE = re.compile(r"^(\S+)\.(in|out)(\d+)$")


class _Lines:
    def __init__(self, text: str):
        self.items: List[Tuple[int, str]] = []
        for no, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if line:
                self.items.append((no, line))
        self.pos = 0

    def peek(self) -> Optional[Tuple[int, str]]:
        return self.items[self.pos] if self.pos < len(self.items) else None

    def next(self) -> Tuple[int, str]:
        item = self.peek()
        if item is None:
            raise ParseError("unexpected end of document", self.items[-1][0] if self.items else 0, 0)
        self.pos += 1
        return item


def _header(lines: _Lines, kind: str) -> None:
    no, line = lines.next()
    if line != f"netrw-{kind} v1":
        raise ParseError(f"expected header 'netrw-{kind} v1'", no, 1)


def _port(tok: str, no: int, col: int) -> Tuple[str, str, int]:
    m = PORT_RE.match(tok)
    if not m:
        raise ParseError(f"malformed port reference '{tok}'", no, col)
    return (m.group(1), m.group(2), int(m.group(3)))


def _arity(tok: str, key: str, no: int, col: int) -> Tuple[int, ...]:
    if not tok.startswith(key + "="):
        raise ParseError(f"expected {key}=", no, col)
    val = tok[len(key) + 1:]
    if not val:
        return ()
    if "," in val or val.startswith("["):
        try:
            return tuple(int(x) for x in val.strip("[]").split(",") if x)
        except ValueError:
            raise ParseError(f"bad arity '{val}'", no, col) from None
    if not val.isdigit():
        raise ParseError(f"bad arity '{val}'", no, col)
    return tuple(range(1, int(val) + 1))


NET_WORDS = ("node", "frontier", "edge", "free", "root", "port", "back")


def _net_lines(lines: _Lines, stop=lambda line: False) -> Tuple[Net, Dict[str, object]]:
    """Consume net lines until a stop line or a non-net line."""
    verts: Dict[str, Symbol] = {}
    edges = []
    dang: Dict[Tuple[str, str, int], str] = {}
    root = None
    extra: Dict[str, object] = {"back": []}
    first = None
    while True:
        item = lines.peek()
        if item is None:
            break
        no, line = item
        word = line.split()[0]
        if stop(line) or word not in NET_WORDS:
            break
        lines.next()
        first = first or no
        toks = line.split()
        col = lambda i: line.find(toks[i]) + 1 if i < len(toks) else len(line) + 1
        if word == "node":
            if len(toks) != 5:
                raise ParseError("node needs: node <id> <symbol> in=<k> out=<m>", no, 1)
            verts[toks[1]] = Symbol(toks[2], _arity(toks[3], "in", no, col(3)), _arity(toks[4], "out", no, col(4)))
        elif word == "frontier":
            if len(toks) != 4 or toks[3] not in (IN, OUT):
                raise ParseError("frontier needs: frontier <id> <name> in|out", no, 1)
            verts[toks[1]] = frontier(toks[2], toks[3])
        elif word == "edge":
            if len(toks) != 4 or toks[2] != "->":
                raise ParseError("edge needs: edge <id>.out<i> -> <id>.in<j>", no, 1)
            a, b = _port(toks[1], no, col(1)), _port(toks[3], no, col(3))
            if a[1] != OUT or b[1] != IN:
                raise ParseError("edges run from an out-port to an in-port", no, col(1))
            edges.append((a, b))
        elif word == "free":
            if len(toks) != 4 or toks[2] != "=":
                raise ParseError("free needs: free <port> = <letter>", no, 1)
            dang[_port(toks[1], no, col(1))] = toks[3]
        elif word == "root":
            root = toks[1] if len(toks) == 2 else None
            if root is None:
                raise ParseError("root needs one vertex id", no, 1)
        elif word == "port":
            extra["port"] = _port(toks[1], no, col(1)) if len(toks) == 2 else None
            if extra["port"] is None:
                raise ParseError("port needs one port reference", no, 1)
        elif word == "back":
            if len(toks) != 4 or toks[2] != "->":
                raise ParseError("back needs: back <port> -> <port>", no, 1)
            extra["back"].append((_port(toks[1], no, col(1)), _port(toks[3], no, col(3))))
    return build_net(verts, edges, dang, root), extra


def _symbol_line(vid: str, s: Symbol) -> str:
    if s.frontier:
        return f"frontier {vid} {s.name} {IN if s.ins else OUT}"

    def ar(idx):
        if idx == tuple(range(1, len(idx) + 1)):
            return str(len(idx))
        return ",".join(map(str, idx))

    return f"node {vid} {s.name} in={ar(s.ins)} out={ar(s.outs)}"


def _net_body(n: Net, canonical: bool) -> List[str]:
    if canonical:
        order = canonical_order(n)
        ids = {v: f"n{k + 1}" for k, v in enumerate(order)}
    else:
        order = sorted(n.vertices)
        ids = {v: v for v in order}
    out = [_symbol_line(ids[v], n.vertices[v]) for v in order]
    pos = {v: k for k, v in enumerate(order)}

    def pkey(p):
        return (pos[p[0]], 0 if p[1] == IN else 1, p[2])

    for a, b in sorted(n.edges, key=lambda e: (pkey(e[0]), pkey(e[1]))):
        out.append(f"edge {ids[a[0]]}.{a[1]}{a[2]} -> {ids[b[0]]}.{b[1]}{b[2]}")
    counters = {IN: 0, OUT: 0}
    for p in sorted(n.dangling, key=pkey):
        if canonical:
            counters[p[1]] += 1
            letter = f"{'x' if p[1] == IN else 'y'}{counters[p[1]]}"
        else:
            letter = n.dangling[p]
        out.append(f"free {ids[p[0]]}.{p[1]}{p[2]} = {letter}")
    if n.root is not None:
        out.append(f"root {ids[n.root]}")
    return out


# ---------------------------------------------------------------------------
# nets and jungles


def parse_net(text: str) -> Net:
    nets = parse_nets(text)
    if len(nets) != 1:
        raise ParseError(f"expected one net, found {len(nets)}", 1, 1)
    return nets[0]


def parse_nets(text: str) -> List[Net]:
    lines = _Lines(text)
    _header(lines, "nets")
    nets = []
    while lines.peek() is not None:
        no, line = lines.peek()
        if line == "---":
            lines.next()
            continue
        if line.split()[0] not in NET_WORDS:
            raise ParseError(f"unknown directive '{line.split()[0]}'", no, 1)
        nets.append(_net_lines(lines, lambda l: l == "---")[0])
    return nets


def parse_jungle(text: str) -> Jungle:
    return Jungle(parse_nets(text))


def serialize_net(n: Net, canonical: bool = True) -> str:
    """Document for one net; in canonical mode vertex ids follow the canonical
    order and free letters are renamed ``x1, x2, ...`` (in) and ``y1, ...`` (out)."""
    return "\n".join(["netrw-nets v1"] + _net_body(n, canonical)) + "\n"


def serialize_nets(nets, canonical: bool = True) -> str:
    nets = list(nets)
    if canonical:
        bodies = sorted(("\n".join(_net_body(n, True)) for n in nets))
    else:
        bodies = ["\n".join(_net_body(n, False)) for n in nets]
    return "netrw-nets v1\n" + "\n---\n".join(bodies) + ("\n" if bodies else "")


# ---------------------------------------------------------------------------
# rule systems


def _fragment(lines: _Lines, no: int) -> Fragment:
    net, extra = _net_lines(lines)
    if "port" not in extra:
        raise ParseError("a fragment needs a 'port' line", no, 1)
    return Fragment(net, extra["port"], tuple(extra["back"]))


def _rule(lines: _Lines, name: str, start: int) -> RulePreform:
    left = right = None
    guards: Dict[str, Fragment] = {}
    subs: Dict[str, Dict[str, Fragment]] = {}
    while True:
        no, line = lines.next()
        if line == "}":
            break
        toks = line.split()
        if line == "left:":
            left = _net_lines(lines)[0]
        elif line == "right:":
            right = _net_lines(lines)[0]
        elif toks[0] == "lsub" and len(toks) == 3 and toks[2].endswith(":"):
            guards[toks[1]] = _fragment(lines, no)
        elif toks[0] == "rsub" and len(toks) == 3 and toks[2].endswith(":"):
            g, x = toks[1], toks[2][:-1]
            subs.setdefault(g, {})[x] = _fragment(lines, no)
        else:
            raise ParseError(f"unexpected '{line}' inside rule {name}", no, 1)
    if left is None or right is None:
        raise ParseError(f"rule {name} needs left: and right:", start, 1)
    rsubs = tuple(NetSubstitution(m, g) for g, m in sorted(subs.items()))
    return RulePreform(name, left, right, rsubs, guards)


def _rns_body(lines: _Lines, name: str = "", close: bool = False) -> RNS:
    rules = []
    cond = {}
    while lines.peek() is not None:
        no, line = lines.peek()
        if close and line == "}":
            lines.next()
            break
        lines.next()
        toks = line.split()
        if toks[0] == "rule" and len(toks) == 3 and toks[2] == "{":
            rules.append(_rule(lines, toks[1], no))
        elif line.startswith("order:"):
            cond["application_order"] = tuple(x.strip() for x in line[6:].split(",") if x.strip())
        elif line.startswith("instance-sensitive:"):
            cond["instance_sensitive"] = _bool(line.split(":", 1)[1], no)
        elif line.startswith("drop-links:"):
            cond["drop_links"] = _bool(line.split(":", 1)[1], no)
        elif line.startswith("name:"):
            name = line.split(":", 1)[1].strip()
        else:
            raise ParseError(f"unexpected '{line}'", no, 1)
    return RNS(tuple(rules), ConditionSet(**cond), name)


def _bool(val: str, no: int) -> bool:
    val = val.strip()
    if val not in ("true", "false"):
        raise ParseError(f"expected true or false, got '{val}'", no, 1)
    return val == "true"


def parse_rns(text: str) -> RNS:
    lines = _Lines(text)
    _header(lines, "rns")
    return _rns_body(lines)


def _fragment_lines(f: Fragment) -> List[str]:
    out = _net_body(f.net, False) + [f"port {f.port[0]}.{f.port[1]}{f.port[2]}"]
    for a, b in f.back_links:
        out.append(f"back {a[0]}.{a[1]}{a[2]} -> {b[0]}.{b[1]}{b[2]}")
    return out


def _rns_lines(r: RNS) -> List[str]:
    out = []
    if r.name:
        out.append(f"name: {r.name}")
    c = r.conditions
    if c.application_order is not None:
        out.append("order: " + ",".join(c.application_order))
    if c.instance_sensitive:
        out.append("instance-sensitive: true")
    if c.drop_links:
        out.append("drop-links: true")
    for rule in r.rules:
        out.append(f"rule {rule.name} {{")
        out.append("left:")
        out.extend(_net_body(rule.left, False))
        out.append("right:")
        out.extend(_net_body(rule.right, False))
        for x, f in sorted(rule.left_guards.items()):
            out.append(f"lsub {x}:")
            out.extend(_fragment_lines(f))
        for k, g in enumerate(rule.right_subs):
            gname = g.name or f"g{k}"
            for x, f in sorted(g.frontier_map.items()):
                out.append(f"rsub {gname} {x}:")
                out.extend(_fragment_lines(f))
        out.append("}")
    return out


def serialize_rns(r: RNS) -> str:
    return "\n".join(["netrw-rns v1"] + _rns_lines(r)) + "\n"


# ---------------------------------------------------------------------------
# block homomorphisms


def parse_nbh(text: str):
    from .morphism import make_nbh

    lines = _Lines(text)
    _header(lines, "nbh")
    pairs: List[Tuple[Net, List[Net]]] = []
    name = ""
    while lines.peek() is not None:
        no, line = lines.next()
        if line == "block:":
            pairs.append((_net_lines(lines)[0], []))
        elif line == "image:":
            if not pairs:
                raise ParseError("image before any block", no, 1)
            pairs[-1][1].append(_net_lines(lines)[0])
        elif line.startswith("name:"):
            name = line.split(":", 1)[1].strip()
        else:
            raise ParseError(f"unexpected '{line}'", no, 1)
    return make_nbh(pairs, name)


def serialize_nbh(h) -> str:
    out = ["netrw-nbh v1"]
    if h.name:
        out.append(f"name: {h.name}")
    for d, imgs in zip(h.blocks, h.images):
        out.append("block:")
        out.extend(_net_body(d, False))
        for img in imgs:
            out.append("image:")
            out.extend(_net_body(img, False))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# transducers


def parse_td(text: str):
    from .transducer import Transducer

    lines = _Lines(text)
    _header(lines, "td")
    systems: Dict[str, RNS] = {}
    attach: Dict[Tuple[str, int, int], List[str]] = {}
    carrier = None
    mode, name = "step", ""
    while lines.peek() is not None:
        no, line = lines.next()
        toks = line.split()
        if line == "carrier:":
            carrier = _net_lines(lines)[0]
        elif toks[0] == "system" and len(toks) == 3 and toks[2] == "{":
            systems[toks[1]] = _rns_body(lines, close=True)
        elif toks[0] == "attach" and len(toks) >= 6 and toks[4] == "=":
            try:
                key = (toks[1], int(toks[2]), int(toks[3]))
            except ValueError:
                raise ParseError("attach needs: attach <id> <in> <out> = <system> ...", no, 1) from None
            attach.setdefault(key, []).extend(toks[5:])
        elif line.startswith("mode:"):
            mode = line.split(":", 1)[1].strip()
        elif line.startswith("name:"):
            name = line.split(":", 1)[1].strip()
        else:
            raise ParseError(f"unexpected '{line}'", no, 1)
    if carrier is None:
        raise ParseError("transducer needs a carrier:", 1, 1)
    resolved = {}
    for k, names in attach.items():
        missing = [n for n in names if n not in systems]
        if missing:
            raise ParseError(f"unknown system {missing[0]}", 1, 1)
        resolved[k] = tuple(systems[n] for n in names)
    return Transducer(carrier, resolved, mode, name=name)


def serialize_td(td) -> str:
    from .transducer import Macro

    out = ["netrw-td v1"]
    if td.name:
        out.append(f"name: {td.name}")
    out.append(f"mode: {td.mode}")
    out.append("carrier:")
    out.extend(_net_body(td.carrier, False))
    names: Dict[int, str] = {}
    systems = []
    for k in sorted(td.attach):
        for op in td.attach[k]:
            r = op.r_m if isinstance(op, Macro) else op
            if id(r) not in names:
                names[id(r)] = f"s{len(names)}"
                systems.append((names[id(r)], r))
    for sname, r in systems:
        out.append(f"system {sname} {{")
        out.extend(_rns_lines(r))
        out.append("}")
    for k in sorted(td.attach):
        refs = [names[id(op.r_m if isinstance(op, Macro) else op)] for op in td.attach[k]]
        out.append(f"attach {k[0]} {k[1]} {k[2]} = " + " ".join(refs))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# problems


def parse_problem(text: str):
    from .solver import Demands, Problem, Recognizer

    lines = _Lines(text)
    _header(lines, "prob")
    subject: List[Net] = []
    final: List[Net] = []
    mode, depth, name = "subset", 2, ""
    target = None
    while lines.peek() is not None:
        no, line = lines.next()
        if line == "subject:":
            target = subject
        elif line == "final:":
            target = final
        elif line == "---":
            continue
        elif line.startswith("mode:"):
            mode = line.split(":", 1)[1].strip()
        elif line.startswith("max-depth:"):
            val = line.split(":", 1)[1].strip()
            if not val.isdigit():
                raise ParseError("max-depth needs an integer", no, 11)
            depth = int(val)
        elif line.startswith("name:"):
            name = line.split(":", 1)[1].strip()
        elif line.split()[0] in NET_WORDS and target is not None:
            lines.pos -= 1
            target.append(_net_lines(lines, lambda l: l == "---")[0])
        else:
            raise ParseError(f"unexpected '{line}'", no, 1)
    return Problem(Jungle(subject), Recognizer.of(final, mode), Demands(max_depth=depth), name)
