"""Canonical labelling of nets by colour refinement with individualisation.

Arity letters on dangling ports are ignored; only which ports dangle matters.
In ``rename_symbols`` mode symbol names are ignored up to a consistent
bijective renaming that keeps arities, which realises net isomorphism in the
"symbols may change, ranks may not" sense.
"""

from __future__ import annotations

from typing import Dict, List

from .net import Net


def _initial_colours(net: Net, vids: List[str], rename: bool) -> Dict[str, tuple]:
    out = {}
    for v in vids:
        s = net.vertices[v]
        base = (s.ins, s.outs, s.frontier, v == net.root)
        out[v] = base if rename else base + (s.name,)
    return out


def _rank(colours: Dict[str, tuple]) -> Dict[str, int]:
    order = {c: i for i, c in enumerate(sorted(set(colours.values())))}
    return {v: order[c] for v, c in colours.items()}


def _refine(net: Net, vids: List[str], colours: Dict[str, int]) -> Dict[str, int]:
    while True:
        sig = {}
        for v in vids:
            around = []
            for p in net.ports(v):
                q = net.partner(p)
                if q is not None:
                    around.append((p[1], p[2], q[2], colours[q[0]]))
            sig[v] = (colours[v], tuple(sorted(around)))
        new = _rank(sig)
        if len(set(new.values())) == len(set(colours.values())):
            return new
        colours = new


def _encode(net: Net, vids: List[str], colours: Dict[str, int], rename: bool) -> tuple:
    order = sorted(vids, key=lambda v: colours[v])
    pos = {v: i for i, v in enumerate(order)}
    names: Dict[str, int] = {}
    labels = []
    for v in order:
        s = net.vertices[v]
        if rename:
            names.setdefault(s.name, len(names))
            labels.append((s.ins, s.outs, s.frontier, names[s.name]))
        else:
            labels.append((s.ins, s.outs, s.frontier, s.name))
    edges = sorted(
        (pos[a[0]], a[2], pos[b[0]], b[2]) for a, b in net.edges
    )
    root = pos[net.root] if net.root is not None else -1
    return (tuple(labels), tuple(edges), root)


def _search(net: Net, vids: List[str], colours: Dict[str, int], rename: bool):
    colours = _refine(net, vids, colours)
    cells: Dict[int, List[str]] = {}
    for v in vids:
        cells.setdefault(colours[v], []).append(v)
    target = None
    for c in sorted(cells):
        if len(cells[c]) > 1:
            target = cells[c]
            break
    if target is None:
        return _encode(net, vids, colours, rename)
    best = None
    seen_branches = set()
    for v in sorted(target):
        split = {w: (c, 0 if w == v else 1) for w, c in colours.items()}
        leaf = _search(net, vids, _rank(split), rename)
        if leaf in seen_branches:
            continue
        seen_branches.add(leaf)
        if best is None or leaf < best:
            best = leaf
    return best


def canonical_tuple(net: Net, rename_symbols: bool = False) -> tuple:
    vids = sorted(net.vertices)
    if not vids:
        return ((), (), -1)
    colours = _rank(_initial_colours(net, vids, rename_symbols))
    return _search(net, vids, colours, rename_symbols)


def canonical_form(net: Net, rename_symbols: bool = False) -> bytes:
    """Byte string equal for two nets exactly when they are isomorphic.

    Strict mode (the default) preserves symbol names; it is the identity used
    by jungles.  ``rename_symbols=True`` gives the coarser renaming variant.
    """
    return repr(canonical_tuple(net, rename_symbols)).encode()


def is_isomorphic(a: Net, b: Net, rename_symbols: bool = True) -> bool:
    """Net isomorphism.

    By default symbol names may be renamed bijectively as long as ranks and
    positions are untouched; pass ``rename_symbols=False`` for label-exact
    isomorphism.
    """
    if len(a) != len(b) or len(a.edges) != len(b.edges):
        return False
    return a.key(rename_symbols) == b.key(rename_symbols)


def canonical_order(net: Net, rename_symbols: bool = False) -> List[str]:
    """Vertex ids in the order used by the canonical form."""
    vids = sorted(net.vertices)
    if not vids:
        return []
    target = canonical_tuple(net, rename_symbols)
    # replay the search and return the first leaf achieving the minimum
    return _leaf_order(net, vids, _rank(_initial_colours(net, vids, rename_symbols)), target, rename_symbols)


def _leaf_order(net, vids, colours, target, rename=False):
    colours = _refine(net, vids, colours)
    cells: Dict[int, List[str]] = {}
    for v in vids:
        cells.setdefault(colours[v], []).append(v)
    cell = next((cells[c] for c in sorted(cells) if len(cells[c]) > 1), None)
    if cell is None:
        if _encode(net, vids, colours, rename) == target:
            return sorted(vids, key=lambda v: colours[v])
        return None
    for v in sorted(cell):
        split = {w: (c, 0 if w == v else 1) for w, c in colours.items()}
        got = _leaf_order(net, vids, _rank(split), target, rename)
        if got is not None:
            return got
    return None

