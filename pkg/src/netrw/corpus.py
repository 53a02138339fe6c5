"""Generators for the small nets, rule systems and instances used by checks."""

from __future__ import annotations

import random
from typing import List, Optional, Sequence

from .net import IN, OUT, Net, Symbol, build_net, frontier, induced_subnet, sym
from .rewrite import RNS, Fragment, NetSubstitution, RulePreform, make_rns, make_rule

UNARY = tuple(sym(n, 1, 1) for n in "abcdefgh")


def unary(name: str) -> Symbol:
    return sym(name, 1, 1)


def chain(names: Sequence[str], prefix: str = "v", in_letter: str = "i", out_letter: str = "o") -> Net:
    """A path of unary vertices whose free ends carry the given letters."""
    ids = [f"{prefix}{k}" for k in range(len(names))]
    verts = {v: unary(n) for v, n in zip(ids, names)}
    edges = [((ids[k], 1), (ids[k + 1], 1)) for k in range(len(ids) - 1)]
    dang = {}
    if ids:
        dang[(ids[0], IN, 1)] = in_letter
        dang[(ids[-1], OUT, 1)] = out_letter
    return build_net(verts, edges, dang)


def cycle(names: Sequence[str], prefix: str = "v") -> Net:
    ids = [f"{prefix}{k}" for k in range(len(names))]
    verts = {v: unary(n) for v, n in zip(ids, names)}
    edges = [((ids[k], 1), (ids[(k + 1) % len(ids)], 1)) for k in range(len(ids))]
    return build_net(verts, edges)


def guarded_side(name: str, x: str = "x", out_letter: str = "o") -> Net:
    """One unary vertex whose in-port is attached to frontier letter ``x``."""
    return build_net(
        {"v0": unary(name), "f": frontier(x, OUT)},
        [(("f", 1), ("v0", 1))],
        {("v0", OUT, 1): out_letter},
    )


def chain_rule(name: str, left: Sequence[str], right: Sequence[str]) -> RulePreform:
    return make_rule(name, chain(left), chain(right, prefix="w"))


def single_fragment(name: str) -> Fragment:
    """A one-vertex fragment glued by its out-port."""
    net = build_net({"u": unary(name)})
    return Fragment(net, ("u", OUT, 1))


def random_chain_rns(rng: random.Random, alphabet: Sequence[str], fresh: Sequence[str], rules: int = 2) -> RNS:
    """Chain rules with left sides over ``alphabet`` and right sides over
    ``alphabet`` plus ``fresh``; duplicates of a left side are allowed."""
    out: List[RulePreform] = []
    letters = list(alphabet) + list(fresh)
    for k in range(rules):
        left = [rng.choice(alphabet) for _ in range(rng.randint(1, 2))]
        right = [rng.choice(letters) for _ in range(rng.randint(1, 2))]
        out.append(chain_rule(f"r{k}", left, right))
    return make_rns(out, name="random")


def oracle_corpus(seed: int = 0, count: int = 40) -> List[RNS]:
    """Rule systems mixing chain rules, frontier rules, substitutions and
    condition sets, for comparison with the brute-force reference."""
    rng = random.Random(seed)
    corpus: List[RNS] = [
        make_rns([chain_rule("ab", "a", "b")]),
        make_rns([chain_rule("ab", "a", "b"), chain_rule("bc", "b", "c")]),
        make_rns([chain_rule("aa", "a", "a")]),
        make_rns([chain_rule("grow", "a", "aa")]),
        make_rns([chain_rule("merge", "ab", "c")]),
        make_rns([make_rule("fa", guarded_side("a"), guarded_side("b"))]),
        make_rns(
            [make_rule("ga", guarded_side("a"), guarded_side("c"), [NetSubstitution({"x": single_fragment("d")})])]
        ),
        make_rns(
            [chain_rule("ab", "a", "b"), chain_rule("ac", "a", "c")],
            application_order=("ac", "ab"),
        ),
        make_rns([chain_rule("ba", "b", "a")]),
        make_rns([chain_rule("drop", "ab", "")], drop_links=True),
    ]
    while len(corpus) < count:
        corpus.append(random_chain_rns(rng, "ab", "cd", rng.randint(1, 3)))
    return corpus[:count]


BLOCK_SHAPES = ("a", "b", "ab", "ba", "aa", "bb")


def random_image(rng: random.Random, fresh: Sequence[str]) -> Net:
    """A chain over ``fresh`` letters; sometimes one end letter is dropped."""
    names = [rng.choice(fresh) for _ in range(rng.randint(1, 2))]
    net = chain(names, prefix="w")
    drop = rng.random()
    if drop < 0.15:
        return build_net(net.vertices, net.edges, {p: l for p, l in net.dangling.items() if l != "o"})
    if drop < 0.3:
        return build_net(net.vertices, net.edges, {p: l for p, l in net.dangling.items() if l != "i"})
    return net


def random_nbh(rng: random.Random, fresh: Sequence[str] = "cde", identity_rate: float = 0.2):
    """A block homomorphism over the alphabet {a, b} with images over ``fresh``."""
    from .morphism import make_nbh

    shapes = rng.sample(BLOCK_SHAPES, rng.randint(1, 3))
    pairs = []
    for shape in shapes:
        d = chain(shape)
        if rng.random() < identity_rate:
            pairs.append((d, [d]))
        else:
            pairs.append((d, [random_image(rng, fresh) for _ in range(rng.randint(1, 2))]))
    return make_nbh(pairs, name="random")


def injective_anbh(rng: random.Random):
    """Blocks sent to single vertices with distinct fresh letters of equal rank."""
    from .morphism import make_nbh

    shapes = rng.sample(BLOCK_SHAPES, rng.randint(1, 3))
    pairs = []
    for k, shape in enumerate(shapes):
        pairs.append((chain(shape), [chain([f"z{k}"], prefix="w")]))
    return make_nbh(pairs, name="injective")


def rns_bridge_corpus(seed: int = 0, count: int = 50) -> List[RNS]:
    """Rule systems whose right sides use letters disjoint from every left side."""
    rng = random.Random(seed)
    out: List[RNS] = [
        make_rns([chain_rule("ab", "a", "c")]),
        make_rns([chain_rule("m", "ab", "c"), chain_rule("s", "a", "d")]),
        make_rns(
            [make_rule("g", chain("a"), build_net(
                {"w0": unary("c"), "f": frontier("x", OUT)},
                [(("f", 1), ("w0", 1))],
                {("w0", OUT, 1): "o"},
            ), [NetSubstitution({"x": single_fragment("d")}), NetSubstitution({"x": single_fragment("e")})])],
            drop_links=True,
        ),
    ]
    while len(out) < count:
        rules = []
        for k in range(rng.randint(1, 3)):
            left = [rng.choice("ab") for _ in range(rng.randint(1, 2))]
            right = [rng.choice("cde") for _ in range(rng.randint(1, 2))]
            rules.append(chain_rule(f"r{k}", left, right))
        out.append(make_rns(rules, name=f"bridge{len(out)}"))
    return out[:count]


def random_partition(rng: random.Random, net: Net) -> List[frozenset]:
    """A partition of the vertices into connected parts."""
    from .structure import connected_subsets

    left = set(net.vertices)
    parts = []
    while left:
        options = [s for s in connected_subsets(induced_subnet(net, left))]
        pick = rng.choice(options)
        parts.append(frozenset(pick))
        left -= pick
    return sorted(parts, key=sorted)


def contracting_rule(name: str, left: Net) -> RulePreform:
    """Rule replacing ``left`` by one fresh vertex carrying all its letters."""
    ports = sorted(left.dangling)
    letters = {p: f"p{i}" for i, p in enumerate(ports)}
    lhs = build_net(left.vertices, left.edges, letters)
    ins = [letters[p] for p in ports if p[1] == IN]
    outs = [letters[p] for p in ports if p[1] == OUT]
    z = sym("Z" + name, len(ins), len(outs))
    dang = {("z", IN, i + 1): l for i, l in enumerate(ins)}
    dang.update({("z", OUT, j + 1): l for j, l in enumerate(outs)})
    return make_rule(name, lhs, build_net({"z": z}, (), dang))


def micro_macro_instances(seed: int = 0, count: int = 20, nets: Optional[Sequence[Net]] = None):
    """(rule, origin, w1, w2, s, t) tuples whose rule matches the w1-image."""
    from .blocks import collapse, collapse_nbh, representation, unique_letters
    from .oracle import EnumerationSpec, enumerate_nets
    from .structure import connected_subsets

    rng = random.Random(seed)
    pool = [n for n in (nets or enumerate_nets(EnumerationSpec())) if n.is_connected() and len(n) >= 2]
    out = []
    while len(out) < count:
        K = unique_letters(rng.choice(pool))
        P1 = random_partition(rng, K)
        P2 = random_partition(rng, K)
        w1 = collapse_nbh(K, P1, "w1")
        w2 = collapse_nbh(K, P2, "w2")
        A, _ = collapse(K, P1)
        region = rng.choice(connected_subsets(A))
        left = induced_subnet(A, region)
        r = contracting_rule(f"m{len(out)}", left)
        out.append((r, K, w1, w2, representation(K, P1), representation(K, P2)))
    return out
