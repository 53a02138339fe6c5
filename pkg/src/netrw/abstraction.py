"""Abstraction relations over finite net universes and the laws they obey.

A relation lives on a finite universe (a jungle) and is stored as a set of
key pairs plus, for each related pair, a witness string naming what relates
them.  Every check returns a :class:`LawReport` whose lines read
``PASS|FAIL <law> [witness ...]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from .blocks import collapse
from .canon import canonical_order
from .errors import BudgetExceeded, ValidationError
from .jungle import Jungle
from .net import Net, Symbol
from .structure import connected_subsets

KINDS = ("PRNS", "GPRNS", "CLRNS", "UPRNS", "NBH")
Key = bytes


def dangling_signature(net: Net) -> Tuple[int, int]:
    """The default base abstraction key: numbers of free in- and out-ports."""
    return net.dangling_counts()


# ---------------------------------------------------------------------------
# reports


@dataclass
class LawVerdict:
    law: str
    passed: bool
    witnesses: List[str] = field(default_factory=list)
    informational: bool = False

    def line(self) -> str:
        return " ".join(["PASS" if self.passed else "FAIL", self.law] + self.witnesses[:5])


@dataclass
class LawReport:
    verdicts: List[LawVerdict]

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts if not v.informational)

    def lines(self) -> List[str]:
        return [v.line() for v in self.verdicts]

    def verdict(self, law: str) -> LawVerdict:
        return next(v for v in self.verdicts if v.law == law)

    def __add__(self, other: "LawReport") -> "LawReport":
        return LawReport(self.verdicts + other.verdicts)


def _short(net: Net) -> str:
    return "[" + ",".join(sorted(s.name for s in net.vertices.values())) + f"|{len(net.edges)}]"


# ---------------------------------------------------------------------------
# relations


class _UnionFind:
    def __init__(self, items: Iterable):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


@dataclass(eq=False)
class AbstractionRelation:
    kind: str
    universe: Jungle
    pairs: FrozenSet[Tuple[Key, Key]]
    witnesses: Dict[Tuple[Key, Key], str] = field(default_factory=dict)

    def __post_init__(self):
        keys = set(self.universe.keys())
        for a, b in self.pairs:
            if a not in keys or b not in keys:
                raise ValidationError("relation leaves its universe")

    def related(self, s: Net, t: Net) -> bool:
        return (s.key(), t.key()) in self.pairs

    def classes(self) -> List[Jungle]:
        """Classes of the relation (meaningful when it is an equivalence)."""
        seen: Set[Key] = set()
        out = []
        for k in self.universe.keys():
            if k in seen:
                continue
            members = [self.universe.get(b) for a, b in self.pairs if a == k]
            members.append(self.universe.get(k))
            j = Jungle(members)
            seen |= set(j.keys())
            out.append(j)
        return out

    def class_of(self, t: Net) -> Jungle:
        k = t.key()
        return Jungle([self.universe.get(b) for a, b in self.pairs if a == k] + [t])

    def partition(self) -> "Partition":
        return Partition(self.classes())

    def restricted(self, pairs: Iterable[Tuple[Key, Key]]) -> "AbstractionRelation":
        return AbstractionRelation(self.kind, self.universe, frozenset(pairs), dict(self.witnesses))


def equivalence_closure(universe: Jungle, pairs: Iterable[Tuple[Key, Key]]) -> FrozenSet[Tuple[Key, Key]]:
    uf = _UnionFind(universe.keys())
    for a, b in pairs:
        uf.union(a, b)
    groups: Dict[Key, List[Key]] = {}
    for k in universe.keys():
        groups.setdefault(uf.find(k), []).append(k)
    return frozenset((a, b) for g in groups.values() for a in g for b in g)


def from_pairs(universe: Jungle, pairs: Iterable[Tuple[Net, Net]], kind: str = "NBH", close: bool = True,
               witnesses: Optional[Mapping[Tuple[Key, Key], str]] = None) -> AbstractionRelation:
    keyed = [(a.key(), b.key()) for a, b in pairs]
    wit = dict(witnesses or {})
    for a, b in keyed:
        wit.setdefault((a, b), "given")
        wit.setdefault((b, a), "given")
    full = equivalence_closure(universe, keyed) if close else frozenset(keyed)
    for a, b in full:
        wit.setdefault((a, b), "identity" if a == b else "closure")
    return AbstractionRelation(kind, universe, full, wit)


def signature_nbh(symbols: Iterable[Symbol]):
    """Alphabetic block homomorphism sending every symbol to a letter named
    after its rank, so symbols of equal rank merge."""
    from .morphism import make_nbh
    from .transducer import symbol_net

    pairs = []
    for s in sorted({s for s in symbols if not s.frontier}):
        twin = Symbol(f"sig{len(s.ins)}.{len(s.outs)}", s.ins, s.outs)
        pairs.append((symbol_net(s), [symbol_net(twin, "w")]))
    return make_nbh(pairs, "signature")


def kernel_relation(universe: Jungle, h, kind: str = "NBH") -> AbstractionRelation:
    """Nets related when their images under the block homomorphism ``h``
    coincide; an equivalence by construction."""
    from .morphism import nbh_image

    return from_key(universe, lambda t: tuple(nbh_image(h, t).keys()), kind)


def default_theta(universe: Jungle) -> AbstractionRelation:
    """The base net abstraction: the kernel of the rank-merging alphabetic
    block homomorphism over the universe's alphabet."""
    symbols = {s for n in universe for s in n.vertices.values()}
    return kernel_relation(universe, signature_nbh(symbols))


def from_key(universe: Jungle, keyfn: Callable[[Net], object] = dangling_signature, kind: str = "NBH") -> AbstractionRelation:
    groups: Dict[object, List[Net]] = {}
    for n in universe:
        groups.setdefault(keyfn(n), []).append(n)
    pairs = frozenset((a.key(), b.key()) for g in groups.values() for a in g for b in g)
    wit = {p: f"key={keyfn(universe.get(p[0]))}" for p in pairs}
    return AbstractionRelation(kind, universe, pairs, wit)


def from_partition(universe: Jungle, classes: Iterable[Iterable[Net]], kind: str = "NBH") -> AbstractionRelation:
    pairs = set()
    for c in classes:
        ks = [n.key() for n in c]
        pairs |= {(a, b) for a in ks for b in ks}
    return AbstractionRelation(kind, universe, frozenset(pairs), {p: "class" for p in pairs})


def identity_relation(universe: Jungle, kind: str = "NBH") -> AbstractionRelation:
    pairs = frozenset((k, k) for k in universe.keys())
    return AbstractionRelation(kind, universe, pairs, {p: "identity" for p in pairs})


def sisters_relation(universe: Jungle, kind: str, origins: Sequence[Net] = (), limit: int = 2000) -> AbstractionRelation:
    """Pairs of universe members that are abstract sisters, closed into an
    equivalence (witnesses record the direct finds)."""
    members = list(universe)
    found = []
    wit = {}
    for i, s in enumerate(members):
        for t in members[i:]:
            w = sisters_check(s, t, kind, origins, limit)
            if w is not None:
                found.append((s, t))
                wit[(s.key(), t.key())] = w.describe()
                wit[(t.key(), s.key())] = w.describe()
    return from_pairs(universe, found, kind, True, wit)


# ---------------------------------------------------------------------------
# abstract sisters


@dataclass(frozen=True)
class SisterWitness:
    kind: str
    origin: Optional[Net]
    parts_s: Tuple[FrozenSet[str], ...] = ()
    parts_t: Tuple[FrozenSet[str], ...] = ()
    renaming: Tuple[Tuple[str, str], ...] = ()

    def describe(self) -> str:
        if self.kind == "NBH":
            return f"origin={_short(self.origin)} parts={len(self.parts_s)}/{len(self.parts_t)}"
        return "renaming=" + ",".join(f"{a}>{b}" for a, b in self.renaming)


def symbol_renaming(s: Net, t: Net) -> Optional[Dict[str, str]]:
    """A bijective renaming of symbols taking ``s`` onto ``t``, if any."""
    if s.key(True) != t.key(True):
        return None
    out: Dict[str, str] = {}
    for a, b in zip(canonical_order(s, True), canonical_order(t, True)):
        out[s.vertices[a].name] = t.vertices[b].name
    return out


def vertex_partitions(net: Net, limit: int = 5000) -> List[Tuple[FrozenSet[str], ...]]:
    """All partitions of the vertex set into connected parts."""
    conn = [frozenset(s) for s in connected_subsets(net)]
    out = []

    def rec(left: FrozenSet[str], acc: List[FrozenSet[str]]):
        if not left:
            out.append(tuple(sorted(acc, key=sorted)))
            if len(out) > limit:
                raise BudgetExceeded("too many partitions")
            return
        first = min(left)
        for s in conn:
            if first in s and s <= left:
                acc.append(s)
                rec(left - s, acc)
                acc.pop()

    rec(frozenset(net.vertices), [])
    return out


def sisters_check(s: Net, t: Net, kind: str = "NBH", origins: Sequence[Net] = (), limit: int = 2000) -> Optional[SisterWitness]:
    """Search a witness that ``s`` and ``t`` are abstract sisters.

    Rule-system kinds use a relabelling intervention, so sisters are exactly
    the nets equal up to a symbol renaming.  The block kind searches a common
    origin among ``s``, ``t`` and ``origins`` with two partitions whose
    collapses are ``s`` and ``t`` up to renaming.
    """
    if kind not in KINDS:
        raise ValidationError(f"unknown kind {kind}")
    if kind != "NBH":
        m = symbol_renaming(s, t)
        if m is None:
            return None
        return SisterWitness(kind, None, renaming=tuple(sorted(m.items())))
    if s.dangling_counts() != t.dangling_counts():
        return None
    if s.key(True) == t.key(True):
        # identity blocks everywhere: the origin is s itself
        singles = tuple(frozenset([v]) for v in sorted(s.vertices))
        return SisterWitness(kind, s, singles, singles)
    for K in [s, t] + list(origins):
        if K.dangling_counts() != s.dangling_counts():
            continue
        hits_s, hits_t = [], []
        for P in vertex_partitions(K, limit):
            img = collapse(K, P)[0]
            if img.key(True) == s.key(True):
                hits_s.append(P)
            if img.key(True) == t.key(True):
                hits_t.append(P)
            if hits_s and hits_t:
                return SisterWitness(kind, K, hits_s[0], hits_t[0])
    return None


# ---------------------------------------------------------------------------
# laws


def check_equivalence_laws(rel: AbstractionRelation) -> LawReport:
    keys = list(rel.universe.keys())
    pairs = rel.pairs
    name = {k: _short(rel.universe.get(k)) for k in keys}
    refl = [name[k] for k in keys if (k, k) not in pairs]
    sym_ = [f"{name[a]}~{name[b]}" for a, b in sorted(pairs) if (b, a) not in pairs]
    succ: Dict[Key, Set[Key]] = {}
    for a, b in pairs:
        succ.setdefault(a, set()).add(b)
    trans = []
    for a, b in sorted(pairs):
        for c in sorted(succ.get(b, ())):
            if (a, c) not in pairs:
                trans.append(f"{name[a]}~{name[b]}~{name[c]}")
                break
        if len(trans) >= 5:
            break
    return LawReport(
        [
            LawVerdict("reflexivity", not refl, refl),
            LawVerdict("symmetry", not sym_, sym_),
            LawVerdict("transitivity", not trans, trans),
        ]
    )


@dataclass
class Partition:
    classes: List[Jungle]
    centers: Dict[int, List[Net]] = field(default_factory=dict)

    def __post_init__(self):
        seen: Set[Key] = set()
        for c in self.classes:
            ks = set(c.keys())
            if ks & seen:
                raise ValidationError("partition classes overlap")
            seen |= ks

    def universe(self) -> Jungle:
        return Jungle(n for c in self.classes for n in c)

    def index_of(self, t: Net) -> Optional[int]:
        for i, c in enumerate(self.classes):
            if t in c:
                return i
        return None

    def is_distinctive(self) -> bool:
        """No two classes hold members equal up to renaming."""
        seen: Dict[Key, int] = {}
        for i, c in enumerate(self.classes):
            for n in c:
                j = seen.setdefault(n.key(True), i)
                if j != i:
                    return False
        return True


def center_uniqueness(p: Partition) -> LawReport:
    bad = []
    for i, cands in sorted(p.centers.items()):
        for a in cands:
            for b in cands:
                if a.key(True) != b.key(True):
                    bad.append(f"class{i}:{_short(a)}/{_short(b)}")
    return LawReport([LawVerdict("center-uniqueness", not bad, bad[:5])])


def default_centers(p: Partition, key: Callable[[Net], object] = lambda n: (len(n), len(n.edges))) -> Partition:
    """Centers chosen as the members minimising ``key`` in each class."""
    centers = {}
    for i, c in enumerate(p.classes):
        members = list(c)
        best = min(key(n) for n in members)
        centers[i] = [n for n in members if key(n) == best]
    return Partition(p.classes, centers)


# ---------------------------------------------------------------------------
# partially quotient algebras


Op = Callable[[Net], Jungle]
ClassOp = Callable[[object, List[Net]], Set[object]]


@dataclass
class PartiallyQuotientAlgebra:
    """Base operations on a finite carrier and their class-level partners.

    Classes are named by labels: the member-key set of a relation class, or
    the value of ``class_key`` when one is given (so that images leaving the
    carrier still land in a named class).
    """

    base_carrier: Jungle
    theta: Optional[AbstractionRelation]
    base_ops: Dict[str, Op]
    quotient_ops: Dict[str, ClassOp]
    class_key: Optional[Callable[[Net], object]] = None

    def label(self, b: Net):
        if self.class_key is not None:
            return self.class_key(b)
        if self.theta is not None and b in self.theta.universe:
            return frozenset(self.theta.class_of(b).keys())
        return frozenset([b.key()])

    def classes(self) -> Dict[object, List[Net]]:
        out: Dict[object, List[Net]] = {}
        for a in self.base_carrier:
            out.setdefault(self.label(a), []).append(a)
        return out


def induced_quotient(label: Callable[[Net], object], f: Op) -> ClassOp:
    """The class map sending a class to the classes of all member images."""

    def op(_lab, members: List[Net]) -> Set[object]:
        return {label(b) for a in members for b in f(a)}

    return op


def representative_quotient(label: Callable[[Net], object], f: Op, pick: Callable[[List[Net]], Net]) -> ClassOp:
    """The class map computed from one chosen member of each class."""

    def op(_lab, members: List[Net]) -> Set[object]:
        return {label(b) for b in f(pick(members))}

    return op


def check_partially_quotient(pqa: PartiallyQuotientAlgebra) -> LawReport:
    verdicts = []
    if set(pqa.base_ops) != set(pqa.quotient_ops):
        verdicts.append(LawVerdict("bijection", False, ["operation names differ"]))
    classes = pqa.classes()
    order = sorted(classes, key=repr)
    for name in sorted(pqa.base_ops):
        f = pqa.base_ops[name]
        g = pqa.quotient_ops.get(name)
        if g is None:
            continue
        bad = []
        for k, lab in enumerate(order):
            members = classes[lab]
            allowed = {pqa.label(b) for a in members for b in f(a)}
            extra = g(lab, members) - allowed
            if extra:
                bad.append(f"class{k}:+{len(extra)}")
        verdicts.append(LawVerdict(f"commutation:{name}", not bad, bad))
    if pqa.theta is not None:
        part = Partition(pqa.theta.classes())
        verdicts.append(LawVerdict("distinctive", part.is_distinctive(), [], informational=True))
    return LawReport(verdicts)


# ---------------------------------------------------------------------------
# multidimensional relations


@dataclass
class MultidimRelation:
    level: int
    universe: Jungle
    levels: List[FrozenSet[Tuple[Key, Key]]]
    saturation: Dict[Key, List[FrozenSet[Key]]]
    closed: bool

    @property
    def relation(self) -> FrozenSet[Tuple[Key, Key]]:
        return self.levels[-1]

    def as_abstraction(self, kind: str = "NBH") -> AbstractionRelation:
        return AbstractionRelation(kind, self.universe, self.relation, {p: f"level{self.level}" for p in self.relation})


def _classes_of(universe: Jungle, rel: FrozenSet[Tuple[Key, Key]], t: Key) -> FrozenSet[Key]:
    return frozenset(b for a, b in rel if a == t)


def multidim_theta(universe: Jungle, k: int, base: Optional[Sequence[AbstractionRelation]] = None) -> MultidimRelation:
    """Level-``k`` relation built from the level below.

    ``base`` is the level-0 set of relations (default: the rank-merging
    kernel relation).  At each level, ``S(t)`` holds the classes of ``t`` under the
    relations of the level below, and ``s ~ t`` when some class of ``s`` and
    some class of ``t`` are related member-wise in both directions.
    """
    if k > 3:
        raise BudgetExceeded("levels above 3 are outside the desk-scale budget")
    rels = [r.pairs for r in (base or [default_theta(universe)])]
    keys = list(universe.keys())
    levels = [equivalence_closure(universe, rels[0])] if len(rels) == 1 else [frozenset().union(*rels)]
    saturation: Dict[Key, List[FrozenSet[Key]]] = {}
    closed = True
    current = rels
    for _ in range(k):
        sat = {t: [_classes_of(universe, r, t) for r in current] for t in keys}
        below = frozenset().union(*current)

        def covers(P, Q):
            return all(any((p, q) in below for q in Q) for p in P)

        pairs = set()
        for s in keys:
            for t in keys:
                if any(covers(P, Q) and covers(Q, P) for P in sat[s] for Q in sat[t]):
                    pairs.add((s, t))
        closure = equivalence_closure(universe, pairs)
        if closure != frozenset(pairs):
            closed = False
        current = [closure]
        levels.append(closure)
        saturation = sat
    return MultidimRelation(k, universe, levels, saturation, closed)


# ---------------------------------------------------------------------------
# cardinality bound


def sum_product(groups: Iterable[Iterable[Iterable[int]]]) -> int:
    """Sum over groups of the product over factors of the sum of terms."""
    total = 0
    for g in groups:
        prod = 1
        for factor in g:
            prod *= sum(factor)
        total += prod
    return total


def cardinality_bound(H: int, A: Sequence, k: int, universe: Jungle, theta: Optional[AbstractionRelation] = None) -> int:
    """Upper limit for the number of transducers parallel to a member of ``A``.

    For every rule of every attached system, each side contributes the sum,
    over universe nets related to that side by the base relation, of ``H``
    times the size of the net's level-``k`` class.
    """
    theta = theta or default_theta(universe)
    level = multidim_theta(universe, k, [theta]).as_abstraction()
    groups = []
    for td in A:
        factors = []
        for rns in td.systems():
            for rule in rns.rules:
                for side in (rule.left, rule.right):
                    terms = []
                    for t in universe:
                        if _base_related(theta, t, side):
                            terms.append(H * len(level.class_of(t)))
                    factors.append(terms)
        groups.append(factors)
    return sum_product(groups)


def _base_related(theta: AbstractionRelation, t: Net, side: Net) -> bool:
    from .net import apex

    core = apex(side)
    if core in theta.universe:
        return theta.related(t, core)
    return dangling_signature(t) == dangling_signature(core)


# ---------------------------------------------------------------------------
# functors


def functor_check(
    gamma_ob: Callable[[Jungle], Jungle],
    gamma_re: Callable[[object], Callable[[Jungle], Jungle]],
    objects: Iterable[Jungle],
    relations: Sequence[Tuple[str, object, Callable[[Jungle], Jungle]]],
) -> LawReport:
    """Check ``gamma_ob(f(a)) == gamma_re(f)(gamma_ob(a))`` pointwise.

    ``relations`` lists ``(name, handle, apply)`` where ``apply`` realises the
    relation on jungles and ``handle`` is what ``gamma_re`` projects.
    """
    objects = list(objects)
    verdicts = []
    for name, handle, apply in relations:
        bad = []
        projected = gamma_re(handle)
        for i, a in enumerate(objects):
            left = gamma_ob(apply(a))
            right = projected(gamma_ob(a))
            if left != right:
                bad.append(f"object{i}")
        verdicts.append(LawVerdict(f"functor:{name}", not bad, bad))
    return LawReport(verdicts)
