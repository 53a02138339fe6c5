"""Jungles: finite sets of nets identified up to isomorphism."""

from __future__ import annotations

from typing import Iterable, Iterator, List

from .net import Net


class Jungle:
    """Immutable set of nets keyed by strict canonical form.

    Iteration follows the lexicographic order of canonical forms.  The
    ``exhausted`` flag records that a budget bound while this jungle was being
    computed; it takes no part in equality.
    """

    __slots__ = ("_members", "exhausted")

    def __init__(self, nets: Iterable[Net] = (), exhausted: bool = False):
        members = {}
        for n in nets:
            members.setdefault(n.key(), n)
        self._members = dict(sorted(members.items()))
        self.exhausted = exhausted

    @classmethod
    def of(cls, *nets: Net) -> "Jungle":
        return cls(nets)

    def __iter__(self) -> Iterator[Net]:
        return iter(self._members.values())

    def __len__(self) -> int:
        return len(self._members)

    def __contains__(self, net: Net) -> bool:
        return net.key() in self._members

    def __eq__(self, other) -> bool:
        if not isinstance(other, Jungle):
            return NotImplemented
        return self._members.keys() == other._members.keys()

    def __hash__(self) -> int:
        return hash(tuple(self._members))

    def __le__(self, other: "Jungle") -> bool:
        return self._members.keys() <= other._members.keys()

    def __or__(self, other: "Jungle") -> "Jungle":
        return Jungle(list(self) + list(other), self.exhausted or other.exhausted)

    def __sub__(self, other: "Jungle") -> "Jungle":
        return Jungle([n for n in self if n not in other], self.exhausted)

    def __repr__(self) -> str:
        flag = ", exhausted" if self.exhausted else ""
        return f"Jungle({len(self)} nets{flag})"

    def keys(self) -> List[bytes]:
        return list(self._members)

    def get(self, key: bytes) -> Net:
        return self._members[key]

    def flagged(self, exhausted: bool) -> "Jungle":
        return Jungle(self, exhausted)

    def letters(self) -> set:
        out = set()
        for n in self:
            out |= n.letters()
        return out


def union_all(jungles: Iterable[Jungle]) -> Jungle:
    nets, flag = [], False
    for j in jungles:
        nets.extend(j)
        flag = flag or j.exhausted
    return Jungle(nets, flag)
