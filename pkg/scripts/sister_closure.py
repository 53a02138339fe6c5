"""Law report for every kind of sister search on the enumeration.

Shows that the raw block-collapse search is not transitive while its
equivalence closure is, and that the renaming kinds need no closure.
"""

import argparse
from dataclasses import dataclass

from netrw.abstraction import KINDS, check_equivalence_laws, sisters_relation
from netrw.checks import raw_sisters
from netrw.oracle import EnumerationSpec, enumerate_nets


@dataclass
class SisterConfig:
    max_vertices: int = 3


def main(cfg: SisterConfig) -> None:
    U = enumerate_nets(EnumerationSpec(max_vertices=cfg.max_vertices))
    print(f"universe {len(U)} nets")
    for kind in KINDS:
        raw = raw_sisters(U, kind)
        closed = sisters_relation(U, kind)
        print(f"{kind}: raw pairs={len(raw.pairs)} closed pairs={len(closed.pairs)} classes={len(closed.classes())}")
        for line in check_equivalence_laws(raw).lines():
            print("  raw    " + line)
        for line in check_equivalence_laws(closed).lines():
            print("  closed " + line)


if __name__ == "__main__":
    p = argparse.ArgumentParser()
    p.add_argument("--max-vertices", type=int, default=3)
    main(SisterConfig(p.parse_args().max_vertices))
