"""Grow a two-member transducer library and print the level trace.

The seed has the mother nets ``a`` and ``b``, the transducers ``a->b`` and
``b->c``, and one problem per (mother, target) pair.
"""

import argparse
from dataclasses import dataclass
from typing import List, Tuple

from netrw.checks import evolution_seed
from netrw.rewrite import Budget
from netrw.solver import evolve, seed_state


@dataclass
class EvolutionConfig:
    levels: int = 3
    schedule: Tuple[Tuple[int, int], ...] = ((1, 0), (2, 1), (2, 2))
    library_cap: int = 8
    k0: int = 0
    budget: Budget = Budget()


def run(cfg: EvolutionConfig) -> List[str]:
    mothers, lib, problems = evolution_seed()
    state = seed_state(mothers, lib, problems, cfg.k0, cfg.budget)
    state = evolve(state, cfg.levels, list(cfg.schedule), cfg.budget, cfg.library_cap)
    lines = list(state.trace)
    for n, rep in sorted(state.reports.items()):
        bad = [name for name, ok in rep.inclusions if not ok]
        lines.append(f"order={n} k={rep.k} classes={len(rep.classes)} inclusions={len(rep.inclusions)} failing={len(bad)}")
    lines.append("library: " + ", ".join(td.name for td in state.library))
    names = [p.name for p in problems]
    lines.append("solved: " + ", ".join(names[i] for i in sorted(state.solved)))
    return lines


if __name__ == "__main__":
    p = argparse.ArgumentParser()
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--library-cap", type=int, default=8)
    a = p.parse_args()
    for line in run(EvolutionConfig(levels=a.levels, library_cap=a.library_cap)):
        print(line)
