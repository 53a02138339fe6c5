"""Run the acceptance checks and print one line per check.

    python scripts/run_checks.py                 # all twelve
    python scripts/run_checks.py link-formula -v
"""

import argparse
import sys
from dataclasses import dataclass, field
from typing import List

from netrw.checks import CHECKS, CheckConfig, run_checks


@dataclass
class RunConfig:
    ids: List[str] = field(default_factory=lambda: list(CHECKS))
    check: CheckConfig = field(default_factory=CheckConfig)
    verbose: bool = False


def main(argv=None) -> int:
    p = argparse.ArgumentParser()
    p.add_argument("ids", nargs="*", choices=[[]] + list(CHECKS), default=[])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bound", type=int, default=3)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("-v", "--verbose", action="store_true")
    a = p.parse_args(argv)
    cfg = RunConfig(a.ids or list(CHECKS), CheckConfig(a.seed, a.bound, scale=a.scale), a.verbose)
    ok = True
    total = 0.0
    for r in run_checks(cfg.ids, cfg.check):
        print(r.line(), flush=True)
        if cfg.verbose or not r.passed:
            for d in r.detail:
                print("  " + d)
        ok &= r.passed
        total += r.seconds
    print(f"total {total:.1f}s")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
