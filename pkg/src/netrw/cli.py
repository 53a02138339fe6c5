"""Command line: ``netrw <subcommand> ...``.

Exit codes: 0 success, 1 a check or comparison failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from .errors import NetError
from .jungle import Jungle
from .rewrite import Budget

OK, FAILED, USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"netrw: {message}\n")
        raise SystemExit(USAGE)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise _InputError(f"cannot read {path}: {e.strerror}") from None


class _InputError(Exception):
    pass


def _jungle(path: str) -> Jungle:
    from .textio import parse_jungle

    return parse_jungle(_read(path))


def _rns(path: str):
    from .textio import parse_rns

    return parse_rns(_read(path))


def _nbh(path: str):
    from .textio import parse_nbh

    return parse_nbh(_read(path))


def _td(path: str):
    from .textio import parse_td

    return parse_td(_read(path))


def _emit_jungle(j: Jungle) -> None:
    from .textio import serialize_nets

    sys.stdout.write(serialize_nets(list(j)))
    if j.exhausted:
        sys.stderr.write("netrw: budget exhausted, result may be incomplete\n")


def _report(lines: List[str], passed: bool) -> int:
    for line in lines:
        print(line)
    return OK if passed else FAILED


# ---------------------------------------------------------------------------
# subcommands


def cmd_validate(a, budget) -> int:
    from . import textio

    parsers = {
        "nets": textio.parse_nets,
        "rns": textio.parse_rns,
        "nbh": textio.parse_nbh,
        "td": textio.parse_td,
        "prob": textio.parse_problem,
    }
    for path in a.files:
        text = _read(path)
        first = next((l.split("#", 1)[0].strip() for l in text.splitlines() if l.split("#", 1)[0].strip()), "")
        kind = first[len("netrw-"):].split(" ")[0] if first.startswith("netrw-") else ""
        if kind not in parsers:
            raise _InputError(f"{path}: unknown document header '{first}'")
        try:
            parsers[kind](text)
        except NetError as e:
            raise _InputError(f"{path}: {e}") from None
        print(f"ok {path} {kind}")
    return OK


def cmd_rewrite(a, budget) -> int:
    from .rewrite import rewrite_step

    j = _jungle(a.input)
    r = _rns(a.rules)
    for _ in range(a.steps):
        j = rewrite_step(r, j, budget)
    _emit_jungle(j)
    return OK


def cmd_nf(a, budget) -> int:
    from .rewrite import normal_forms

    _emit_jungle(normal_forms(_rns(a.rules), _jungle(a.input), budget))
    return OK


def cmd_nbh(a, budget) -> int:
    from .jungle import union_all
    from .morphism import classify_nbh, invert_anbh, nbh_image
    from .textio import serialize_nbh

    h = _nbh(a.nbh)
    sample = list(_jungle(a.input)) if a.input else []
    if a.action == "apply":
        _emit_jungle(union_all(nbh_image(h, t, budget) for t in sample))
    elif a.action == "classify":
        for flag in sorted(classify_nbh(h, sample)):
            print(flag)
    else:
        sys.stdout.write(serialize_nbh(invert_anbh(h, sample)))
    return OK


def cmd_compile(a, budget) -> int:
    from .blocks import compile_nbh_to_rns, compile_rns_to_nbh
    from .textio import serialize_nbh, serialize_rns

    if a.direction == "nbh2rns":
        sys.stdout.write(serialize_rns(compile_nbh_to_rns(_nbh(a.source))))
    else:
        sys.stdout.write(serialize_nbh(compile_rns_to_nbh(_rns(a.source))))
    return OK


def cmd_sisters(a, budget) -> int:
    from .abstraction import sisters_check

    nets = list(_jungle(a.input))
    if len(nets) < 2:
        raise _InputError("sisters needs a document with two nets")
    origins = list(_jungle(a.origins)) if a.origins else []
    w = sisters_check(nets[0], nets[1], a.kind, origins)
    if w is None:
        print(f"not sisters under {a.kind}")
        return FAILED
    print(w.describe())
    return OK


def cmd_orn(a, budget) -> int:
    from .rewrite import orn

    for k, t in enumerate(_jungle(a.input)):
        print(f"net{k} orn={orn(t)}")
    return OK


def cmd_uprns(a, budget) -> int:
    from .rewrite import validate_uprns

    rep = validate_uprns(_rns(a.rules), _jungle(a.input), budget)
    return _report(rep.lines(), rep.passed)


def cmd_quotient(a, budget) -> int:
    from .abstraction import PartiallyQuotientAlgebra, check_partially_quotient, induced_quotient, representative_quotient
    from .checks import rank_label
    from .rewrite import normal_forms

    U = _jungle(a.input)
    label = (lambda n: n.key(True)) if a.label == "rename" else rank_label
    ops, qops = {}, {}
    for k, path in enumerate(a.rules):
        r = _rns(path)
        f = (lambda r: lambda t: normal_forms(r, Jungle.of(t), budget))(r)
        ops[f"nf{k}"] = f
        if a.route == "induced":
            qops[f"nf{k}"] = induced_quotient(label, f)
        else:
            qops[f"nf{k}"] = representative_quotient(label, f, lambda ms: ms[0])
    rep = check_partially_quotient(PartiallyQuotientAlgebra(U, None, ops, qops, label))
    return _report(rep.lines(), rep.passed)


def cmd_td(a, budget) -> int:
    from .textio import serialize_td
    from .transducer import run_td, td_compose, td_normal_form

    if a.action == "run":
        if a.input is None:
            raise _InputError("td run needs --in")
        _emit_jungle(run_td(_td(a.td[0]), _jungle(a.input), budget))
    elif a.action == "compose":
        if len(a.td) != 2:
            raise _InputError("compose needs two transducer files")
        sys.stdout.write(serialize_td(td_compose(_td(a.td[0]), _td(a.td[1]))))
    else:
        sys.stdout.write(serialize_td(td_normal_form(_td(a.td[0]))))
    return OK


def cmd_solve(a, budget) -> int:
    from .solver import solve
    from .textio import parse_problem

    p = parse_problem(_read(a.problem))
    res = solve(p, [_td(t) for t in a.td], budget, a.macros)
    for rec in res.records:
        tag = "solution" if rec.is_solution else "accepted"
        print(f"{tag} depth={rec.depth} path={'.'.join(rec.path)} product={len(rec.product)}")
    print(f"exhausted={str(res.exhausted).lower()}")
    return OK if res.solutions else FAILED


def _schedule(text: str):
    out = []
    for item in text.split(","):
        n, _, k = item.partition(":")
        out.append((int(n), int(k or 0)))
    return out


def cmd_evolve(a, budget) -> int:
    from .solver import evolve, seed_state
    from .textio import parse_problem

    try:
        schedule = _schedule(a.schedule)
    except ValueError:
        raise _InputError("schedule entries look like <order>:<level>") from None
    problems = [parse_problem(_read(p)) for p in a.problem]
    state = seed_state(_jungle(a.mothers), [_td(t) for t in a.td], problems, a.k0, budget)
    state = evolve(state, a.levels, schedule, budget, a.library_cap)
    for line in state.trace:
        print(line)
    return OK


def cmd_check(a, budget) -> int:
    from .checks import CHECKS, CheckConfig, run_checks

    ids = list(CHECKS) if a.id == "all" else [a.id]
    if ids[0] not in CHECKS:
        raise _InputError(f"unknown check '{a.id}'; known: all, {', '.join(CHECKS)}")
    results = run_checks(ids, CheckConfig(seed=a.seed, bound=a.bound, budget=budget, scale=a.scale))
    for r in results:
        print(r.line())
        if a.verbose or not r.passed:
            for d in r.detail:
                print(f"  {d}")
    return OK if all(r.passed for r in results) else FAILED


def cmd_oracle(a, budget) -> int:
    from .oracle import naive_normal_forms, naive_rewrite_closure, oracle_compare
    from .rewrite import closure, normal_forms

    r, S = _rns(a.rules), _jungle(a.input)
    ok = True
    for name, eng, ora in (("closure", closure, naive_rewrite_closure), ("nf", normal_forms, naive_normal_forms)):
        v = oracle_compare(eng(r, S, budget), ora(r, S, budget))
        ok &= v.passed
        print(f"{'PASS' if v.passed else 'FAIL'} {name}" + "".join(f" {d}" for d in v.diffs[:3]))
    return OK if ok else FAILED


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="netrw", description="Net rewriting engine.")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized corpora (default 0)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", help="parse documents and report their kind")
    s.add_argument("files", nargs="+")
    s.set_defaults(fn=cmd_validate)

    for name, fn, hlp in (("rewrite", cmd_rewrite, "one-step rewriting"), ("nf", cmd_nf, "normal forms")):
        s = sub.add_parser(name, help=hlp)
        s.add_argument("--rules", required=True)
        s.add_argument("--in", dest="input", required=True)
        if name == "rewrite":
            s.add_argument("--steps", type=int, default=1)
        s.set_defaults(fn=fn)

    s = sub.add_parser("nbh", help="apply, classify or invert a block homomorphism")
    s.add_argument("action", choices=["apply", "classify", "invert"])
    s.add_argument("--nbh", required=True)
    s.add_argument("--in", dest="input")
    s.set_defaults(fn=cmd_nbh)

    s = sub.add_parser("compile", help="translate between block homomorphisms and rule systems")
    s.add_argument("direction", choices=["nbh2rns", "rns2nbh"])
    s.add_argument("source")
    s.set_defaults(fn=cmd_compile)

    s = sub.add_parser("sisters", help="search a sister witness for the first two nets")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--kind", default="NBH", choices=["PRNS", "GPRNS", "CLRNS", "UPRNS", "NBH"])
    s.add_argument("--origins")
    s.set_defaults(fn=cmd_sisters)

    s = sub.add_parser("orn", help="outward-link rank of each net")
    s.add_argument("--in", dest="input", required=True)
    s.set_defaults(fn=cmd_orn)

    s = sub.add_parser("uprns-check", help="validate the universal partitioning conditions")
    s.add_argument("--rules", required=True)
    s.add_argument("--in", dest="input", required=True)
    s.set_defaults(fn=cmd_uprns)

    s = sub.add_parser("quotient-check", help="check class maps of normal-form operations")
    s.add_argument("--rules", required=True, action="append")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--label", choices=["rename", "rank"], default="rename")
    s.add_argument("--route", choices=["induced", "representative"], default="representative")
    s.set_defaults(fn=cmd_quotient)

    s = sub.add_parser("td", help="run, compose or normalize transducers")
    s.add_argument("action", choices=["run", "compose", "nf"])
    s.add_argument("td", nargs="+")
    s.add_argument("--in", dest="input")
    s.set_defaults(fn=cmd_td)

    s = sub.add_parser("solve", help="search compositions of library transducers")
    s.add_argument("--problem", required=True)
    s.add_argument("--td", required=True, action="append")
    s.add_argument("--macros", action="store_true")
    s.set_defaults(fn=cmd_solve)

    s = sub.add_parser("evolve", help="grow a transducer library level by level")
    s.add_argument("--mothers", required=True)
    s.add_argument("--td", required=True, action="append")
    s.add_argument("--problem", required=True, action="append")
    s.add_argument("--levels", type=int, default=3)
    s.add_argument("--schedule", default="1:0,2:1,2:2")
    s.add_argument("--k0", type=int, default=0)
    s.add_argument("--library-cap", type=int, default=8)
    s.set_defaults(fn=cmd_evolve)

    s = sub.add_parser("check", help="run an acceptance check (or 'all')")
    s.add_argument("id")
    s.add_argument("--bound", type=int, default=3, help="vertex bound of the enumeration")
    s.add_argument("--scale", type=float, default=1.0, help="corpus size multiplier")
    s.add_argument("-v", "--verbose", action="store_true")
    s.set_defaults(fn=cmd_check)

    s = sub.add_parser("oracle", help="compare engine results with the brute-force reference")
    s.add_argument("--rules", required=True)
    s.add_argument("--in", dest="input", required=True)
    s.set_defaults(fn=cmd_oracle)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:  # --help exits 0, usage errors exit 2
        return e.code if isinstance(e.code, int) else USAGE
    try:
        budget = Budget.from_env()
    except (TypeError, ValueError):
        sys.stderr.write("netrw: NETRW_BUDGET wants steps,vertices,jungle[,matches]\n")
        return USAGE
    try:
        return args.fn(args, budget)
    except _InputError as e:
        sys.stderr.write(f"netrw: {e}\n")
        return USAGE
    except NetError as e:
        sys.stderr.write(f"netrw: {type(e).__name__}: {e}\n")
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
