"""Command-line driver: ``flac check|run|observe|ni|rd|fuzz|corpus``.

Exit codes: 0 when the check passes, 1 when it fails, 2 for usage or parse errors.
"""
from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from .eval import Value, run
from .fuzz import bracketed_program, random_well_typed
from .principals import Dir
from .properties import adequacy_problems, metatheory_problems
from .security import observe_trace
from .suites import CORPUS, Config, Row, load_config, program_pc, run_manifest, run_suite, suite_kind
from .syntax import (
    EXTENDED,
    ParseError,
    parse_context,
    parse_gamma,
    parse_principal,
    parse_program,
    pretty,
    pretty_type,
)
from .typecheck import CheckerConfig, TypingError, typecheck

OK, FAILED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _direction(text: str) -> Dir:
    try:
        return {"conf": Dir.CONF, "->": Dir.CONF, "integ": Dir.INTEG, "<-": Dir.INTEG}[text]
    except KeyError:
        raise UsageError(f"projection must be conf or integ, not {text!r}") from None


def _load(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise UsageError(str(err)) from None
    return parse_program(text, EXTENDED)


def cmd_check(args, cfg: Config) -> int:
    prog = _load(args.file)
    pi = parse_context(args.context) if args.context is not None else prog.context
    gamma = parse_gamma(args.gamma) if args.gamma is not None else prog.gamma
    pc = parse_principal(args.pc) if args.pc is not None else program_pc(prog)
    pc_most = parse_principal(args.pcmost) if args.pcmost is not None else (prog.pcmost or cfg.pc_most)
    harness = None
    if args.harness:
        harness = (parse_principal(args.harness[0]), _direction(args.harness[1]))
    try:
        t = typecheck(pi, gamma, pc, prog.term, CheckerConfig(pc_most=pc_most, harness=harness))
    except TypingError as err:
        print(f"type error: {err}")
        return FAILED
    print(pretty_type(t))
    return OK


def cmd_run(args, cfg: Config) -> int:
    prog = _load(args.file)
    trace, out = run(prog.term, args.fuel or cfg.fuel)
    if args.trace:
        print(f"#0 {pretty(trace[0])}")
        for k, (rule, e) in enumerate(zip(trace.rules, trace.elements[1:]), start=1):
            print(f"#{k} [{rule}] {pretty(e)}")
    if isinstance(out, Value):
        print(pretty(out.term))
        return OK
    print(f"run did not reach a value: {out}")
    return FAILED


def cmd_observe(args, cfg: Config) -> int:
    prog = _load(args.file)
    trace, out = run(prog.term, args.fuel or cfg.fuel)
    observer = parse_principal(args.as_)
    for k, e in enumerate(observe_trace(trace, prog.context, observer, _direction(args.proj))):
        print(f"#{k} {pretty(e)}")
    if not isinstance(out, Value):
        print(f"run did not reach a value: {out}")
        return FAILED
    return OK


def _table(rows: List[Row]) -> int:
    width = max((len(r.name) for r in rows), default=0)
    for r in rows:
        mark = "ok  " if r.ok else "FAIL"
        line = f"{mark} {r.name:<{width}}  {r.got}"
        if not r.ok:
            line += f"  (expected {r.expected})"
        print(line)
    passed = sum(r.ok for r in rows)
    print(f"{passed}/{len(rows)} as expected")
    return OK if passed == len(rows) else FAILED


def cmd_ni(args, cfg: Config) -> int:
    return _run_suite_of_kind(args.suite, cfg, "ni")


def cmd_rd(args, cfg: Config) -> int:
    return _run_suite_of_kind(args.suite, cfg, "rd")


def _run_suite_of_kind(path: str, cfg: Config, kind: str) -> int:
    p = Path(path)
    if not p.exists():
        raise UsageError(f"no such suite: {path}")
    found = suite_kind(p)
    if found != kind:
        raise UsageError(f"{path} is a {found!r} suite, not {kind!r}")
    return _table(run_suite(p, cfg))


def cmd_corpus(args, cfg: Config) -> int:
    return _table(run_manifest(Path(args.manifest), cfg))


def cmd_fuzz(args, cfg: Config) -> int:
    seed = args.seed if args.seed is not None else cfg.seed
    rng = random.Random(seed)
    failures = []
    for k in range(args.count):
        g = random_well_typed(rng, args.depth)
        for p in metatheory_problems(g, cfg.fuel):
            failures.append(f"term {k}: {p}\n    {pretty(g.term)}")
    for k in range(args.bracketed):
        b, left, right = bracketed_program(rng, args.depth)
        for p in adequacy_problems(b, left, right, cfg.fuel):
            failures.append(f"bracketed program {k}: {p}\n    {pretty(b)}")
    for f in failures[:10]:
        print(f)
    print(f"seed {seed}: {args.count} terms, {args.bracketed} bracketed programs, "
          f"{len(failures)} problems")
    return OK if not failures else FAILED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flac.toml with defaults for pcmost, fuel, seed, factorization_bound")
    common.add_argument("--seed", type=int, help="random seed")

    ap = argparse.ArgumentParser(prog="flac", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="typecheck a program")
    p.add_argument("file")
    p.add_argument("--pc", help="program counter label")
    p.add_argument("--context", help="delegation context, e.g. '[alice |> k1]'")
    p.add_argument("--gamma", help="typing context, e.g. '[x : p says unit]'")
    p.add_argument("--pcmost", help="pc used when checking where clauses")
    p.add_argument("--harness", nargs=2, metavar=("H", "PROJ"),
                   help="harness principal and projection for brackets and holes")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("run", parents=[common], help="evaluate a program")
    p.add_argument("file")
    p.add_argument("--trace", action="store_true", help="print every step with its rule")
    p.add_argument("--fuel", type=int, help="step limit")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("observe", parents=[common], help="print a run as one principal sees it")
    p.add_argument("file")
    p.add_argument("--as", dest="as_", required=True, metavar="PRINCIPAL")
    p.add_argument("--proj", default="conf", help="conf or integ")
    p.add_argument("--fuel", type=int, help="step limit")
    p.set_defaults(fn=cmd_observe)

    for name, fn, what in (("ni", cmd_ni, "noninterference"), ("rd", cmd_rd, "robust declassification")):
        p = sub.add_parser(name, parents=[common], help=f"run a {what} suite")
        p.add_argument("suite")
        p.set_defaults(fn=fn)

    p = sub.add_parser("corpus", parents=[common], help="reproduce the golden corpus")
    p.add_argument("manifest", nargs="?", default=str(CORPUS / "manifest.toml"))
    p.set_defaults(fn=cmd_corpus)

    p = sub.add_parser("fuzz", parents=[common], help="check preservation, progress, determinism and bracket adequacy")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--bracketed", type=int, default=500)
    p.add_argument("--depth", type=int, default=5)
    p.set_defaults(fn=cmd_fuzz)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        try:
            cfg = load_config(Path(args.config) if args.config else None)
        except (OSError, ValueError) as err:
            raise UsageError(f"cannot read configuration: {err}") from None
        if args.seed is not None:
            cfg.seed = args.seed
        return args.fn(args, cfg)
    except ParseError as err:
        print(f"parse error: {err}", file=sys.stderr)
        return USAGE
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
