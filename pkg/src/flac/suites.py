"""Golden corpus, check suites and configuration files."""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .delegations import DEFAULT_FACTORIZATION_BOUND
from .eval import DEFAULT_FUEL, Value, run
from .principals import TOP, Dir, IntegProj, Principal
from .security import CheckError, ni_check, rd_check
from .syntax import (
    EXTENDED,
    HOLES,
    Program,
    parse_context,
    parse_principal,
    parse_program,
    parse_term,
    parse_type,
    pretty,
    pretty_type,
)
from .syntax.terms import Bracket, Term, canonical_term, substitute, type_equal
from .typecheck import CheckerConfig, TypingError, typecheck

CORPUS = Path(__file__).parent / "corpus"
DEFAULT_PC = IntegProj(TOP)
DEFAULT_SEED = 20240521


@dataclass
class Config:
    pc_most: Principal = IntegProj(TOP)
    fuel: int = DEFAULT_FUEL
    seed: int = DEFAULT_SEED
    factorization_bound: int = DEFAULT_FACTORIZATION_BOUND


def load_config(path: Optional[Path] = None) -> Config:
    """Read ``flac.toml`` (or the given file); missing keys keep their defaults."""
    cfg = Config()
    if path is None:
        path = Path("flac.toml")
        if not path.exists():
            return cfg
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    data = data.get("flac", data)
    if "pcmost" in data:
        cfg.pc_most = parse_principal(data["pcmost"])
    for key in ("fuel", "seed", "factorization_bound"):
        if key in data:
            setattr(cfg, key, int(data[key]))
    return cfg


def read_program(path: Path, mode: str = HOLES) -> Program:
    return parse_program(Path(path).read_text(encoding="utf-8"), mode)


def program_pc(prog: Program) -> Principal:
    return prog.pc if prog.pc is not None else DEFAULT_PC


@dataclass
class Row:
    """One line of a verdict table."""

    name: str
    expected: str
    got: str
    ok: bool


# ---------------------------------------------------------------------------
# golden corpus

def _load_toml(path: Path) -> Dict[str, Any]:
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def run_entry(entry: Dict[str, Any], base: Path, cfg: Config) -> Row:
    name = entry["program"]
    prog = read_program(base / name)
    expect = entry["expect"]
    checker = CheckerConfig(pc_most=prog.pcmost or cfg.pc_most)
    if "harness" in entry:
        h, d = entry["harness"]
        checker = CheckerConfig(pc_most=checker.pc_most, harness=(parse_principal(h), Dir(d)))
    if expect == "value":
        trace, out = run(prog.term, cfg.fuel)
        want = canonical_term(parse_term(entry["value"], EXTENDED))
        if not isinstance(out, Value):
            return Row(name, entry["value"], str(out), False)
        got = canonical_term(out.term)
        return Row(name, entry["value"], pretty(out.term), got == want)
    try:
        t = typecheck(prog.context, prog.gamma, program_pc(prog), prog.term, checker)
    except TypingError as err:
        got = err.code
        if expect == "error":
            return Row(name, entry["error"], got, got == entry["error"])
        return Row(name, entry.get("type", expect), f"{got}: {err.detail}", False)
    if expect == "type":
        return Row(name, entry["type"], pretty_type(t), type_equal(t, parse_type(entry["type"])))
    return Row(name, entry.get("error", expect), pretty_type(t), False)


def run_manifest(path: Path = CORPUS / "manifest.toml", cfg: Optional[Config] = None) -> List[Row]:
    cfg = cfg or Config()
    data = _load_toml(path)
    rows = [run_entry(e, path.parent, cfg) for e in data.get("entry", [])]
    for s in data.get("suite", []):
        rows.extend(run_suite(path.parent / s["path"], cfg))
    return rows


# ---------------------------------------------------------------------------
# noninterference and robust declassification suites

def _term_or_file(text: str, base: Path, fuel: int) -> Term:
    """A substitution value: inline term text, or a ``.flac`` file run to its value."""
    if text.endswith(".flac"):
        t, out = run(read_program(base / text).term, fuel)
        if not isinstance(out, Value):
            raise CheckError(f"{text} does not evaluate to a value: {out}")
        return out.term
    return parse_term(text, EXTENDED)


def _direction(name: str) -> Dir:
    return {"conf": Dir.CONF, "->": Dir.CONF, "integ": Dir.INTEG, "<-": Dir.INTEG}[name]


def suite_kind(path: Path) -> str:
    return _load_toml(path).get("kind", "")


def run_suite(path: Path, cfg: Optional[Config] = None) -> List[Row]:
    cfg = cfg or Config()
    data = _load_toml(path)
    kind = data["kind"]
    if kind == "ni":
        return _run_ni(data, path, cfg)
    if kind == "rd":
        return _run_rd(data, path, cfg)
    raise ValueError(f"{path}: unknown suite kind {kind!r}")


def _label(path: Path, case: Dict[str, Any], k: int) -> str:
    return f"{path.stem}:{case.get('name', case.get('program', k + 1))}"


def _run_ni(data, path: Path, cfg: Config) -> List[Row]:
    base = path.parent
    sub = {y: _term_or_file(v, base, cfg.fuel) for y, v in data.get("substitution", {}).items()}
    rows = []
    for k, case in enumerate(data["case"]):
        label = _label(path, case, k)
        expect = case.get("expect", "pass")
        prog = read_program(base / case["program"])
        x = case.get("input", data["input"])
        gamma = [(y, t) for y, t in prog.gamma if y != x]
        xt = dict(prog.gamma)[x]
        v1, v2 = (parse_term(v, EXTENDED) for v in case.get("inputs", data["inputs"]))
        H = parse_principal(case.get("H", data["H"]))
        obs = parse_principal(case.get("observer", data["observer"]))
        d = _direction(case.get("projection", data["projection"]))
        used = {y: w for y, w in sub.items() if y in dict(gamma)}
        try:
            verdict = ni_check(prog.term, gamma, prog.context, program_pc(prog), x, xt, v1, v2,
                               H, obs, d, used, cfg.fuel, cfg.factorization_bound)
            got = "pass" if verdict.passed else ("inapplicable" if type(verdict).__name__ == "Inapplicable"
                                                 else "fail")
            detail = str(verdict)
        except CheckError as err:
            got, detail = "error", str(err)
        except TypingError as err:
            got, detail = err.code, str(err)
        if expect not in ("pass", "fail", "inapplicable", "error"):
            # the program itself is expected to be rejected
            try:
                typecheck(prog.context, prog.gamma, program_pc(prog), prog.term)
                got, detail = "well-typed", "program type checks"
            except TypingError as err:
                got, detail = err.code, str(err)
        rows.append(Row(label, expect, got if got == expect else f"{got}: {detail}", got == expect))
    return rows


def bracketed_cases(path: Path, cfg: Optional[Config] = None) -> List[Tuple[str, Term, Term, Term]]:
    """For each well-typed case of an ``ni`` suite: the bracketed program and its two sides."""
    cfg = cfg or Config()
    data = _load_toml(path)
    base = path.parent
    sub = {y: _term_or_file(v, base, cfg.fuel) for y, v in data.get("substitution", {}).items()}
    out = []
    for k, case in enumerate(data["case"]):
        prog = read_program(base / case["program"])
        try:
            typecheck(prog.context, prog.gamma, program_pc(prog), prog.term)
        except TypingError:
            continue
        x = case.get("input", data["input"])
        closed = prog.term
        for y, w in sub.items():
            if y != x and y in dict(prog.gamma):
                closed = substitute(closed, y, w)
        v1, v2 = (parse_term(v, EXTENDED) for v in case.get("inputs", data["inputs"]))
        out.append((_label(path, case, k), substitute(closed, x, Bracket(v1, v2)),
                    substitute(closed, x, v1), substitute(closed, x, v2)))
    return out


def _run_rd(data, path: Path, cfg: Config) -> List[Row]:
    base = path.parent
    prog = read_program(base / data["program"])
    x = data["input"]
    gamma = [(y, t) for y, t in prog.gamma if y != x]
    xt = dict(prog.gamma)[x]
    v1, v2 = (parse_term(v, EXTENDED) for v in data["inputs"])
    H = parse_principal(data["H"])
    pi_h = parse_context(data["attacker_context"]) if "attacker_context" in data else prog.context
    rows = []
    for k, case in enumerate(data["case"]):
        label = _label(path, case, k)
        expect = case.get("expect", "pass")
        a1 = [parse_term(a) for a in case["attacks1"]]
        a2 = [parse_term(a) for a in case["attacks2"]]
        try:
            verdict = rd_check(prog.term, gamma, prog.context, pi_h, program_pc(prog), x, xt, v1, v2,
                               a1, a2, H, full_runs=case.get("full_runs", False), fuel=cfg.fuel)
            got = "pass" if verdict.passed else ("inapplicable" if type(verdict).__name__ == "Inapplicable"
                                                 else "fail")
            detail = str(verdict)
        except CheckError as err:
            got, detail = "error", str(err)
        rows.append(Row(label, expect, got if got == expect else f"{got}: {detail}", got == expect))
    return rows
