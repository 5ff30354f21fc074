"""The eight acceptance criteria, each reported as one pass/fail line.

Run under pytest (the lines appear in the terminal summary) or directly with
``python tests/test_acceptance.py``.
"""
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from flac.delegations import EMPTY, DelegationContext, robust_acts_for, subtract  # noqa: E402
from flac.fuzz import bracketed_program, random_principal, well_typed_terms  # noqa: E402
from flac.principals import (  # noqa: E402
    BOT,
    ConfProj,
    Conj,
    Dir,
    IntegProj,
    Name,
    equivalent,
    flows_to,
    join,
    meet,
    proj,
    static_acts_for,
    voice,
)
from flac.properties import adequacy_problems, metatheory_problems  # noqa: E402
from flac.suites import CORPUS, DEFAULT_SEED, _load_toml, bracketed_cases, run_entry, run_suite  # noqa: E402
from flac.suites import Config  # noqa: E402

from oracles import all_normal_forms, brute_acts_for  # noqa: E402

RESULTS = []


def report(number, title, ok, detail):
    line = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title} ({detail})"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_1_algebra_matches_brute_force_oracle():
    rng = random.Random(DEFAULT_SEED)
    names = ("a", "b", "c")
    start = time.perf_counter()
    disagreements = 0
    for _ in range(10_000):
        x = random_principal(rng, names, rng.randint(0, 4))
        y = random_principal(rng, names, rng.randint(0, 4))
        if static_acts_for(x, y) != brute_acts_for(x, y, names):
            disagreements += 1
    elapsed = time.perf_counter() - start
    report(1, "static acts-for agrees with the lattice oracle", disagreements == 0 and elapsed < 60,
           f"10000 pairs, {disagreements} disagreements, {elapsed:.1f}s of 60s")


def test_2_named_identities():
    rng = random.Random(DEFAULT_SEED + 2)
    names = ("a", "b", "c")
    failures = []
    alice = Name("Alice")
    if not equivalent(voice(ConfProj(alice)), IntegProj(alice)):
        failures.append("voice(Alice->) = Alice<-")
    for _ in range(1000):
        x, y, z = (random_principal(rng, names, 4) for _ in range(3))
        checks = {
            "projection distributes over /\\": all(
                equivalent(proj(Conj(x, y), d), Conj(proj(x, d), proj(y, d))) for d in Dir),
            "p = p-> /\\ p<-": equivalent(x, Conj(ConfProj(x), IntegProj(x))),
            "(p<-)-> = bot": equivalent(ConfProj(IntegProj(x)), BOT),
            "join commutes": equivalent(join(x, y), join(y, x)),
            "meet commutes": equivalent(meet(x, y), meet(y, x)),
            "join associates": equivalent(join(join(x, y), z), join(x, join(y, z))),
            "meet associates": equivalent(meet(meet(x, y), z), meet(x, meet(y, z))),
            "join idempotent": equivalent(join(x, x), x),
            "absorption": equivalent(join(x, meet(x, y)), x) and equivalent(meet(x, join(x, y)), x),
            "join is an upper bound": flows_to(x, join(x, y)) and flows_to(y, join(x, y)),
            "meet is a lower bound": flows_to(meet(x, y), x) and flows_to(meet(x, y), y),
            "join is least": not (flows_to(x, z) and flows_to(y, z)) or flows_to(join(x, y), z),
        }
        failures.extend(name for name, ok in checks.items() if not ok)
    report(2, "named identities and lattice laws", not failures,
           f"1000 triples, {len(failures)} violations" + (f", first: {failures[0]}" if failures else ""))


def test_3_golden_corpus():
    start = time.perf_counter()
    entries = _load_toml(CORPUS / "manifest.toml")["entry"]
    rows = [run_entry(e, CORPUS, Config()) for e in entries]
    elapsed = time.perf_counter() - start
    bad = [f"{r.name}: {r.got}" for r in rows if not r.ok]
    report(3, "golden corpus reproduces every expected type, error and value",
           not bad and elapsed < 10,
           f"{len(rows) - len(bad)}/{len(rows)} entries, {elapsed:.2f}s of 10s" + (f", {bad[0]}" if bad else ""))


def test_4_metatheory_fuzz():
    start = time.perf_counter()
    terms = well_typed_terms(DEFAULT_SEED, 1000, depth=5)
    problems = [p for g in terms for p in metatheory_problems(g)]
    elapsed = time.perf_counter() - start
    report(4, "subject reduction, progress and determinism on generated terms",
           not problems and elapsed < 300,
           f"{len(terms)} terms, {len(problems)} problems, {elapsed:.1f}s of 300s"
           + (f", first: {problems[0]}" if problems else ""))


def test_5_bracket_adequacy():
    cases = []
    for suite in ("commit_secrecy", "commit_integrity", "bearer", "leak"):
        cases.extend((b, l, r) for _, b, l, r in bracketed_cases(CORPUS / f"{suite}.flactest"))
    corpus_runs = len(cases)
    rng = random.Random(DEFAULT_SEED + 5)
    while len(cases) < 500:
        cases.append(bracketed_program(rng, 4))
    problems = [p for b, l, r in cases for p in adequacy_problems(b, l, r)]
    report(5, "bracketed runs project onto standalone runs and terminate together", not problems,
           f"{len(cases)} runs ({corpus_runs} corpus, {len(cases) - corpus_runs} generated), "
           f"{len(problems)} problems" + (f", first: {problems[0]}" if problems else ""))


def test_6_noninterference_suites():
    start = time.perf_counter()
    rows = []
    for suite in ("commit_secrecy", "commit_integrity", "bearer"):
        rows.extend(run_suite(CORPUS / f"{suite}.flactest"))
    elapsed = time.perf_counter() - start
    passes = sum(r.got == "pass" for r in rows)
    bad = [f"{r.name}: {r.got}" for r in rows if not r.ok]
    report(6, "commitment and bearer-credential noninterference with erasure conservation",
           not bad and elapsed < 30,
           f"{passes} pass, {len(rows) - passes} rejected by the checker as expected, "
           f"{len(bad)} unexpected, {elapsed:.1f}s of 30s" + (f", {bad[0]}" if bad else ""))


def test_7_robust_declassification():
    start = time.perf_counter()
    rows = run_suite(CORPUS / "rd_declassify.flactest")
    elapsed = time.perf_counter() - start
    biconditional = [r for r in rows if r.expected == "pass"]
    unfair = [r for r in rows if r.expected == "inapplicable"]
    ok = all(r.ok for r in rows) and biconditional and unfair and elapsed < 10
    report(7, "robust declassification biconditional and unfair-attack rejection", bool(ok),
           f"{sum(r.ok for r in biconditional)}/{len(biconditional)} biconditional cases, "
           f"{sum(r.ok for r in unfair)}/{len(unfair)} unfair attacks rejected, {elapsed:.2f}s of 10s")


def test_8_subtraction_identity_exhaustive():
    universe = all_normal_forms(["a", "b"])
    contexts = [EMPTY] + [DelegationContext.of((r, s)) for r in universe for s in universe]
    start = time.perf_counter()
    failures = 0
    checked = 0
    for pi in contexts:
        for x in universe:
            for y in universe:
                gap = subtract(pi, y, x)
                if robust_acts_for(pi, x, gap) != robust_acts_for(pi, x, y):
                    failures += 1
                checked += 1
    elapsed = time.perf_counter() - start
    report(8, "p acts for q - p exactly when p acts for q", failures == 0,
           f"{checked} (context, p, q) triples over {len(universe)} normal forms and "
           f"{len(contexts)} contexts, {failures} failures, {elapsed:.0f}s")


if __name__ == "__main__":
    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
