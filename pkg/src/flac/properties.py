"""Executable checks of the calculus's metatheory on individual runs."""
from __future__ import annotations

from typing import List

from .delegations import EMPTY
from .eval import DEFAULT_FUEL, Value, project_trace, redex_count, run
from .fuzz import Generated
from .syntax import pretty, pretty_type
from .syntax.terms import Term, type_equal
from .typecheck import TypingError, typecheck


def metatheory_problems(g: Generated, fuel: int = DEFAULT_FUEL) -> List[str]:
    """Type preservation at every step, progress to a value, one redex per step."""
    problems = []
    trace, out = run(g.term, fuel)
    if not isinstance(out, Value):
        problems.append(f"progress: run ended with {out}")
    for k, e in enumerate(trace.elements):
        if k > 0:
            try:
                t = typecheck(EMPTY, [], g.pc, e)
            except TypingError as err:
                problems.append(f"preservation at step {k}: {err}")
                break
            if not type_equal(t, g.type):
                problems.append(f"preservation at step {k}: {pretty_type(t)} is not {pretty_type(g.type)}")
                break
        n = redex_count(e)
        if k + 1 < len(trace.elements) and n != 1:
            problems.append(f"determinism at step {k}: {n} redexes in {pretty(e)}")
            break
    return problems


def adequacy_problems(bracketed: Term, left: Term, right: Term, fuel: int = DEFAULT_FUEL) -> List[str]:
    """Projections of the bracketed run against the standalone runs, and joint termination."""
    problems = []
    tb, ob = run(bracketed, fuel)
    done_b = isinstance(ob, Value)
    for side, e in ((1, left), (2, right)):
        t, o = run(e, fuel)
        if done_b != isinstance(o, Value):
            problems.append(f"termination: bracketed run {'ended' if done_b else 'did not end'}, "
                            f"side {side} {'ended' if isinstance(o, Value) else 'did not'}")
        projected = project_trace(tb, side)
        if projected != t.elements[:len(projected)] or (done_b and len(projected) != len(t.elements)):
            problems.append(f"soundness: projection {side} of the bracketed trace is not the standalone trace")
    return problems
