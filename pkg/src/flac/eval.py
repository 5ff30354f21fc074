"""Deterministic small-step evaluation, including bracketed pairs of runs."""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import List, Optional, Tuple, Union

from .syntax.terms import (
    App,
    Assume,
    Bind,
    Bracket,
    Case,
    Del,
    Inj,
    Lam,
    Pair,
    Proj,
    ProtCtx,
    Sealed,
    TApp,
    Term,
    TLam,
    UnitM,
    Var,
    Where,
    is_where_value,
    map_children,
    substitute,
    substitute_type,
)

DEFAULT_FUEL = 100_000


@dataclass(frozen=True)
class Stepped:
    term: Term
    rule: str


@dataclass(frozen=True)
class Value:
    term: Term


@dataclass(frozen=True)
class Stuck:
    term: Term
    reason: str


@dataclass(frozen=True)
class OutOfFuel:
    term: Term
    steps: int


StepOutcome = Union[Stepped, Value, Stuck, OutOfFuel]


@dataclass
class Trace:
    """Every term of a run, the first being the program; rules[k] took k to k+1."""

    elements: List[Term]
    rules: List[str]

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, k):
        return self.elements[k]

    @property
    def final(self) -> Term:
        return self.elements[-1]


class _Stuck(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


# ---------------------------------------------------------------------------
# projection

def project(e: Term, side: int) -> Term:
    """Keep side 1 or 2 of every bracket; homomorphic on everything else."""
    if isinstance(e, Bracket):
        return project(e.left if side == 1 else e.right, side)
    return map_children(e, lambda c: project(c, side))


def project_trace(t: Trace, side: int) -> List[Term]:
    """Projected elements with adjacent repeats (steps of the other side) removed."""
    out: List[Term] = []
    for e in t.elements:
        p = project(e, side)
        if not out or out[-1] != p:
            out.append(p)
    return out


# ---------------------------------------------------------------------------
# one step

def _wv(e: Term) -> bool:
    return is_where_value(e)


def _redex(e: Term) -> Optional[Tuple[Term, str]]:
    """Contract e itself if it is a redex."""
    if isinstance(e, App):
        f, a = e.fun, e.arg
        if not _wv(f) or not _wv(a):
            return None
        if isinstance(f, Lam):
            return ProtCtx(f.pc, substitute(f.body, f.var, a)), "E-App*"
        if isinstance(f, Where):
            return Where(App(f.body, a), f.proof), "W-App"
        if isinstance(f, Bracket):
            return Bracket(App(f.left, project(a, 1)), App(f.right, project(a, 2))), "B-App"
        raise _Stuck(f"applying a non-function {type(f).__name__}")
    if isinstance(e, TApp):
        f = e.fun
        if not _wv(f):
            return None
        if isinstance(f, TLam):
            return ProtCtx(f.pc, substitute_type(f.body, f.var, e.type_arg)), "E-TApp*"
        if isinstance(f, Where):
            return Where(TApp(f.body, e.type_arg), f.proof), "W-TApp"
        if isinstance(f, Bracket):
            return Bracket(TApp(f.left, e.type_arg), TApp(f.right, e.type_arg)), "B-TApp"
        raise _Stuck(f"instantiating a non-polymorphic {type(f).__name__}")
    if isinstance(e, Proj):
        b = e.body
        if not _wv(b):
            return None
        if isinstance(b, Pair):
            return (b.left if e.index == 1 else b.right), "E-Unpair"
        if isinstance(b, Where):
            return Where(Proj(e.index, b.body), b.proof), "W-UnPair"
        if isinstance(b, Bracket):
            l, r = b.left, b.right
            if isinstance(l, Pair) and isinstance(r, Pair):
                pick = (lambda p: p.left) if e.index == 1 else (lambda p: p.right)
                return Bracket(pick(l), pick(r)), "B-UnPair"
            return Bracket(Proj(e.index, l), Proj(e.index, r)), "B-UnPair"
        raise _Stuck(f"projecting from a non-pair {type(b).__name__}")
    if isinstance(e, Case):
        s = e.scrutinee
        if not _wv(s):
            return None
        if isinstance(s, Inj):
            branch = e.left if s.index == 1 else e.right
            return substitute(branch, e.var, s.body), f"E-Case{s.index}"
        if isinstance(s, Where):
            return Where(Case(s.body, e.var, e.left, e.right), s.proof), "W-Case"
        if isinstance(s, Bracket):
            return Bracket(
                Case(s.left, e.var, project(e.left, 1), project(e.right, 1)),
                Case(s.right, e.var, project(e.left, 2), project(e.right, 2))), "B-Case"
        raise _Stuck(f"case analysis on a non-injection {type(s).__name__}")
    if isinstance(e, UnitM):
        if _wv(e.body):
            return Sealed(e.label, e.body), "E-UnitM"
        return None
    if isinstance(e, Bind):
        b = e.bound
        if not _wv(b):
            return None
        if isinstance(b, Sealed):
            return ProtCtx(b.label, substitute(e.body, e.var, b.body)), "E-BindM*"
        if isinstance(b, Where):
            return Where(Bind(e.var, b.body, e.body), b.proof), "W-BindM"
        if isinstance(b, Bracket):
            return Bracket(Bind(e.var, b.left, project(e.body, 1)),
                           Bind(e.var, b.right, project(e.body, 2))), "B-BindM"
        raise _Stuck(f"binding from a non-sealed {type(b).__name__}")
    if isinstance(e, Assume):
        p = e.proof
        if not _wv(p):
            return None
        if isinstance(p, Del):
            return Where(e.body, p), "E-Assume"
        if isinstance(p, Where):
            return Where(Assume(p.body, e.body), p.proof), "W-Assume"
        if isinstance(p, Bracket):
            return Bracket(Assume(p.left, project(e.body, 1)),
                           Assume(p.right, project(e.body, 2))), "B-Assume"
        raise _Stuck(f"assuming a non-delegation {type(p).__name__}")
    if isinstance(e, ProtCtx):
        if _wv(e.body):
            return e.body, "O-Ctx"
        return None
    return None


def _step(e: Term) -> Optional[Tuple[Term, str]]:
    """One step of e, or None when e is a where-value; raises _Stuck."""
    if _wv(e):
        return None
    if isinstance(e, Var):
        raise _Stuck(f"free variable {e.name!r}")
    if isinstance(e, Bracket):
        if not _wv(e.left):
            inner = _step(e.left)
            return Bracket(inner[0], e.right), f"B-Step({inner[1]})"
        inner = _step(e.right)
        return Bracket(e.left, inner[0]), f"B-Step({inner[1]})"
    # evaluation contexts: the leftmost subterm that is not yet a where-value
    for name, child in _context_children(e):
        if not _wv(child):
            inner = _step(child)
            return replace(e, **{name: inner[0]}), inner[1]
    red = _redex(e)
    if red is None:
        raise _Stuck(f"no rule applies to {type(e).__name__}")
    return red


def _context_children(e: Term):
    if isinstance(e, App):
        return [("fun", e.fun), ("arg", e.arg)]
    if isinstance(e, TApp):
        return [("fun", e.fun)]
    if isinstance(e, Pair):
        return [("left", e.left), ("right", e.right)]
    if isinstance(e, (Proj, Inj, UnitM, ProtCtx)):
        return [("body", e.body)]
    if isinstance(e, Case):
        return [("scrutinee", e.scrutinee)]
    if isinstance(e, Bind):
        return [("bound", e.bound)]
    if isinstance(e, Assume):
        return [("proof", e.proof)]
    if isinstance(e, Where):
        return [("body", e.body)]
    if isinstance(e, Sealed):
        return [("body", e.body)]
    return []


def step(e: Term) -> StepOutcome:
    if _wv(e):
        return Value(e)
    try:
        out = _step(e)
    except _Stuck as s:
        return Stuck(e, s.reason)
    assert out is not None
    return Stepped(out[0], out[1])


def run(e: Term, fuel: int = DEFAULT_FUEL) -> Tuple[Trace, StepOutcome]:
    trace = Trace([e], [])
    cur = e
    for _ in range(fuel):
        out = step(cur)
        if not isinstance(out, Stepped):
            return trace, out
        trace.elements.append(out.term)
        trace.rules.append(out.rule)
        cur = out.term
    out = step(cur)
    if isinstance(out, Stepped):
        return trace, OutOfFuel(cur, fuel)
    return trace, out


def evaluate(e: Term, fuel: int = DEFAULT_FUEL) -> Term:
    """The final where-value of e; raises RuntimeError if e is stuck or runs out of fuel."""
    _, out = run(e, fuel)
    if isinstance(out, Value):
        return out.term
    raise RuntimeError(f"evaluation did not reach a value: {out}")


def redex_count(e: Term) -> int:
    """How many ways e splits into an evaluation context around a redex.

    The count follows the context grammar on its own, independent of the
    order ``step`` searches in, so a value of 1 for every non-value term is
    a check of determinism.  A bracket counts once whichever side moves.
    """
    if _wv(e):
        return 0
    if isinstance(e, Bracket):
        return 1 if (redex_count(e.left) or redex_count(e.right)) else 0
    total = 0
    children = _context_children(e)
    for _, child in children:
        if not _wv(child):
            total += redex_count(child)
            break  # contexts to the right need this child to be a where-value first
    if all(_wv(c) for _, c in children):
        try:
            if _redex(e) is not None:
                total += 1
        except _Stuck:
            pass
    return total
