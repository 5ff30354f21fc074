"""Seeded random generators for principals and well-typed terms."""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from .delegations import EMPTY as EMPTY_CONTEXT
from .principals import BOT, TOP, ConfProj, Conj, Disj, IntegProj, Name, Principal, join
from .syntax.terms import (
    UNIT,
    UNIT_T,
    ActsForT,
    App,
    Assume,
    Bind,
    Bracket,
    Case,
    Del,
    FunT,
    Inj,
    Lam,
    Pair,
    ProdT,
    Proj,
    SaysT,
    SumT,
    TApp,
    Term,
    TLam,
    Type,
    UnitM,
    UnitT,
    Var,
)
from .typecheck import TypingError, typecheck, well_typed

DEFAULT_NAMES = ("a", "b", "c")


def random_principal(rng: random.Random, names: Sequence[str] = DEFAULT_NAMES,
                     depth: int = 4) -> Principal:
    if depth <= 0 or rng.random() < 0.25:
        roll = rng.random()
        if roll < 0.08:
            return TOP
        if roll < 0.16:
            return BOT
        return Name(rng.choice(list(names)))
    kind = rng.randrange(4)
    if kind == 0:
        return ConfProj(random_principal(rng, names, depth - 1))
    if kind == 1:
        return IntegProj(random_principal(rng, names, depth - 1))
    left = random_principal(rng, names, depth - 1)
    right = random_principal(rng, names, depth - 1)
    return Conj(left, right) if kind == 2 else Disj(left, right)


# ---------------------------------------------------------------------------
# terms

TERM_NAMES = ("a", "b")
TOP_INTEG = IntegProj(TOP)


@dataclass
class Generated:
    """A closed well-typed term with the pc it was checked at."""

    term: Term
    type: Type
    pc: Principal


def random_label(rng: random.Random, names: Sequence[str] = TERM_NAMES) -> Principal:
    return random_principal(rng, names, depth=2)


def random_pc(rng: random.Random, names: Sequence[str] = TERM_NAMES) -> Principal:
    # a fully trusted pc keeps most generated terms typeable
    return TOP_INTEG if rng.random() < 0.7 else random_label(rng, names)


def random_type(rng: random.Random, depth: int = 2, names: Sequence[str] = TERM_NAMES) -> Type:
    if depth <= 0 or rng.random() < 0.35:
        return UNIT_T
    kind = rng.randrange(4)
    if kind == 0:
        return SumT(random_type(rng, depth - 1, names), random_type(rng, depth - 1, names))
    if kind == 1:
        return ProdT(random_type(rng, depth - 1, names), random_type(rng, depth - 1, names))
    if kind == 2:
        return FunT(random_type(rng, depth - 1, names), random_pc(rng, names),
                    random_type(rng, depth - 1, names))
    return SaysT(random_label(rng, names), random_type(rng, depth - 1, names))


class TermGenerator:
    """Type-directed generation of closed terms; the result may still fail to typecheck."""

    def __init__(self, rng: random.Random, names: Sequence[str] = TERM_NAMES):
        self.rng = rng
        self.names = names
        self.counter = 0

    def fresh(self, base: str = "v") -> str:
        self.counter += 1
        return f"{base}{self.counter}"

    def value(self, t: Type) -> Term:
        """A closed value of type t."""
        return self.term([], t, TOP_INTEG, 0)

    def term(self, env: List[Tuple[str, Type]], t: Type, pc: Principal, depth: int) -> Term:
        rng = self.rng
        hits = [x for x, s in env if s == t]
        if hits and rng.random() < 0.4:
            return Var(rng.choice(hits))
        if depth > 0 and rng.random() < 0.75:
            return self.elim(env, t, pc, depth - 1)
        return self.intro(env, t, pc, depth)

    def intro(self, env, t: Type, pc: Principal, depth: int) -> Term:
        rng = self.rng
        if isinstance(t, UnitT):
            return UNIT
        if isinstance(t, SumT):
            i = rng.choice((1, 2))
            return Inj(i, self.term(env, t.left if i == 1 else t.right, pc, depth), t)
        if isinstance(t, ProdT):
            return Pair(self.term(env, t.left, pc, depth), self.term(env, t.right, pc, depth))
        if isinstance(t, FunT):
            x = self.fresh("x")
            return Lam(x, t.arg, t.pc, self.term(env + [(x, t.arg)], t.result, t.pc, depth))
        if isinstance(t, SaysT):
            body = self.term(env, t.body, pc, depth)
            says = [x for x, s in env if isinstance(s, SaysT) and s.label == t.label]
            if says and rng.random() < 0.5:
                src = rng.choice(says)
                y = self.fresh("y")
                inner = self.term(env + [(y, dict(env)[src].body)], t.body, pc, depth)
                return Bind(y, Var(src), UnitM(t.label, inner))
            return UnitM(t.label, body)
        if isinstance(t, ActsForT):
            return Del(t.superior, t.inferior)
        raise ValueError(f"cannot generate a term of type {t}")

    def delegation(self) -> Del:
        # p is already at least as strong as q, so only the pc premise can fail
        q = random_label(self.rng, self.names)
        p = TOP if self.rng.random() < 0.3 else Conj(q, random_label(self.rng, self.names))
        return Del(p, q)

    def maybe_assume(self, e: Term) -> Term:
        """Sometimes wrap e so that it evaluates to a where-value."""
        return Assume(self.delegation(), e) if self.rng.random() < 0.25 else e

    def elim(self, env, t: Type, pc: Principal, depth: int) -> Term:
        rng = self.rng
        kind = rng.randrange(7)
        if kind == 0:
            s = random_type(rng, 1, self.names)
            x = self.fresh("x")
            fpc = pc if rng.random() < 0.6 else random_pc(rng, self.names)
            fun = Lam(x, s, fpc, self.term(env + [(x, s)], t, fpc, depth))
            return App(self.maybe_assume(fun), self.term(env, s, pc, depth))
        if kind == 1:
            other = random_type(rng, 1, self.names)
            i = rng.choice((1, 2))
            parts = [self.term(env, t, pc, depth), self.term(env, other, pc, depth)]
            if i == 2:
                parts.reverse()
            return Proj(i, self.maybe_assume(Pair(*parts)))
        if kind == 2:
            s1, s2 = random_type(rng, 1, self.names), random_type(rng, 1, self.names)
            st = SumT(s1, s2)
            x = self.fresh("x")
            return Case(self.term(env, st, pc, depth), x,
                        self.term(env + [(x, s1)], t, pc, depth),
                        self.term(env + [(x, s2)], t, pc, depth))
        if kind == 3:
            s = random_type(rng, 1, self.names)
            y = self.fresh("y")
            label = t.label if isinstance(t, SaysT) else random_label(rng, self.names)
            bound = self.term(env, SaysT(label, s), pc, depth)
            return Bind(y, bound, self.term(env + [(y, s)], t, join(pc, label), depth))
        if kind == 4:
            return Assume(self.delegation(), self.term(env, t, pc, depth))
        if kind == 5:
            X = self.fresh("X")
            tpc = pc if rng.random() < 0.7 else random_pc(rng, self.names)
            fun = TLam(X, tpc, self.term(env, t, tpc, depth))
            return TApp(self.maybe_assume(fun), random_type(rng, 1, self.names))
        return self.intro(env, t, pc, depth)


def random_well_typed(rng: random.Random, depth: int = 3, names: Sequence[str] = TERM_NAMES,
                      tries: int = 200) -> Generated:
    """Draw generated terms until one typechecks closed at its pc."""
    for _ in range(tries):
        pc = random_pc(rng, names)
        t = random_type(rng, 2, names)
        e = TermGenerator(rng, names).term([], t, pc, depth)
        try:
            got = typecheck(EMPTY_CONTEXT, [], pc, e)
        except TypingError:
            continue
        return Generated(e, got, pc)
    raise RuntimeError("no well-typed term found")


def well_typed_terms(seed: int, count: int, depth: int = 3) -> List[Generated]:
    rng = random.Random(seed)
    return [random_well_typed(rng, depth) for _ in range(count)]


def bracketed_program(rng: random.Random, depth: int = 3, names: Sequence[str] = TERM_NAMES,
                      tries: int = 200) -> Tuple[Term, Term, Term]:
    """A well-typed program fed a bracket of two inputs, with the two standalone programs."""
    for _ in range(tries):
        gen = TermGenerator(rng, names)
        s = random_type(rng, 2, names)
        pc = random_pc(rng, names)
        x = gen.fresh("x")
        body = gen.term([(x, s)], random_type(rng, 2, names), pc, depth)
        fun = Lam(x, s, pc, body)
        v1, v2 = gen.value(s), gen.value(s)
        if all(well_typed(EMPTY_CONTEXT, [], TOP_INTEG, App(fun, v)) for v in (v1, v2)):
            return App(fun, Bracket(v1, v2)), App(fun, v1), App(fun, v2)
    raise RuntimeError("no well-typed bracketed program found")
