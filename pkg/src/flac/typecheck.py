"""The FLAC type system, one rule per syntactic form."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

from .delegations import Delegation, DelegationContext, robust_acts_for, robust_flows_to
from .principals import (
    BOT,
    TOP,
    ConfProj,
    Conj,
    Dir,
    IntegProj,
    Principal,
    join,
    proj,
    render,
    view,
    voice,
)
from .syntax.printer import pretty_type
from .syntax.terms import (
    ActsForT,
    App,
    Assume,
    Bind,
    Bracket,
    Case,
    Del,
    ForallT,
    FunT,
    Hole,
    Inj,
    Lam,
    Pair,
    ProdT,
    Proj,
    ProtCtx,
    SaysT,
    Sealed,
    Span,
    SumT,
    TApp,
    Term,
    TLam,
    Type,
    TyVar,
    UnitM,
    UnitT,
    UnitV,
    Var,
    Where,
    free_type_vars,
    is_where_value,
    subst_type,
    type_equal,
)

UNIT_T = UnitT()


class TypingError(Exception):
    """A failed premise, naming the rule, the premise and the principals involved."""

    def __init__(self, rule: str, premise: str, detail: str, span: Optional[Span] = None,
                 left: Optional[Principal] = None, right: Optional[Principal] = None):
        self.rule = rule
        self.premise = premise
        self.detail = detail
        self.span = span
        self.left = left
        self.right = right
        where = f" at {span}" if span else ""
        super().__init__(f"{rule}.{premise}{where}: {detail}")

    @property
    def code(self) -> str:
        return f"{self.rule}.{self.premise}"


@dataclass(frozen=True)
class TypingContext:
    """Ordered variable bindings and bound type variables; the rightmost binding wins."""

    entries: Tuple[Tuple[str, str, Optional[Type]], ...] = ()

    @classmethod
    def of(cls, bindings: Sequence[Tuple[str, Type]] = (), type_vars: Sequence[str] = ()):
        ctx = cls()
        for X in type_vars:
            ctx = ctx.with_type_var(X)
        for x, t in bindings:
            ctx = ctx.with_var(x, t)
        return ctx

    def with_var(self, x: str, t: Type) -> "TypingContext":
        return TypingContext(self.entries + (("var", x, t),))

    def with_type_var(self, X: str) -> "TypingContext":
        return TypingContext(self.entries + (("tvar", X, None),))

    def lookup(self, x: str) -> Optional[Type]:
        for kind, name, t in reversed(self.entries):
            if kind == "var" and name == x:
                return t
        return None

    def type_vars(self) -> frozenset:
        return frozenset(name for kind, name, _ in self.entries if kind == "tvar")

    def bindings(self) -> List[Tuple[str, Type]]:
        """Visible variable bindings, shadowed ones removed, in binding order."""
        seen = set()
        out = []
        for kind, name, t in reversed(self.entries):
            if kind == "var" and name not in seen:
                seen.add(name)
                out.append((name, t))
        return list(reversed(out))


@dataclass(frozen=True)
class CheckerConfig:
    pc_most: Principal = IntegProj(TOP)
    harness: Optional[Tuple[Principal, Dir]] = None


@dataclass
class HoleSite:
    """What the checker knew at a hole: its type and the surrounding judgment."""

    hole_type: Type
    gamma: TypingContext
    pc: Principal
    pi: DelegationContext


# ---------------------------------------------------------------------------
# protection levels and type projections

def protects(pi: DelegationContext, label: Principal, t: Type) -> bool:
    if isinstance(t, UnitT):
        return True
    if isinstance(t, ProdT):
        return protects(pi, label, t.left) and protects(pi, label, t.right)
    if isinstance(t, FunT):
        return protects(pi, label, t.result) and robust_flows_to(pi, label, t.pc)
    if isinstance(t, ForallT):
        return protects(pi, label, t.body) and robust_flows_to(pi, label, t.pc)
    if isinstance(t, SaysT):
        return robust_flows_to(pi, label, t.label)
    return False


def project_type(t: Type, d: Dir) -> Type:
    if isinstance(t, FunT):
        return FunT(t.arg, proj(t.pc, d), project_type(t.result, d))
    if isinstance(t, SaysT):
        return SaysT(proj(t.label, d), t.body)
    if isinstance(t, ProdT):
        return ProdT(project_type(t.left, d), project_type(t.right, d))
    if isinstance(t, ForallT):
        return ForallT(t.var, proj(t.pc, d), project_type(t.body, d))
    return t


# ---------------------------------------------------------------------------
# the checker

def _rel(a: Principal, op: str, b: Principal) -> str:
    return f"expected Π ⊩ {render(a)} {op} {render(b)}"


class Checker:
    def __init__(self, cfg: CheckerConfig = CheckerConfig()):
        self.cfg = cfg
        self.hole_sites: List[HoleSite] = []

    # premises -------------------------------------------------------------
    def flows(self, pi, a, b, rule, premise, span):
        if not robust_flows_to(pi, a, b):
            raise TypingError(rule, premise, _rel(a, "⊑", b), span, a, b)

    def acts(self, pi, a, b, rule, premise, span):
        if not robust_acts_for(pi, a, b):
            raise TypingError(rule, premise, _rel(a, "≽", b), span, a, b)

    def wf(self, gamma: TypingContext, t: Type, rule: str, span):
        loose = free_type_vars(t) - gamma.type_vars()
        if loose:
            raise TypingError(rule, "well-formed",
                              f"type {pretty_type(t)} mentions unbound type variables {sorted(loose)}", span)

    def same(self, got: Type, want: Type, rule: str, premise: str, span):
        if not type_equal(got, want):
            raise TypingError(rule, premise,
                              f"expected type {pretty_type(want)}, found {pretty_type(got)}", span)

    def delegation_premises(self, pi, pc, proof_type, rule, span):
        p, q = proof_type.superior, proof_type.inferior
        self.acts(pi, pc, voice(q), rule, "pc≽∇(q)", span)
        self.acts(pi, voice(ConfProj(p)), voice(ConfProj(q)), rule, "∇(p→)≽∇(q→)", span)
        return pi.extend(Delegation(p, q))

    # rules -------------------------------------------------------------------
    def check(self, pi: DelegationContext, gamma: TypingContext, pc: Principal, e: Term) -> Type:
        sp = getattr(e, "span", None)
        if isinstance(e, Var):
            t = gamma.lookup(e.name)
            if t is None:
                raise TypingError("Var", "bound", f"variable {e.name!r} is not in scope", sp)
            return t
        if isinstance(e, UnitV):
            return UNIT_T
        if isinstance(e, Del):
            return ActsForT(e.superior, e.inferior)
        if isinstance(e, Lam):
            self.wf(gamma, e.var_type, "Lam", sp)
            body = self.check(pi, gamma.with_var(e.var, e.var_type), e.pc, e.body)
            return FunT(e.var_type, e.pc, body)
        if isinstance(e, TLam):
            body = self.check(pi, gamma.with_type_var(e.var), e.pc, e.body)
            return ForallT(e.var, e.pc, body)
        if isinstance(e, App):
            ft = self.check(pi, gamma, pc, e.fun)
            if not isinstance(ft, FunT):
                raise TypingError("App", "function", f"applying a non-function of type {pretty_type(ft)}", sp)
            at = self.check(pi, gamma, pc, e.arg)
            self.same(at, ft.arg, "App", "argument", sp)
            self.flows(pi, pc, ft.pc, "App", "pc⊑pc'", sp)
            return ft.result
        if isinstance(e, TApp):
            ft = self.check(pi, gamma, pc, e.fun)
            if not isinstance(ft, ForallT):
                raise TypingError("TApp", "polymorphic",
                                  f"instantiating a non-polymorphic term of type {pretty_type(ft)}", sp)
            self.wf(gamma, e.type_arg, "TApp", sp)
            self.flows(pi, pc, ft.pc, "TApp", "pc⊑pc'", sp)
            return subst_type(ft.body, ft.var, e.type_arg)
        if isinstance(e, Pair):
            return ProdT(self.check(pi, gamma, pc, e.left), self.check(pi, gamma, pc, e.right))
        if isinstance(e, Proj):
            t = self.check(pi, gamma, pc, e.body)
            if not isinstance(t, ProdT):
                raise TypingError("Unpair", "product", f"projecting from type {pretty_type(t)}", sp)
            return t.left if e.index == 1 else t.right
        if isinstance(e, Inj):
            st = e.sum_type
            self.wf(gamma, st, "Inj", sp)
            if not isinstance(st, SumT):
                raise TypingError("Inj", "sum", f"annotation {pretty_type(st)} is not a sum type", sp)
            t = self.check(pi, gamma, pc, e.body)
            self.same(t, st.left if e.index == 1 else st.right, "Inj", "component", sp)
            return st
        if isinstance(e, Case):
            st = self.check(pi, gamma, pc, e.scrutinee)
            if not isinstance(st, SumT):
                raise TypingError("Case", "sum", f"case analysis on type {pretty_type(st)}", sp)
            t1 = self.check(pi, gamma.with_var(e.var, st.left), pc, e.left)
            t2 = self.check(pi, gamma.with_var(e.var, st.right), pc, e.right)
            self.same(t2, t1, "Case", "branches", sp)
            if not protects(pi, pc, t1):
                raise TypingError("Case", "protects",
                                  f"expected Π ⊩ {render(pc)} protects {pretty_type(t1)}", sp, pc)
            return t1
        if isinstance(e, UnitM):
            t = self.check(pi, gamma, pc, e.body)
            self.flows(pi, pc, e.label, "UnitM", "pc⊑ℓ", sp)
            return SaysT(e.label, t)
        if isinstance(e, Sealed):
            return SaysT(e.label, self.check(pi, gamma, pc, e.body))
        if isinstance(e, Bind):
            bt = self.check(pi, gamma, pc, e.bound)
            if not isinstance(bt, SaysT):
                raise TypingError("BindM", "says", f"binding from type {pretty_type(bt)}", sp)
            raised = join(pc, bt.label)
            t = self.check(pi, gamma.with_var(e.var, bt.body), raised, e.body)
            if not protects(pi, raised, t):
                raise TypingError("BindM", "protects",
                                  f"expected Π ⊩ {render(raised)} protects {pretty_type(t)}",
                                  sp, raised)
            return t
        if isinstance(e, Assume):
            pt = self.check(pi, gamma, pc, e.proof)
            if not isinstance(pt, ActsForT):
                raise TypingError("Assume", "delegation", f"assuming a term of type {pretty_type(pt)}", sp)
            inner = self.delegation_premises(pi, pc, pt, "Assume", sp)
            return self.check(inner, gamma, pc, e.body)
        if isinstance(e, Where):
            pt = self.check(pi, gamma, pc, e.proof)
            if not isinstance(pt, ActsForT):
                raise TypingError("Where", "delegation", f"where-clause of type {pretty_type(pt)}", sp)
            inner = self.delegation_premises(pi, self.cfg.pc_most, pt, "Where", sp)
            return self.check(inner, gamma, pc, e.body)
        if isinstance(e, ProtCtx):
            return self.check(pi, gamma, join(pc, e.label), e.body)
        if isinstance(e, Bracket):
            return self.check_bracket(pi, gamma, pc, e, sp)
        if isinstance(e, Hole):
            return self.check_hole(pi, gamma, pc, e, sp)
        raise TypingError("Syntax", "form", f"no typing rule for {type(e).__name__}", sp)

    def require_harness(self, rule, sp):
        if self.cfg.harness is None:
            raise TypingError(rule, "harness", "brackets and holes need a harness principal H and projection", sp)
        return self.cfg.harness

    def check_bracket(self, pi, gamma, pc, e: Bracket, sp) -> Type:
        H, d = self.require_harness("Bracket", sp)
        Hd = proj(H, d)
        if is_where_value(e.left) and is_where_value(e.right):
            rule, inner_pc = "Bracket-Values", pc
        else:
            # raise only the projected component of the pc
            rule = "Bracket"
            inner_pc = Conj(proj(join(Hd, pc), d), proj(pc, d.other))
            self.flows(pi, join(Hd, proj(pc, d)), proj(inner_pc, d), rule, "H^π⊔pc^π⊑pc'^π", sp)
        t1 = self.check(pi, gamma, inner_pc, e.left)
        t2 = self.check(pi, gamma, inner_pc, e.right)
        self.same(t2, t1, rule, "sides", sp)
        if not protects(pi, Hd, project_type(t1, d)):
            raise TypingError(rule, "protects",
                              f"expected Π ⊩ {render(Hd)} protects {pretty_type(project_type(t1, d))}", sp, Hd)
        return t1

    def check_hole(self, pi, gamma, pc, e: Hole, sp) -> Type:
        H, _ = self.require_harness("Hole", sp)
        self.wf(gamma, e.hole_type, "Hole", sp)
        self.acts(pi, IntegProj(H), IntegProj(pc), "Hole", "H←≽pc←", sp)
        self.flows(pi, ConfProj(pc), view(IntegProj(H)), "Hole", "pc→⊑Δ(H←)", sp)
        self.hole_sites.append(HoleSite(e.hole_type, gamma, pc, pi))
        return e.hole_type


def typecheck(pi: DelegationContext, gamma: Union[TypingContext, Sequence[Tuple[str, Type]]],
              pc: Principal, e: Term, cfg: CheckerConfig = CheckerConfig()) -> Type:
    """The type of e, or a TypingError naming the first failed premise."""
    if not isinstance(gamma, TypingContext):
        gamma = TypingContext.of(gamma)
    checker = Checker(cfg)
    for x, t in gamma.bindings():
        checker.wf(gamma, t, "Context", None)
    return checker.check(pi, gamma, pc, e)


def hole_sites(pi: DelegationContext, gamma, pc: Principal, e: Term,
               cfg: CheckerConfig) -> Tuple[Type, List[HoleSite]]:
    if not isinstance(gamma, TypingContext):
        gamma = TypingContext.of(gamma)
    checker = Checker(cfg)
    t = checker.check(pi, gamma, pc, e)
    return t, checker.hole_sites


def well_typed(pi, gamma, pc, e, cfg: CheckerConfig = CheckerConfig()) -> bool:
    try:
        typecheck(pi, gamma, pc, e, cfg)
        return True
    except TypingError:
        return False
