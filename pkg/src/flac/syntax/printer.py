"""Pretty-printer producing text the parser reads back to the same tree."""
from __future__ import annotations

from ..principals import Principal, render
from .terms import (
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
    Opaque,
    Pair,
    ProdT,
    Proj,
    ProtCtx,
    SaysT,
    Sealed,
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
)

# type precedence: arrow/forall < sum < product < says < atom
_T_ARROW, _T_SUM, _T_PROD, _T_SAYS, _T_ATOM = range(5)


def _tprec(t: Type) -> int:
    if isinstance(t, (FunT, ForallT)):
        return _T_ARROW
    if isinstance(t, SumT):
        return _T_SUM
    if isinstance(t, ProdT):
        return _T_PROD
    if isinstance(t, (SaysT, ActsForT)):
        return _T_SAYS
    return _T_ATOM


def pretty_type(t: Type, level: int = _T_ARROW) -> str:
    out = _type(t)
    if _tprec(t) < level:
        return f"({out})"
    return out


def _type(t: Type) -> str:
    if isinstance(t, UnitT):
        return "unit"
    if isinstance(t, TyVar):
        return t.name
    if isinstance(t, ActsForT):
        return f"{render(t.superior)} |> {render(t.inferior)}"
    if isinstance(t, SaysT):
        return f"{render(t.label)} says {pretty_type(t.body, _T_SAYS)}"
    if isinstance(t, ProdT):
        return f"{pretty_type(t.left, _T_PROD)} * {pretty_type(t.right, _T_SAYS)}"
    if isinstance(t, SumT):
        return f"{pretty_type(t.left, _T_SUM)} + {pretty_type(t.right, _T_PROD)}"
    if isinstance(t, FunT):
        return f"{pretty_type(t.arg, _T_SUM)} [{render(t.pc)}]-> {pretty_type(t.result)}"
    if isinstance(t, ForallT):
        return f"forall {t.var} [{render(t.pc)}]. {pretty_type(t.body)}"
    raise TypeError(f"not a type: {t!r}")


# term precedence: binders < application < prefix operators < atoms
_E_TERM, _E_APP, _E_PREFIX, _E_ATOM = range(4)
_BINDERS = (Lam, TLam, Bind, Assume, Case, Where)


def _eprec(e: Term) -> int:
    if isinstance(e, _BINDERS):
        return _E_TERM
    if isinstance(e, (App, TApp)):
        return _E_APP
    if isinstance(e, (Proj, Inj, UnitM, Sealed, ProtCtx)):
        return _E_PREFIX
    return _E_ATOM


def pretty(e: Term, level: int = _E_TERM) -> str:
    out = _term(e)
    if _eprec(e) < level:
        return f"({out})"
    return out


def _lbl(p: Principal) -> str:
    return f"[{render(p)}]"


def _term(e: Term) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, UnitV):
        return "unit"
    if isinstance(e, Opaque):
        return "∘"
    if isinstance(e, Del):
        return f"<{render(e.superior)} |> {render(e.inferior)}>"
    if isinstance(e, Pair):
        return f"<{pretty(e.left)}, {pretty(e.right)}>"
    if isinstance(e, Bracket):
        return f"{{{pretty(e.left)} | {pretty(e.right)}}}"
    if isinstance(e, Hole):
        return f"hole[{pretty_type(e.hole_type)}]"
    if isinstance(e, Proj):
        return f"proj{e.index} {pretty(e.body, _E_PREFIX)}"
    if isinstance(e, Inj):
        return f"inj{e.index}[{pretty_type(e.sum_type)}] {pretty(e.body, _E_PREFIX)}"
    if isinstance(e, UnitM):
        return f"eta{_lbl(e.label)} {pretty(e.body, _E_PREFIX)}"
    if isinstance(e, Sealed):
        return f"sealed{_lbl(e.label)} {pretty(e.body, _E_PREFIX)}"
    if isinstance(e, ProtCtx):
        return f"ctx{_lbl(e.label)} {pretty(e.body, _E_PREFIX)}"
    if isinstance(e, App):
        return f"{pretty(e.fun, _E_APP)} {pretty(e.arg, _E_ATOM)}"
    if isinstance(e, TApp):
        return f"{pretty(e.fun, _E_APP)} [{pretty_type(e.type_arg)}]"
    if isinstance(e, Lam):
        return f"\\{e.var}:{pretty_type(e.var_type)} {_lbl(e.pc)}. {pretty(e.body)}"
    if isinstance(e, TLam):
        return f"/\\{e.var} {_lbl(e.pc)}. {pretty(e.body)}"
    if isinstance(e, Bind):
        return f"bind {e.var} = {pretty(e.bound, _E_APP)} in {pretty(e.body)}"
    if isinstance(e, Assume):
        return f"assume {pretty(e.proof, _E_APP)} in {pretty(e.body)}"
    if isinstance(e, Case):
        return (f"case {pretty(e.scrutinee, _E_APP)} of {e.var}. {pretty(e.left, _E_APP)}"
                f" | {e.var}. {pretty(e.right)}")
    if isinstance(e, Where):
        return f"{pretty(e.body, _E_APP) if not isinstance(e.body, Where) else _term(e.body)} where {pretty(e.proof, _E_ATOM)}"
    raise TypeError(f"not a term: {e!r}")
