"""Abstract syntax of types and terms, with substitution and alpha-equivalence."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, fields, replace
from typing import Callable, Dict, FrozenSet, Iterator, List, Optional, Tuple, Union

from ..principals import Principal, canonical as canonical_principal, normalize


@dataclass(frozen=True)
class Span:
    line: int
    col: int

    def __str__(self):
        return f"{self.line}:{self.col}"


def _span():
    return field(default=None, compare=False, repr=False, hash=False)


# ---------------------------------------------------------------------------
# types

@dataclass(frozen=True)
class ActsForT:
    superior: Principal
    inferior: Principal


@dataclass(frozen=True)
class UnitT:
    pass


@dataclass(frozen=True)
class SumT:
    left: "Type"
    right: "Type"


@dataclass(frozen=True)
class ProdT:
    left: "Type"
    right: "Type"


@dataclass(frozen=True)
class FunT:
    arg: "Type"
    pc: Principal
    result: "Type"


@dataclass(frozen=True)
class SaysT:
    label: Principal
    body: "Type"


@dataclass(frozen=True)
class TyVar:
    name: str


@dataclass(frozen=True)
class ForallT:
    var: str
    pc: Principal
    body: "Type"


Type = Union[ActsForT, UnitT, SumT, ProdT, FunT, SaysT, TyVar, ForallT]
UNIT_T = UnitT()


def free_type_vars(t: Type) -> FrozenSet[str]:
    if isinstance(t, TyVar):
        return frozenset([t.name])
    if isinstance(t, (SumT, ProdT)):
        return free_type_vars(t.left) | free_type_vars(t.right)
    if isinstance(t, FunT):
        return free_type_vars(t.arg) | free_type_vars(t.result)
    if isinstance(t, SaysT):
        return free_type_vars(t.body)
    if isinstance(t, ForallT):
        return free_type_vars(t.body) - {t.var}
    return frozenset()


def fresh_name(base: str, avoid) -> str:
    stem = base.rstrip("'0123456789_") or "v"
    for k in itertools.count(1):
        cand = f"{stem}_{k}"
        if cand not in avoid:
            return cand
    raise AssertionError("unreachable")


def subst_type(t: Type, var: str, repl: Type) -> Type:
    """Capture-avoiding ``t[var := repl]``."""
    if isinstance(t, TyVar):
        return repl if t.name == var else t
    if isinstance(t, SumT):
        return SumT(subst_type(t.left, var, repl), subst_type(t.right, var, repl))
    if isinstance(t, ProdT):
        return ProdT(subst_type(t.left, var, repl), subst_type(t.right, var, repl))
    if isinstance(t, FunT):
        return FunT(subst_type(t.arg, var, repl), t.pc, subst_type(t.result, var, repl))
    if isinstance(t, SaysT):
        return SaysT(t.label, subst_type(t.body, var, repl))
    if isinstance(t, ForallT):
        if t.var == var:
            return t
        body, bound = t.body, t.var
        fv = free_type_vars(repl)
        if bound in fv:
            new = fresh_name(bound, fv | free_type_vars(body) | {var})
            body = subst_type(body, bound, TyVar(new))
            bound = new
        return ForallT(bound, t.pc, subst_type(body, var, repl))
    return t


def type_equal(a: Type, b: Type) -> bool:
    """Structural equality up to principal equivalence and bound-variable names."""
    return _teq(a, b, {}, {}, 0)


def _teq(a, b, env_a: Dict[str, int], env_b: Dict[str, int], d: int) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, UnitT):
        return True
    if isinstance(a, TyVar):
        ia, ib = env_a.get(a.name), env_b.get(b.name)
        if ia is None and ib is None:
            return a.name == b.name
        return ia == ib
    if isinstance(a, ActsForT):
        return normalize(a.superior) == normalize(b.superior) and normalize(a.inferior) == normalize(b.inferior)
    if isinstance(a, (SumT, ProdT)):
        return _teq(a.left, b.left, env_a, env_b, d) and _teq(a.right, b.right, env_a, env_b, d)
    if isinstance(a, FunT):
        return (normalize(a.pc) == normalize(b.pc) and _teq(a.arg, b.arg, env_a, env_b, d)
                and _teq(a.result, b.result, env_a, env_b, d))
    if isinstance(a, SaysT):
        return normalize(a.label) == normalize(b.label) and _teq(a.body, b.body, env_a, env_b, d)
    if isinstance(a, ForallT):
        if normalize(a.pc) != normalize(b.pc):
            return False
        return _teq(a.body, b.body, {**env_a, a.var: d}, {**env_b, b.var: d}, d + 1)
    raise TypeError(f"not a type: {a!r}")


# ---------------------------------------------------------------------------
# terms

@dataclass(frozen=True)
class Var:
    name: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class UnitV:
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Pair:
    left: "Term"
    right: "Term"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Proj:
    index: int
    body: "Term"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Inj:
    index: int
    body: "Term"
    sum_type: Type
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Case:
    scrutinee: "Term"
    var: str
    left: "Term"
    right: "Term"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Lam:
    var: str
    var_type: Type
    pc: Principal
    body: "Term"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class TLam:
    var: str
    pc: Principal
    body: "Term"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class TApp:
    fun: "Term"
    type_arg: Type
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Del:
    superior: Principal
    inferior: Principal
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class UnitM:
    label: Principal
    body: "Term"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Sealed:
    label: Principal
    body: "Term"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Bind:
    var: str
    bound: "Term"
    body: "Term"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Assume:
    proof: "Term"
    body: "Term"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Where:
    body: "Term"
    proof: "Term"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class ProtCtx:
    label: Principal
    body: "Term"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Bracket:
    left: "Term"
    right: "Term"
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Hole:
    hole_type: Type
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Opaque:
    """The observation marker for a term hidden from the observer."""

    span: Optional[Span] = _span()


Term = Union[Var, UnitV, Pair, Proj, Inj, Case, Lam, App, TLam, TApp, Del, UnitM,
             Sealed, Bind, Assume, Where, ProtCtx, Bracket, Hole, Opaque]

UNIT = UnitV()
OPAQUE = Opaque()

EXTENDED_NODES = (Sealed, Where, ProtCtx, Bracket, Hole, Opaque)

# child fields holding terms, per node class
_TERM_FIELDS: Dict[type, Tuple[str, ...]] = {
    Pair: ("left", "right"), Proj: ("body",), Inj: ("body",),
    Case: ("scrutinee", "left", "right"), Lam: ("body",), App: ("fun", "arg"),
    TLam: ("body",), TApp: ("fun",), UnitM: ("body",), Sealed: ("body",),
    Bind: ("bound", "body"), Assume: ("proof", "body"), Where: ("body", "proof"),
    ProtCtx: ("body",), Bracket: ("left", "right"),
}


def children(e: Term) -> List[Term]:
    return [getattr(e, f) for f in _TERM_FIELDS.get(type(e), ())]


def map_children(e: Term, fn: Callable[[Term], Term]) -> Term:
    names = _TERM_FIELDS.get(type(e), ())
    if not names:
        return e
    return replace(e, **{f: fn(getattr(e, f)) for f in names})


def subterms(e: Term) -> Iterator[Term]:
    yield e
    for c in children(e):
        yield from subterms(c)


def is_source_level(e: Term) -> bool:
    return not any(isinstance(s, EXTENDED_NODES) for s in subterms(e))


def is_value(e: Term) -> bool:
    if isinstance(e, (UnitV, Del, Lam, TLam)):
        return True
    if isinstance(e, Pair):
        return is_where_value(e.left) and is_where_value(e.right)
    if isinstance(e, (Inj, Sealed)):
        return is_where_value(e.body)
    return False


def is_where_value(e: Term) -> bool:
    while isinstance(e, Where):
        if not is_value(e.proof):
            return False
        e = e.body
    if isinstance(e, Bracket):
        return is_where_value(e.left) and is_where_value(e.right)
    return is_value(e)


def strip_where(e: Term) -> Term:
    while isinstance(e, Where):
        e = e.body
    return e


def free_vars(e: Term) -> FrozenSet[str]:
    if isinstance(e, Var):
        return frozenset([e.name])
    if isinstance(e, Lam):
        return free_vars(e.body) - {e.var}
    if isinstance(e, Bind):
        return free_vars(e.bound) | (free_vars(e.body) - {e.var})
    if isinstance(e, Case):
        return free_vars(e.scrutinee) | ((free_vars(e.left) | free_vars(e.right)) - {e.var})
    out: FrozenSet[str] = frozenset()
    for c in children(e):
        out |= free_vars(c)
    return out


def _all_vars(e: Term) -> FrozenSet[str]:
    out = set()
    for s in subterms(e):
        if isinstance(s, Var):
            out.add(s.name)
        elif isinstance(s, (Lam, Bind, Case)):
            out.add(s.var)
    return frozenset(out)


def rename_var(e: Term, old: str, new: str) -> Term:
    return substitute(e, old, Var(new))


def substitute(e: Term, x: str, w: Term) -> Term:
    """Capture-avoiding ``e[x := w]``."""
    return _subst(e, x, w, free_vars(w))


def _subst(e: Term, x: str, w: Term, fv_w: FrozenSet[str]) -> Term:
    if isinstance(e, Var):
        return w if e.name == x else e
    if isinstance(e, Lam):
        if e.var == x:
            return e
        var, body = _freshen(e.var, e.body, x, fv_w)
        return replace(e, var=var, body=_subst(body, x, w, fv_w))
    if isinstance(e, Bind):
        bound = _subst(e.bound, x, w, fv_w)
        if e.var == x:
            return replace(e, bound=bound)
        var, body = _freshen(e.var, e.body, x, fv_w)
        return replace(e, var=var, bound=bound, body=_subst(body, x, w, fv_w))
    if isinstance(e, Case):
        scrut = _subst(e.scrutinee, x, w, fv_w)
        if e.var == x:
            return replace(e, scrutinee=scrut)
        var = e.var
        left, right = e.left, e.right
        if var in fv_w:
            new = fresh_name(var, fv_w | _all_vars(left) | _all_vars(right) | {x})
            left, right = rename_var(left, var, new), rename_var(right, var, new)
            var = new
        return replace(e, scrutinee=scrut, var=var,
                       left=_subst(left, x, w, fv_w), right=_subst(right, x, w, fv_w))
    if isinstance(e, Bracket):
        # brackets hold the two executions apart: each side gets its own view of w
        from ..eval import project
        return Bracket(substitute(e.left, x, project(w, 1)), substitute(e.right, x, project(w, 2)))
    return map_children(e, lambda c: _subst(c, x, w, fv_w))


def _freshen(var: str, body: Term, x: str, fv_w: FrozenSet[str]):
    if var not in fv_w or x not in free_vars(body):
        return var, body
    new = fresh_name(var, fv_w | _all_vars(body) | {x})
    return new, rename_var(body, var, new)


def free_type_vars_term(e: Term) -> FrozenSet[str]:
    out = set()
    for t in _term_types(e):
        out |= free_type_vars(t)
    if isinstance(e, TLam):
        return frozenset(out) | (free_type_vars_term(e.body) - {e.var})
    for c in children(e):
        out |= free_type_vars_term(c)
    return frozenset(out)


def _term_types(e: Term) -> List[Type]:
    if isinstance(e, Lam):
        return [e.var_type]
    if isinstance(e, Inj):
        return [e.sum_type]
    if isinstance(e, TApp):
        return [e.type_arg]
    if isinstance(e, Hole):
        return [e.hole_type]
    return []


def substitute_type(e: Term, var: str, repl: Type) -> Term:
    """Capture-avoiding replacement of type variable ``var`` inside a term."""
    return _subst_ty(e, var, repl, free_type_vars(repl))


def _subst_ty(e: Term, var: str, repl: Type, fv: FrozenSet[str]) -> Term:
    if isinstance(e, TLam):
        if e.var == var:
            return e
        bound, body = e.var, e.body
        if bound in fv:
            new = fresh_name(bound, fv | free_type_vars_term(body) | {var})
            body = _subst_ty(body, bound, TyVar(new), frozenset([new]))
            bound = new
        return replace(e, var=bound, body=_subst_ty(body, var, repl, fv))
    if isinstance(e, Lam):
        e = replace(e, var_type=subst_type(e.var_type, var, repl))
    elif isinstance(e, Inj):
        e = replace(e, sum_type=subst_type(e.sum_type, var, repl))
    elif isinstance(e, TApp):
        e = replace(e, type_arg=subst_type(e.type_arg, var, repl))
    elif isinstance(e, Hole):
        return replace(e, hole_type=subst_type(e.hole_type, var, repl))
    return map_children(e, lambda c: _subst_ty(c, var, repl, fv))


# ---------------------------------------------------------------------------
# canonical forms for comparing terms

def canonical_type(t: Type, env: Optional[Dict[str, str]] = None, depth: int = 0) -> Type:
    env = env or {}
    if isinstance(t, TyVar):
        return TyVar(env.get(t.name, t.name))
    if isinstance(t, ActsForT):
        return ActsForT(canonical_principal(t.superior), canonical_principal(t.inferior))
    if isinstance(t, SumT):
        return SumT(canonical_type(t.left, env, depth), canonical_type(t.right, env, depth))
    if isinstance(t, ProdT):
        return ProdT(canonical_type(t.left, env, depth), canonical_type(t.right, env, depth))
    if isinstance(t, FunT):
        return FunT(canonical_type(t.arg, env, depth), canonical_principal(t.pc),
                    canonical_type(t.result, env, depth))
    if isinstance(t, SaysT):
        return SaysT(canonical_principal(t.label), canonical_type(t.body, env, depth))
    if isinstance(t, ForallT):
        new = f"%F{depth}"
        return ForallT(new, canonical_principal(t.pc), canonical_type(t.body, {**env, t.var: new}, depth + 1))
    return t


def canonical_term(e: Term) -> Term:
    """Rename bound variables by binding depth and normalize principals.

    Two terms are alpha-equivalent (up to principal equivalence) exactly when
    their canonical forms are equal.
    """
    return _canon(e, {}, {}, 0)


def _canon(e: Term, env: Dict[str, str], tenv: Dict[str, str], n: int) -> Term:
    if isinstance(e, Var):
        return Var(env.get(e.name, e.name))
    if isinstance(e, Lam):
        new = f"%{n}"
        return Lam(new, canonical_type(e.var_type, tenv), canonical_principal(e.pc),
                   _canon(e.body, {**env, e.var: new}, tenv, n + 1))
    if isinstance(e, Bind):
        new = f"%{n}"
        return Bind(new, _canon(e.bound, env, tenv, n), _canon(e.body, {**env, e.var: new}, tenv, n + 1))
    if isinstance(e, Case):
        new = f"%{n}"
        inner = {**env, e.var: new}
        return Case(_canon(e.scrutinee, env, tenv, n), new,
                    _canon(e.left, inner, tenv, n + 1), _canon(e.right, inner, tenv, n + 1))
    if isinstance(e, TLam):
        new = f"%T{n}"
        return TLam(new, canonical_principal(e.pc), _canon(e.body, env, {**tenv, e.var: new}, n + 1))
    if isinstance(e, TApp):
        return TApp(_canon(e.fun, env, tenv, n), canonical_type(e.type_arg, tenv))
    if isinstance(e, Inj):
        return Inj(e.index, _canon(e.body, env, tenv, n), canonical_type(e.sum_type, tenv))
    if isinstance(e, Hole):
        return Hole(canonical_type(e.hole_type, tenv))
    if isinstance(e, Del):
        return Del(canonical_principal(e.superior), canonical_principal(e.inferior))
    if isinstance(e, (UnitM, Sealed, ProtCtx)):
        return type(e)(canonical_principal(e.label), _canon(e.body, env, tenv, n))
    if isinstance(e, (UnitV, Opaque)):
        return type(e)()
    return map_children(_strip_span(e), lambda c: _canon(c, env, tenv, n))


def _strip_span(e: Term) -> Term:
    if any(f.name == "span" for f in fields(e)):
        return replace(e, span=None)
    return e


def alpha_equal(a: Term, b: Term) -> bool:
    return canonical_term(a) == canonical_term(b)


# ---------------------------------------------------------------------------
# holes

def holes(e: Term) -> List[Hole]:
    return [s for s in subterms(e) if isinstance(s, Hole)]


def fill_holes(e: Term, attacks: List[Term]) -> Term:
    """Plug the holes of e, in left-to-right order, with the given terms.

    Plugging is not capture-avoiding: an attack may mention variables bound
    around its hole.
    """
    it = iter(attacks)

    def go(t: Term) -> Term:
        if isinstance(t, Hole):
            try:
                return next(it)
            except StopIteration:
                raise ValueError("fewer attacks than holes") from None
        return map_children(t, go)

    out = go(e)
    if next(it, None) is not None:
        raise ValueError("more attacks than holes")
    return out
