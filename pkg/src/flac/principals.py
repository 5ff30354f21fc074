"""Principal algebra with confidentiality and integrity projections (no ownership projections).

Every principal denotes a pair (confidentiality, integrity) of elements of
the free bounded distributive lattice over names.  A lattice element is kept
as a set of clauses read as ``c1 \\/ c2 \\/ ...`` where each clause is the
conjunction (``/\\``) of the names it holds.  The empty clause set is the top
element and the set holding only the empty clause is bottom.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import FrozenSet, Iterable, Tuple, Union


class Dir(Enum):
    """Projection tag: confidentiality (->) or integrity (<-)."""

    CONF = "->"
    INTEG = "<-"

    @property
    def other(self) -> "Dir":
        return Dir.INTEG if self is Dir.CONF else Dir.CONF


CONF = Dir.CONF
INTEG = Dir.INTEG


@dataclass(frozen=True)
class Name:
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("principal names must be nonempty")


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class ConfProj:
    body: "Principal"


@dataclass(frozen=True)
class IntegProj:
    body: "Principal"


@dataclass(frozen=True)
class Conj:
    left: "Principal"
    right: "Principal"


@dataclass(frozen=True)
class Disj:
    left: "Principal"
    right: "Principal"


Principal = Union[Name, Top, Bot, ConfProj, IntegProj, Conj, Disj]

TOP = Top()
BOT = Bot()


def names_of(p: Principal) -> FrozenSet[str]:
    if isinstance(p, Name):
        return frozenset([p.name])
    if isinstance(p, (ConfProj, IntegProj)):
        return names_of(p.body)
    if isinstance(p, (Conj, Disj)):
        return names_of(p.left) | names_of(p.right)
    return frozenset()


# ---------------------------------------------------------------------------
# lattice elements in clause form

Clause = FrozenSet[str]
Element = FrozenSet[Clause]

EL_TOP: Element = frozenset()
EL_BOT: Element = frozenset([frozenset()])


def _minimize(clauses: Iterable[Clause]) -> Element:
    # a clause that contains another clause is absorbed by it
    cs = sorted(set(clauses), key=len)
    kept = []
    for c in cs:
        if not any(k <= c for k in kept):
            kept.append(c)
    return frozenset(kept)


def el_conj(x: Element, y: Element) -> Element:
    if not x or not y:
        return EL_TOP
    return _minimize(a | b for a in x for b in y)


def el_disj(x: Element, y: Element) -> Element:
    return _minimize(x | y)


def el_geq(x: Element, y: Element) -> bool:
    """x has at least the authority of y."""
    return all(any(t <= s for t in y) for s in x)


def _clause_key(c: Clause):
    return (len(c), sorted(c))


def el_sorted(x: Element) -> Tuple[Tuple[str, ...], ...]:
    return tuple(tuple(sorted(c)) for c in sorted(x, key=_clause_key))


@dataclass(frozen=True)
class NormalForm:
    """Canonical form ``conf-> /\\ integ<-`` of a principal.

    Each component is a tuple of clauses, each clause a sorted tuple of names.
    ``()`` is top and ``((),)`` is bottom.
    """

    conf: Tuple[Tuple[str, ...], ...]
    integ: Tuple[Tuple[str, ...], ...]

    @classmethod
    def of(cls, conf: Element, integ: Element) -> "NormalForm":
        return cls(el_sorted(conf), el_sorted(integ))

    @property
    def conf_element(self) -> Element:
        return frozenset(frozenset(c) for c in self.conf)

    @property
    def integ_element(self) -> Element:
        return frozenset(frozenset(c) for c in self.integ)

    def to_principal(self) -> Principal:
        return denormalize(self)


@lru_cache(maxsize=200_000)
def _components(p: Principal) -> Tuple[Element, Element]:
    if isinstance(p, Name):
        el = frozenset([frozenset([p.name])])
        return el, el
    if isinstance(p, Top):
        return EL_TOP, EL_TOP
    if isinstance(p, Bot):
        return EL_BOT, EL_BOT
    if isinstance(p, ConfProj):
        return _components(p.body)[0], EL_BOT
    if isinstance(p, IntegProj):
        return EL_BOT, _components(p.body)[1]
    if isinstance(p, Conj):
        lc, li = _components(p.left)
        rc, ri = _components(p.right)
        return el_conj(lc, rc), el_conj(li, ri)
    if isinstance(p, Disj):
        lc, li = _components(p.left)
        rc, ri = _components(p.right)
        return el_disj(lc, rc), el_disj(li, ri)
    raise TypeError(f"not a principal: {p!r}")


def normalize(p: Principal) -> NormalForm:
    c, i = _components(p)
    return NormalForm.of(c, i)


def _element_principal(el: Tuple[Tuple[str, ...], ...]) -> Principal:
    if el == ():
        return TOP
    if el == ((),):
        return BOT
    disjuncts = []
    for clause in el:
        acc: Principal = Name(clause[0])
        for n in clause[1:]:
            acc = Conj(acc, Name(n))
        disjuncts.append(acc)
    out = disjuncts[0]
    for d in disjuncts[1:]:
        out = Disj(out, d)
    return out


def denormalize(nf: NormalForm) -> Principal:
    if nf.conf == nf.integ:
        return _element_principal(nf.conf)
    conf_bot = nf.conf == ((),)
    integ_bot = nf.integ == ((),)
    c = ConfProj(_element_principal(nf.conf))
    i = IntegProj(_element_principal(nf.integ))
    if integ_bot:
        return c
    if conf_bot:
        return i
    return Conj(c, i)


def canonical(p: Principal) -> Principal:
    """A fixed representative of the equivalence class of ``p``."""
    return denormalize(normalize(p))


# ---------------------------------------------------------------------------
# static judgments and derived operators

def static_acts_for(p: Principal, q: Principal) -> bool:
    pc, pi = _components(p)
    qc, qi = _components(q)
    return el_geq(pc, qc) and el_geq(pi, qi)


def equivalent(p: Principal, q: Principal) -> bool:
    return normalize(p) == normalize(q)


def proj(p: Principal, d: Dir) -> Principal:
    return ConfProj(p) if d is CONF else IntegProj(p)


def conf(p: Principal) -> Principal:
    return ConfProj(p)


def integ(p: Principal) -> Principal:
    return IntegProj(p)


def conj(*ps: Principal) -> Principal:
    out = ps[0]
    for p in ps[1:]:
        out = Conj(out, p)
    return out


def disj(*ps: Principal) -> Principal:
    out = ps[0]
    for p in ps[1:]:
        out = Disj(out, p)
    return out


def flows_to_query(p: Principal, q: Principal) -> Tuple[Principal, Principal]:
    """The acts-for query that decides ``p`` flows to ``q``."""
    return Conj(IntegProj(p), ConfProj(q)), Conj(IntegProj(q), ConfProj(p))


def flows_to(p: Principal, q: Principal) -> bool:
    return static_acts_for(*flows_to_query(p, q))


def join(p: Principal, q: Principal) -> Principal:
    return Conj(ConfProj(Conj(p, q)), IntegProj(Disj(p, q)))


def meet(p: Principal, q: Principal) -> Principal:
    return Conj(ConfProj(Disj(p, q)), IntegProj(Conj(p, q)))


def voice(p: Principal) -> Principal:
    c, i = _components(p)
    return denormalize(NormalForm.of(EL_BOT, el_conj(c, i)))


def view(p: Principal) -> Principal:
    c, i = _components(p)
    return denormalize(NormalForm.of(el_conj(c, i), EL_BOT))


SECRET_UNTRUSTED = Conj(ConfProj(TOP), IntegProj(BOT))
PUBLIC_TRUSTED = Conj(ConfProj(BOT), IntegProj(TOP))


# ---------------------------------------------------------------------------
# concrete syntax

_PREC_DISJ, _PREC_CONJ, _PREC_ATOM = 1, 2, 3


def _prec(p: Principal) -> int:
    if isinstance(p, Disj):
        return _PREC_DISJ
    if isinstance(p, Conj):
        return _PREC_CONJ
    return _PREC_ATOM


def render(p: Principal) -> str:
    """Print with the fewest parentheses the grammar allows."""
    if isinstance(p, Name):
        return p.name
    if isinstance(p, Top):
        return "top"
    if isinstance(p, Bot):
        return "bot"
    if isinstance(p, (ConfProj, IntegProj)):
        arrow = "->" if isinstance(p, ConfProj) else "<-"
        inner = render(p.body)
        if _prec(p.body) < _PREC_ATOM:
            inner = f"({inner})"
        return inner + arrow
    if isinstance(p, Conj):
        left = render(p.left)
        right = render(p.right)
        if _prec(p.left) < _PREC_CONJ:
            left = f"({left})"
        if _prec(p.right) <= _PREC_CONJ:
            right = f"({right})"
        return f"{left} /\\ {right}"
    if isinstance(p, Disj):
        left = render(p.left)
        right = render(p.right)
        if _prec(p.right) <= _PREC_DISJ:
            right = f"({right})"
        return f"{left} \\/ {right}"
    raise TypeError(f"not a principal: {p!r}")


for _cls in (Name, Top, Bot, ConfProj, IntegProj, Conj, Disj):
    _cls.__str__ = render  # type: ignore[assignment]
