"""Delegation contexts and robust acts-for reasoning.

A judgment ``Pi |- p >= q`` is decided semantically.  Every lattice
homomorphism from principals into the two-element lattice picks a side
(confidentiality or integrity) and a set of names mapped to 1.  The
delegations of Pi that pass the well-formedness premise cut this set of
models down, and ``p >= q`` holds exactly when every surviving model maps p
at least as high as q.  Models are packed into Python ints, one bit each.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple

from .principals import (
    BOT,
    TOP,
    ConfProj,
    canonical,
    Conj,
    Disj,
    IntegProj,
    Name,
    Principal,
    Top,
    Bot,
    conj,
    disj,
    flows_to_query,
    names_of,
    voice,
)


@dataclass(frozen=True)
class Delegation:
    """``<superior >= inferior>``: the inferior delegates to the superior."""

    superior: Principal
    inferior: Principal

    def __str__(self):
        return f"<{self.superior} |> {self.inferior}>"


@dataclass(frozen=True)
class DelegationContext:
    delegations: Tuple[Delegation, ...] = ()

    def __post_init__(self):
        seen = []
        for d in self.delegations:
            if d not in seen:
                seen.append(d)
        object.__setattr__(self, "delegations", tuple(seen))

    @classmethod
    def of(cls, *pairs) -> "DelegationContext":
        ds = [p if isinstance(p, Delegation) else Delegation(*p) for p in pairs]
        return cls(tuple(ds))

    def extend(self, *ds: Delegation) -> "DelegationContext":
        return DelegationContext(self.delegations + tuple(ds))

    def __iter__(self) -> Iterator[Delegation]:
        return iter(self.delegations)

    def __len__(self):
        return len(self.delegations)

    def names(self) -> FrozenSet[str]:
        out: FrozenSet[str] = frozenset()
        for d in self.delegations:
            out |= names_of(d.superior) | names_of(d.inferior)
        return out

    def __str__(self):
        return "[" + ", ".join(f"{d.superior} |> {d.inferior}" for d in self) + "]"


EMPTY = DelegationContext()


class CandidateSpaceExceeded(Exception):
    """The factorization universe is larger than the configured bound."""


# ---------------------------------------------------------------------------
# model space

class ModelSpace:
    """All homomorphisms into 2 over a fixed name universe, as bit positions.

    Bit ``side * 2**n + a`` stands for the model on ``side`` (0 conf,
    1 integ) whose true names are the bits of ``a``.
    """

    def __init__(self, names: Iterable[str]):
        self.names: Tuple[str, ...] = tuple(sorted(set(names)))
        n = len(self.names)
        self.half = 1 << n
        self.size = 2 * self.half
        self.full = (1 << self.size) - 1
        self.conf_mask = (1 << self.half) - 1
        self.integ_mask = self.conf_mask << self.half
        self.name_mask: Dict[str, int] = {}
        for k, name in enumerate(self.names):
            m = 0
            for a in range(self.half):
                if a >> k & 1:
                    m |= 1 << a
            self.name_mask[name] = m | (m << self.half)
        self._cache: Dict[Principal, int] = {}

    def eval(self, p: Principal) -> int:
        hit = self._cache.get(p)
        if hit is not None:
            return hit
        if isinstance(p, Name):
            v = self.name_mask[p.name]
        elif isinstance(p, Top):
            v = self.full
        elif isinstance(p, Bot):
            v = 0
        elif isinstance(p, ConfProj):
            v = self.eval(p.body) & self.conf_mask
        elif isinstance(p, IntegProj):
            v = self.eval(p.body) & self.integ_mask
        elif isinstance(p, Conj):
            v = self.eval(p.left) | self.eval(p.right)
        elif isinstance(p, Disj):
            v = self.eval(p.left) & self.eval(p.right)
        else:
            raise TypeError(f"not a principal: {p!r}")
        self._cache[p] = v
        return v

    def model(self, bit: int) -> Tuple[str, FrozenSet[str]]:
        side = "conf" if bit < self.half else "integ"
        a = bit % self.half
        return side, frozenset(n for k, n in enumerate(self.names) if a >> k & 1)


@lru_cache(maxsize=4096)
def _space(names: FrozenSet[str]) -> ModelSpace:
    return ModelSpace(names)


def _satisfying(space: ModelSpace, ds: Iterable[Delegation]) -> int:
    ok = space.full
    for d in ds:
        ok &= ~(space.eval(d.inferior) & ~space.eval(d.superior))
    return ok & space.full


def _wf_query(d: Delegation) -> Tuple[Principal, Principal]:
    return voice(ConfProj(d.superior)), voice(ConfProj(d.inferior))


@lru_cache(maxsize=4096)
def _usable(pi: DelegationContext, names: FrozenSet[str]) -> Tuple[Tuple[Delegation, ...], int]:
    space = _space(names)
    usable: List[Delegation] = []
    valid = space.full
    changed = True
    while changed:
        changed = False
        for d in pi:
            if d in usable:
                continue
            hi, lo = _wf_query(d)
            if space.eval(lo) & ~space.eval(hi) & valid == 0:
                usable.append(d)
                valid = _satisfying(space, usable)
                changed = True
    return tuple(usable), valid


def _universe(pi: DelegationContext, *ps: Principal) -> FrozenSet[str]:
    out = pi.names()
    for p in ps:
        out |= names_of(p)
    return out


def usable_delegations(pi: DelegationContext) -> Tuple[Delegation, ...]:
    """The delegations of Pi that some derivation may actually use."""
    return _usable(pi, _universe(pi))[0]


def robust_acts_for(pi: DelegationContext, p: Principal, q: Principal) -> bool:
    names = _universe(pi, p, q)
    space = _space(names)
    _, valid = _usable(pi, names)
    return space.eval(q) & ~space.eval(p) & valid == 0


def robust_equivalent(pi: DelegationContext, p: Principal, q: Principal) -> bool:
    return robust_acts_for(pi, p, q) and robust_acts_for(pi, q, p)


def robust_flows_to(pi: DelegationContext, p: Principal, q: Principal) -> bool:
    return robust_acts_for(pi, *flows_to_query(p, q))


def countermodel(pi: DelegationContext, p: Principal, q: Principal) -> Optional[Tuple[str, FrozenSet[str]]]:
    """A model respecting Pi where q holds but p does not, if any."""
    names = _universe(pi, p, q)
    space = _space(names)
    _, valid = _usable(pi, names)
    bad = space.eval(q) & ~space.eval(p) & valid
    if not bad:
        return None
    return space.model((bad & -bad).bit_length() - 1)


# ---------------------------------------------------------------------------
# factorization and subtraction

@dataclass(frozen=True)
class Factorization:
    base: Principal
    gap: Principal


DEFAULT_FACTORIZATION_BOUND = 24


def _characteristic(space: ModelSpace, bit: int) -> Principal:
    # the weakest principal true at this model and every model above it
    side, true_names = space.model(bit)
    proj = ConfProj if side == "conf" else IntegProj
    if not true_names:
        return proj(TOP)
    return disj(*[proj(Name(n)) for n in sorted(true_names)])


def minimal_factorization(pi: DelegationContext, p: Principal, q: Principal,
                          bound: int = DEFAULT_FACTORIZATION_BOUND) -> Factorization:
    """Split q into ``p \\/ q`` and the weakest gap that restores q.

    The gap is built from the models where q holds and p does not: its model
    set is their upward closure, which is the least set any principal can
    denote while still covering them.  ``bound`` caps the number of basis
    atoms (two per name).
    """
    names = _universe(pi, p, q)
    if 2 * len(names) > bound:
        raise CandidateSpaceExceeded(
            f"{2 * len(names)} basis atoms exceed the bound of {bound}")
    space = _space(names)
    _, valid = _usable(pi, names)
    base = Disj(p, q)
    missing = space.eval(q) & ~space.eval(p) & valid
    if not missing:
        return Factorization(base, BOT)
    bits = [b for b in range(space.size) if missing >> b & 1]
    points = [space.model(b) for b in bits]
    minimal = []
    for b, (side, a) in zip(bits, points):
        if not any(s == side and other < a for s, other in points):
            minimal.append(b)
    gap = conj(*[_characteristic(space, b) for b in minimal])
    return Factorization(base, canonical(gap))


def subtract(pi: DelegationContext, q: Principal, p: Principal,
             bound: int = DEFAULT_FACTORIZATION_BOUND) -> Principal:
    """``q - p``: the authority p lacks to act for q."""
    return minimal_factorization(pi, p, q, bound).gap
