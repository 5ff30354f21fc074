"""What an observer sees of a run, and executable noninterference checks.

Observation erases the parts of a term a principal is not cleared for,
replacing them with the opaque marker.  The checks below run programs on
bracketed inputs, compare what the observer sees of each side, and refuse
(rather than pass) when the conditions that make the guarantee meaningful
do not hold.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .delegations import (
    DEFAULT_FACTORIZATION_BOUND,
    DelegationContext,
    robust_acts_for,
    robust_flows_to,
    subtract,
)
from .eval import DEFAULT_FUEL, Stepped, Stuck, Trace, Value, project, run, step
from .principals import (
    ConfProj,
    Conj,
    Dir,
    IntegProj,
    Principal,
    proj,
    render,
    view,
    voice,
)
from .syntax.printer import pretty
from .syntax.terms import (
    OPAQUE,
    App,
    Assume,
    Bracket,
    Del,
    Inj,
    Lam,
    Opaque,
    Pair,
    ProtCtx,
    SaysT,
    Sealed,
    TApp,
    Term,
    TLam,
    Type,
    Where,
    canonical_term,
    fill_holes,
    free_vars,
    is_source_level,
    map_children,
    substitute,
    type_equal,
)
from .typecheck import (
    CheckerConfig,
    TypingContext,
    TypingError,
    hole_sites,
    project_type,
    protects,
    typecheck,
)


# ---------------------------------------------------------------------------
# observation

def _visible(pi: DelegationContext, label: Principal, observer: Principal, d: Dir) -> bool:
    return robust_flows_to(pi, proj(label, d), proj(observer, d))


def observe(e: Term, pi: DelegationContext, observer: Principal, d: Dir) -> Term:
    """The part of e that ``observer`` can see along projection d."""
    if isinstance(e, Where):
        return observe(e.body, pi, observer, d)
    if isinstance(e, Sealed):
        if not _visible(pi, e.label, observer, d):
            return OPAQUE
    elif isinstance(e, (Lam, TLam)):
        if not _visible(pi, e.pc, observer, d):
            return OPAQUE
    elif isinstance(e, ProtCtx):
        if not _visible(pi, e.label, observer, d):
            return OPAQUE
    out = map_children(e, lambda c: observe(c, pi, observer, d))
    if isinstance(out, (App, TApp, Pair, Inj, Bracket)):
        # any hidden part hides the whole
        if any(isinstance(c, Opaque) for c in _kids(out)):
            return OPAQUE
    elif isinstance(out, Assume):
        if isinstance(out.proof, Opaque) and isinstance(out.body, Opaque):
            return OPAQUE
    return out


def _kids(e: Term) -> List[Term]:
    if isinstance(e, App):
        return [e.fun, e.arg]
    if isinstance(e, TApp):
        return [e.fun]
    if isinstance(e, (Pair, Bracket)):
        return [e.left, e.right]
    if isinstance(e, Inj):
        return [e.body]
    return []


def _as_terms(t: Union[Trace, Sequence[Term]]) -> Sequence[Term]:
    return t.elements if isinstance(t, Trace) else t


def observe_trace(t: Union[Trace, Sequence[Term]], pi: DelegationContext, observer: Principal,
                  d: Dir) -> List[Term]:
    out: List[Term] = []
    for e in _as_terms(t):
        o = canonical_term(observe(e, pi, observer, d))
        if not out or out[-1] != o:
            out.append(o)
    return out


def trace_equiv(t1, t2, pi: DelegationContext, observer: Principal, d: Dir) -> bool:
    return observe_trace(t1, pi, observer, d) == observe_trace(t2, pi, observer, d)


def first_difference(t1, t2, pi, observer, d) -> Optional[Tuple[int, Optional[Term], Optional[Term]]]:
    a, b = observe_trace(t1, pi, observer, d), observe_trace(t2, pi, observer, d)
    for k in range(max(len(a), len(b))):
        x = a[k] if k < len(a) else None
        y = b[k] if k < len(b) else None
        if x != y:
            return k, x, y
    return None


# ---------------------------------------------------------------------------
# verdicts

@dataclass
class Inapplicable:
    """A side condition of the guarantee fails, so no verdict is given."""

    condition: str
    detail: str

    passed = False

    def __str__(self):
        return f"inapplicable: {self.condition} ({self.detail})"


@dataclass
class NIVerdict:
    passed: bool
    index: Optional[int] = None
    left: Optional[Term] = None
    right: Optional[Term] = None
    steps: int = 0
    detail: str = ""

    def __str__(self):
        if self.passed:
            return f"pass ({self.steps} bracketed steps)"
        if self.index is None:
            return f"fail: {self.detail}"
        show = lambda e: "end of trace" if e is None else pretty(e)
        where = f"observed element {self.index}: {show(self.left)} vs {show(self.right)}"
        if self.detail:
            return f"fail: {self.detail} after bracketed step {self.steps}, {where}"
        return f"fail at {where}"


@dataclass
class RDVerdict:
    passed: bool
    equiv_first: bool = False
    equiv_second: bool = False
    detail: str = ""

    def __str__(self):
        state = "pass" if self.passed else "fail"
        return (f"{state} (inputs indistinguishable under attack 1: {self.equiv_first}, "
                f"under attack 2: {self.equiv_second})")


class CheckError(Exception):
    """A check could not be run: an input is ill typed, stuck or out of fuel."""


# ---------------------------------------------------------------------------
# noninterference

def _gamma(g) -> TypingContext:
    return g if isinstance(g, TypingContext) else TypingContext.of(g)


def ni_conditions(pi: DelegationContext, pc: Principal, input_type: Type, H: Principal,
                  observer: Principal, d: Dir,
                  bound: int = DEFAULT_FACTORIZATION_BOUND) -> Optional[Inapplicable]:
    """The three premises of the noninterference guarantee, first failure first."""
    Hd, ld = proj(H, d), proj(observer, d)
    if not protects(pi, Hd, project_type(input_type, d)):
        return Inapplicable("condition 1", f"{render(Hd)} does not protect the input type")
    if robust_flows_to(pi, Hd, ld):
        return Inapplicable("condition 2", f"{render(Hd)} flows to the observer {render(ld)}")
    if d is Dir.CONF:
        gap, what = voice(subtract(pi, Hd, ld, bound)), "∇(H→ − ℓ→)"
    else:
        gap, what = subtract(pi, ld, Hd, bound), "ℓ← − H←"
    if robust_acts_for(pi, pc, gap):
        return Inapplicable("condition 3", f"pc {render(pc)} acts for {what} = {render(gap)}")
    return None


def _substitute_all(e: Term, sub: Mapping[str, Term]) -> Term:
    for y, w in sub.items():
        e = substitute(e, y, w)
    return e


def _conserve(e: Term, seen: Tuple[List[Term], List[Term]], pi, observer, d):
    """Extend each side's observed history with e; the first disagreement, if any."""
    for side in (1, 2):
        o = canonical_term(observe(project(e, side), pi, observer, d))
        hist = seen[side - 1]
        if not hist or hist[-1] != o:
            hist.append(o)
    a, b = seen
    for k in range(min(len(a), len(b))):
        if a[k] != b[k]:
            return k, a[k], b[k]
    return None


def ni_check(e: Term, gamma, pi: DelegationContext, pc: Principal, x: str, input_type: Type,
             v1: Term, v2: Term, H: Principal, observer: Principal, d: Dir,
             substitution: Optional[Mapping[str, Term]] = None,
             fuel: int = DEFAULT_FUEL,
             bound: int = DEFAULT_FACTORIZATION_BOUND) -> Union[NIVerdict, Inapplicable]:
    """Run e with x bound to the bracket of v1 and v2 and compare the observer's views.

    gamma types every free variable of e other than x; substitution supplies
    closed values for them.  The verdict compares the observer's view of the
    two standalone runs.  Along the way the bracketed run must keep the two
    projected views equal after every step.
    """
    gamma = _gamma(gamma)
    substitution = dict(substitution or {})
    if not is_source_level(e):
        return Inapplicable("source-level", "the program contains intermediate forms")
    bad = ni_conditions(pi, pc, input_type, H, observer, d, bound)
    if bad is not None:
        return bad
    Hd = proj(H, d)
    for y, t in gamma.bindings():
        if y == x:
            continue
        if y not in substitution:
            raise CheckError(f"no value supplied for {y!r}")
        w = substitution[y]
        _expect_type(pi, TypingContext(), pc, w, t, f"substitution for {y}")
        if not is_source_level(w) and not protects(pi, Hd, project_type(t, d)):
            return Inapplicable("substitution", f"{y} is neither source-level nor protected at {render(Hd)}")
    full = gamma.with_var(x, input_type)
    out_type = _expect_type(pi, full, pc, e, None, "program")
    for i, v in ((1, v1), (2, v2)):
        _expect_type(pi, TypingContext(), pc, v, input_type, f"input {i}")

    closed = _substitute_all(e, substitution)
    bracketed = substitute(closed, x, Bracket(v1, v2))
    harness = CheckerConfig(harness=(H, d))
    try:
        bt = typecheck(pi, TypingContext(), pc, bracketed, harness)
    except TypingError as err:
        raise CheckError(f"bracketed program is ill typed: {err}") from err
    if not type_equal(bt, out_type):
        raise CheckError("bracketed program changed type")

    # erasure conservation.  B-Step moves one side at a time, so after a step
    # one projection may be ahead of the other; the observed histories of the
    # two sides must agree on their common prefix at every step and be equal
    # once the run ends.
    cur, steps = bracketed, 0
    seen = ([], [])
    mismatch = _conserve(cur, seen, pi, observer, d)
    if mismatch is not None:
        return NIVerdict(False, mismatch[0], mismatch[1], mismatch[2], 0, "inputs already differ to the observer")
    while True:
        out = step(cur)
        if isinstance(out, Value):
            break
        if isinstance(out, Stuck):
            raise CheckError(f"bracketed run is stuck: {out.reason}")
        cur, steps = out.term, steps + 1
        if steps > fuel:
            raise CheckError("bracketed run ran out of fuel")
        mismatch = _conserve(cur, seen, pi, observer, d)
        if mismatch is not None:
            return NIVerdict(False, mismatch[0], mismatch[1], mismatch[2], steps,
                             "erasure conservation violated")
    if len(seen[0]) != len(seen[1]):
        k = min(len(seen[0]), len(seen[1]))
        longer = seen[0] if len(seen[0]) > k else seen[1]
        return NIVerdict(False, k, seen[0][k] if longer is seen[0] else None,
                         seen[1][k] if longer is seen[1] else None, steps,
                         "erasure conservation violated")

    traces = []
    for v in (v1, v2):
        t, outcome = run(substitute(closed, x, v), fuel)
        if not isinstance(outcome, Value):
            raise CheckError(f"standalone run did not finish: {outcome}")
        traces.append(t)
    diff = first_difference(traces[0], traces[1], pi, observer, d)
    if diff is not None:
        k, a, b = diff
        return NIVerdict(False, k, a, b, steps)
    return NIVerdict(True, steps=steps)


def _expect_type(pi, gamma, pc, e, want: Optional[Type], what: str) -> Type:
    try:
        got = typecheck(pi, gamma, pc, e)
    except TypingError as err:
        raise CheckError(f"{what} is ill typed: {err}") from err
    if want is not None and not type_equal(got, want):
        raise CheckError(f"{what} has the wrong type")
    return got


def compartmentalized(final: Term, pi: DelegationContext, pc: Principal, result_type: Type,
                      H: Principal, d: Dir) -> bool:
    """Every delegation left on the result was either within the pc's power or guards H-protected data."""
    Hd = proj(H, d)
    cur = final
    while isinstance(cur, Where):
        proof = cur.proof
        while isinstance(proof, Where):
            proof = proof.body
        if isinstance(proof, Del):
            if not (robust_acts_for(pi, pc, voice(proof.inferior))
                    or protects(pi, Hd, project_type(result_type, d))):
                return False
        cur = cur.body
    return True


# ---------------------------------------------------------------------------
# fair attacks and robust declassification

@dataclass
class AttackReport:
    fair: bool
    reason: str = ""


def attacker_pc(H: Principal) -> Principal:
    return Conj(IntegProj(H), view(IntegProj(H)))


def fair_attack_check(attacks: Sequence[Term], program: Term, gamma, pi: DelegationContext,
                      pi_h: DelegationContext, pc: Principal, H: Principal,
                      secret: Optional[str] = None) -> AttackReport:
    """Whether the attack vector is fair for the holes of ``program``.

    Each attack must type at the attacker's pc in the hole's context cut
    down to variables the attacker may read, and the filled program must
    type as the original.  When ``secret`` names the protected input, an
    attack mentioning it is rejected outright.
    """
    gamma = _gamma(gamma)
    cfg = CheckerConfig(harness=(H, Dir.CONF))
    try:
        t, sites = hole_sites(pi, gamma, pc, program, cfg)
    except TypingError as err:
        return AttackReport(False, f"program with holes is ill typed: {err}")
    if len(sites) != len(attacks):
        return AttackReport(False, f"{len(attacks)} attacks for {len(sites)} holes")
    attacker_view = view(IntegProj(H))
    h_conf = ConfProj(H)
    for i, (a, site) in enumerate(zip(attacks, sites)):
        if secret is not None and secret in free_vars(a):
            secret_type = gamma.lookup(secret)
            if (secret_type is not None
                    and protects(pi_h, h_conf, project_type(secret_type, Dir.CONF))
                    and not robust_flows_to(pi_h, h_conf, attacker_view)):
                return AttackReport(False, f"the attack on hole {i + 1} mentions the secret {secret!r}")
        allowed = [(y, ty) for y, ty in site.gamma.bindings()
                   if isinstance(ty, SaysT)
                   and robust_flows_to(pi_h, ConfProj(ty.label), attacker_view)]
        ctx = TypingContext.of(allowed, sorted(site.gamma.type_vars()))
        try:
            at = typecheck(pi_h, ctx, attacker_pc(H), a)
        except TypingError as err:
            return AttackReport(False, f"the attack on hole {i + 1} is ill typed at the attacker's pc: {err}")
        if not type_equal(at, site.hole_type):
            return AttackReport(False, f"the attack on hole {i + 1} does not have the hole's type")
    try:
        filled = typecheck(pi, gamma, pc, fill_holes(program, list(attacks)))
    except TypingError as err:
        return AttackReport(False, f"filled program is ill typed: {err}")
    if not type_equal(filled, t):
        return AttackReport(False, "filled program changed type")
    return AttackReport(True)


def rd_conditions(pi_h: DelegationContext, input_type: Type, H: Principal) -> Optional[Inapplicable]:
    h_conf, h_integ = ConfProj(H), IntegProj(H)
    if not protects(pi_h, h_conf, project_type(input_type, Dir.CONF)):
        return Inapplicable("condition 1", f"{render(h_conf)} does not protect the input type")
    if robust_flows_to(pi_h, h_conf, view(h_integ)):
        return Inapplicable("condition 2", "the attacker can already view H→")
    if robust_acts_for(pi_h, h_integ, voice(h_conf)):
        return Inapplicable("condition 3", "the attacker speaks for H→")
    return None


def rd_check(program: Term, gamma, pi: DelegationContext, pi_h: DelegationContext, pc: Principal,
             x: str, input_type: Type, v1: Term, v2: Term,
             attacks1: Sequence[Term], attacks2: Sequence[Term], H: Principal,
             full_runs: bool = False, fuel: int = DEFAULT_FUEL) -> Union[RDVerdict, Inapplicable]:
    """Whether the choice of attack can change what the attacker learns about x.

    By default each of the four runs takes a single step, matching the
    guarantee as stated.  ``full_runs`` runs to completion instead; that
    mode checks more than the guarantee promises.
    """
    gamma = _gamma(gamma)
    bad = rd_conditions(pi_h, input_type, H)
    if bad is not None:
        return bad
    full = gamma.with_var(x, input_type)
    for k, atk in ((1, attacks1), (2, attacks2)):
        report = fair_attack_check(atk, program, full, pi, pi_h, pc, H, secret=x)
        if not report.fair:
            return Inapplicable(f"attack {k} unfair", report.reason)
    for i, v in ((1, v1), (2, v2)):
        _expect_type(pi, gamma, pc, v, input_type, f"input {i}")
    observer = view(IntegProj(H))
    traces: Dict[Tuple[int, int], List[Term]] = {}
    for j, atk in ((1, attacks1), (2, attacks2)):
        filled = fill_holes(program, list(atk))
        for i, v in ((1, v1), (2, v2)):
            e = substitute(filled, x, v)
            if full_runs:
                t, outcome = run(e, fuel)
                if not isinstance(outcome, Value):
                    raise CheckError(f"run ({i},{j}) did not finish: {outcome}")
                traces[i, j] = t.elements
            else:
                out = step(e)
                if isinstance(out, Stuck):
                    raise CheckError(f"run ({i},{j}) is stuck: {out.reason}")
                traces[i, j] = [e, out.term] if isinstance(out, Stepped) else [e]
    eq1 = trace_equiv(traces[1, 1], traces[2, 1], pi, observer, Dir.CONF)
    eq2 = trace_equiv(traces[1, 2], traces[2, 2], pi, observer, Dir.CONF)
    return RDVerdict(eq1 == eq2, eq1, eq2)
