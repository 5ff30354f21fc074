import itertools
import random

import pytest

from flac.delegations import (
    EMPTY,
    CandidateSpaceExceeded,
    Delegation,
    DelegationContext,
    minimal_factorization,
    robust_acts_for,
    robust_equivalent,
    robust_flows_to,
    subtract,
    usable_delegations,
)
from flac.fuzz import random_principal
from flac.principals import BOT, ConfProj, Conj, IntegProj, Name, equivalent, static_acts_for, voice

from oracles import RuleClosure, all_normal_forms, enumerated_gap

p, q = Name("p"), Name("q")
a, b = Name("a"), Name("b")
alice, bob = Name("Alice"), Name("Bob")


def ctx(*pairs):
    return DelegationContext.of(*pairs)


def test_integrity_delegation_enables_integrity_flow():
    pi = ctx((IntegProj(p), IntegProj(q)))
    assert robust_acts_for(pi, IntegProj(p), IntegProj(q))


def test_integrity_delegation_gives_no_confidentiality_flow():
    pi = ctx((IntegProj(p), IntegProj(q)))
    assert not robust_flows_to(pi, ConfProj(p), ConfProj(q))


def test_declassification_to_public_is_unusable():
    pi = ctx((ConfProj(BOT), ConfProj(alice)))
    assert usable_delegations(pi) == ()
    assert not robust_acts_for(pi, ConfProj(BOT), ConfProj(alice))


def test_declassify_context_relabels_confidentiality():
    pi = ctx((IntegProj(bob), IntegProj(alice)), (ConfProj(bob), ConfProj(alice)))
    assert robust_flows_to(pi, ConfProj(alice), ConfProj(bob))
    # the full principals do not flow: Alice's integrity is not raised to Bob's
    assert not robust_flows_to(pi, alice, bob)


def test_reflexive_flow():
    assert robust_flows_to(EMPTY, p, p)


def test_context_keeps_order_and_drops_duplicates():
    d1 = Delegation(p, q)
    d2 = Delegation(q, p)
    pi = DelegationContext((d1, d2, d1))
    assert pi.delegations == (d1, d2)


def test_usability_is_a_least_fixpoint():
    # the confidentiality delegation only becomes usable once the voice
    # delegation is in place
    voice_first = ctx((ConfProj(bob), ConfProj(alice)), (IntegProj(bob), IntegProj(alice)))
    assert len(usable_delegations(voice_first)) == 2
    alone = ctx((ConfProj(bob), ConfProj(alice)))
    assert usable_delegations(alone) == ()


def test_empty_context_agrees_with_static_order():
    rng = random.Random(7)
    for _ in range(500):
        x = random_principal(rng)
        y = random_principal(rng)
        assert robust_acts_for(EMPTY, x, y) == static_acts_for(x, y)


TWO = ["a", "b"]
UNIVERSE = all_normal_forms(TWO)
SOME_DELEGATIONS = [
    (IntegProj(a), IntegProj(b)),
    (ConfProj(a), ConfProj(b)),
    (a, b),
    (ConfProj(BOT), ConfProj(a)),
    (IntegProj(BOT), IntegProj(b)),
    (Conj(ConfProj(a), IntegProj(b)), Conj(ConfProj(b), IntegProj(a))),
]


@pytest.mark.parametrize("dels", [[d] for d in SOME_DELEGATIONS] + [
    [SOME_DELEGATIONS[1], SOME_DELEGATIONS[0]],
    [SOME_DELEGATIONS[3], SOME_DELEGATIONS[4]],
    [(IntegProj(BOT), IntegProj(a)), (ConfProj(BOT), ConfProj(a))],
])
def test_matches_rule_closure_on_two_names(dels):
    oracle = RuleClosure(TWO, dels)
    pi = ctx(*dels)
    for x, y in itertools.product(UNIVERSE, UNIVERSE):
        assert robust_acts_for(pi, x, y) == oracle.acts_for(x, y), (x, y)


def test_adding_usable_delegations_is_monotone():
    rng = random.Random(3)
    for _ in range(200):
        d1 = (random_principal(rng, TWO, 2), random_principal(rng, TWO, 2))
        d2 = (random_principal(rng, TWO, 2), random_principal(rng, TWO, 2))
        small, big = ctx(d1), ctx(d1, d2)
        x, y = random_principal(rng, TWO, 3), random_principal(rng, TWO, 3)
        if robust_acts_for(small, x, y):
            assert robust_acts_for(big, x, y)


def test_gap_examples():
    assert equivalent(subtract(EMPTY, p, p), BOT)
    assert equivalent(subtract(EMPTY, Conj(a, b), a), b)
    f = minimal_factorization(EMPTY, a, Conj(a, b))
    assert equivalent(f.gap, b)


def test_gap_is_bottom_exactly_when_acts_for():
    rng = random.Random(11)
    for _ in range(300):
        x, y = random_principal(rng, TWO, 3), random_principal(rng, TWO, 3)
        gap = subtract(EMPTY, y, x)
        assert equivalent(gap, BOT) == static_acts_for(x, y)


@pytest.mark.parametrize("dels", [[], [SOME_DELEGATIONS[0]], [SOME_DELEGATIONS[2]]])
def test_gap_matches_enumeration(dels):
    pi = ctx(*dels)
    acts = lambda x, y: robust_acts_for(pi, x, y)
    rng = random.Random(5)
    for _ in range(40):
        x, y = rng.choice(UNIVERSE), rng.choice(UNIVERSE)
        expected, candidates = enumerated_gap(acts, x, y, TWO)
        f = minimal_factorization(pi, x, y)
        assert robust_equivalent(pi, f.gap, expected)
        # the factorization holds and is minimal against every candidate
        assert robust_equivalent(pi, y, Conj(f.base, f.gap))
        assert robust_acts_for(pi, x, f.base)
        for r in candidates:
            assert robust_acts_for(pi, r, f.gap)


def test_authority_gap_identity_on_random_triples():
    rng = random.Random(13)
    names = ["a", "b", "c"]
    for _ in range(200):
        pi = ctx(*[(random_principal(rng, names, 2), random_principal(rng, names, 2))
                   for _ in range(rng.randrange(3))])
        x, y = random_principal(rng, names, 3), random_principal(rng, names, 3)
        gap = subtract(pi, y, x)
        assert robust_acts_for(pi, x, gap) == robust_acts_for(pi, x, y)


def test_delegation_invariance_on_two_names():
    # adding <r >= t> at a pc that speaks for t either changes nothing or the
    # pc already speaks for what the delegation provided
    rng = random.Random(17)
    for _ in range(60):
        base = ctx(*[rng.choice(SOME_DELEGATIONS) for _ in range(rng.randrange(2))])
        r, t = rng.choice(UNIVERSE), rng.choice(UNIVERSE)
        pc = rng.choice(UNIVERSE)
        if not robust_acts_for(base, pc, voice(t)):
            continue
        bigger = base.extend(Delegation(r, t))
        for _ in range(30):
            x, y = rng.choice(UNIVERSE), rng.choice(UNIVERSE)
            if robust_acts_for(bigger, x, y):
                assert robust_acts_for(base, x, y) or robust_acts_for(base, pc, voice(subtract(base, y, x)))


def test_bound_is_enforced():
    wide = Conj(Name("n1"), Conj(Name("n2"), Name("n3")))
    with pytest.raises(CandidateSpaceExceeded):
        minimal_factorization(EMPTY, Name("n4"), wide, bound=6)
