import random

import pytest

from flac.delegations import EMPTY, DelegationContext
from flac.eval import evaluate
from flac.fuzz import TermGenerator, random_label, random_type, well_typed_terms
from flac.principals import TOP, ConfProj, Conj, Dir, IntegProj, Name
from flac.suites import CORPUS, program_pc, read_program
from flac.syntax import HOLES, parse_gamma, parse_term, parse_type
from flac.syntax.terms import SaysT, SumT, UnitT, substitute, type_equal
from flac.typecheck import (
    CheckerConfig,
    TypingContext,
    TypingError,
    project_type,
    protects,
    typecheck,
    well_typed,
)

p, q, l = Name("p"), Name("q"), Name("l")
PC_TRUSTED = IntegProj(TOP)


def check(text, gamma="", pc=PC_TRUSTED, pi=EMPTY, cfg=CheckerConfig()):
    return typecheck(pi, parse_gamma(gamma) if gamma else [], pc, parse_term(text, HOLES), cfg)


def error_code(text, gamma="", pc=PC_TRUSTED, pi=EMPTY):
    with pytest.raises(TypingError) as info:
        check(text, gamma, pc, pi)
    return info.value.code


def corpus(name):
    prog = read_program(CORPUS / name)
    return typecheck(prog.context, prog.gamma, program_pc(prog), prog.term)


# protection levels --------------------------------------------------------

def test_unit_is_protected_by_anything():
    assert protects(EMPTY, Name("x"), UnitT())


def test_integrity_label_does_not_protect_another():
    assert not protects(EMPTY, IntegProj(p), SaysT(IntegProj(q), UnitT()))
    # with p<- delegating to q<-, p<- flows to q<-
    pi = DelegationContext.of((IntegProj(p), IntegProj(q)))
    assert protects(pi, IntegProj(p), SaysT(IntegProj(q), UnitT()))
    assert not protects(pi, IntegProj(q), SaysT(IntegProj(p), UnitT()))


def test_sums_are_never_protected():
    assert not protects(EMPTY, ConfProj(p), SumT(UnitT(), UnitT()))


def test_type_projection():
    assert project_type(parse_type("l says unit"), Dir.CONF) == parse_type("l-> says unit")
    assert project_type(UnitT(), Dir.INTEG) == UnitT()


def test_projected_protection_agrees_with_full_protection():
    rng = random.Random(5)
    for _ in range(300):
        lab, t = random_label(rng), random_type(rng, 3)
        assert (protects(EMPTY, Conj(ConfProj(lab), PC_TRUSTED), t)
                == protects(EMPTY, ConfProj(lab), project_type(t, Dir.CONF)))
        # for integrity the other component is public, which is just lab<-
        assert (protects(EMPTY, IntegProj(lab), t)
                == protects(EMPTY, IntegProj(lab), project_type(t, Dir.INTEG)))


# rules ----------------------------------------------------------------------

def test_relabeling_without_delegation_is_rejected():
    # the body's eta fails before the bind's protection premise is reached
    assert error_code("bind x' = x in eta[q<-] x'", "x : p<- says unit", IntegProj(q)) == "UnitM.pc⊑ℓ"


def test_relabeling_with_assumed_delegation():
    t = check("assume <p<- |> q<-> in bind x' = x in eta[q<-] x'", "x : p<- says unit", IntegProj(q))
    assert type_equal(t, parse_type("q<- says unit"))


def test_declassifier_needs_alices_integrity():
    assert type_equal(corpus("declassify.flac"), parse_type("alice-> says unit [alice<-]-> bob-> says unit"))
    with pytest.raises(TypingError) as info:
        corpus("declassify_bob.flac")
    assert info.value.code == "Assume.pc≽∇(q)"


@pytest.mark.parametrize("name, signature", [
    ("lib/commit.flac", "forall N [p<-]. forall X [p<-]. N [p<-]-> p-> says X [p<-]-> p says (N * X)"),
    ("lib/reveal.flac",
     "forall N [voice(p->)]. forall X [q<-]. p says (N * X) [q<-]-> q-> /\\ p<- says (N * X)"),
    ("lib/open.flac",
     "forall N [q<-]. forall X [q<-]. (forall Y [q<-]. p says (N * Y) [q<-]-> q-> /\\ p<- says (N * Y)) [q<-]"
     "-> p says (N * X) [q<-]-> q<- says q-> /\\ p<- says (N * X)"),
])
def test_commitment_operations_have_their_signatures(name, signature):
    assert type_equal(corpus(name), parse_type(signature))


def test_wrapper_assuming_ps_authority_is_rejected():
    with pytest.raises(TypingError) as info:
        corpus("reveal_wrapper.flac")
    assert info.value.code == "Assume.pc≽∇(q)"
    assert info.value.span is not None


def test_says_lifting_terms():
    assert type_equal(corpus("says_map.flac"), parse_type("(unit [l]-> unit) [l]-> l says unit [l]-> l says unit"))
    assert type_equal(corpus("says_apply.flac"),
                      parse_type("l says (unit [l]-> unit) [l]-> l says unit [l]-> l says unit"))


def test_says_does_not_commute():
    with pytest.raises(TypingError):
        corpus("says_commute.flac")


def test_handoff_as_published_fails_and_extension_types():
    with pytest.raises(TypingError) as info:
        corpus("handoff.flac")
    assert info.value.code == "Assume.∇(p→)≽∇(q→)"
    t = corpus("handoff_extended.flac")
    assert type_equal(t.result.result.result.result, parse_type("forall X [c]. a says X [c]-> b says X"))


def test_application_checks_pc_flow():
    assert error_code("(\\x: unit [q->]. x) unit", pc=ConfProj(p)) == "App.pc⊑pc'"


def test_case_result_must_be_protected():
    code = error_code("case x of u. inj1[unit + unit] unit | u. inj2[unit + unit] unit",
                      "x : unit + unit", pc=ConfProj(l))
    assert code == "Case.protects"


def test_unbound_type_variable_in_annotation():
    assert error_code("\\x: X [l]. x") == "Lam.well-formed"


def test_shadowing_takes_the_innermost_binding():
    ctx = TypingContext.of(parse_gamma("x : unit, x : l says unit"))
    assert ctx.lookup("x") == parse_type("l says unit")


def test_brackets_and_holes_need_a_harness():
    assert error_code("hole[unit]") == "Hole.harness"
    cfg = CheckerConfig(harness=(Name("h"), Dir.CONF))
    assert type_equal(check("hole[unit]", pc=IntegProj(Name("h")), cfg=cfg), UnitT())


def test_bracket_of_values_needs_protected_type():
    cfg = CheckerConfig(harness=(p, Dir.CONF))
    t = typecheck(EMPTY, [], PC_TRUSTED, parse_term("{sealed[p] unit | sealed[p] unit}", "extended"), cfg)
    assert type_equal(t, parse_type("p says unit"))
    sums = parse_term("{inj1[unit + unit] unit | inj2[unit + unit] unit}", "extended")
    with pytest.raises(TypingError) as info:
        typecheck(EMPTY, [], PC_TRUSTED, sums, cfg)
    assert info.value.code == "Bracket-Values.protects"


def test_substitution_preserves_types():
    rng = random.Random(9)
    checked = 0
    for _ in range(400):
        gen = TermGenerator(rng)
        s, t = random_type(rng, 2), random_type(rng, 2)
        e = gen.term([("z", s)], t, PC_TRUSTED, 4)
        if not well_typed(EMPTY, [("z", s)], PC_TRUSTED, e):
            continue
        w = evaluate(gen.value(s))
        if not well_typed(EMPTY, [], PC_TRUSTED, w):
            continue
        assert type_equal(typecheck(EMPTY, [], PC_TRUSTED, substitute(e, "z", w)),
                          typecheck(EMPTY, [("z", s)], PC_TRUSTED, e))
        checked += 1
    assert checked > 100


def test_generated_terms_are_closed_and_well_typed():
    for g in well_typed_terms(3, 50):
        assert type_equal(typecheck(EMPTY, [], g.pc, g.term), g.type)
