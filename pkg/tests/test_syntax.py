import pytest

from flac.eval import run
from flac.fuzz import well_typed_terms
from flac.principals import ConfProj, IntegProj, Name, voice
from flac.syntax import (
    EXTENDED,
    HOLES,
    SOURCE,
    ParseError,
    parse_context,
    parse_gamma,
    parse_principal,
    parse_program,
    parse_term,
    parse_type,
    pretty,
    pretty_type,
)
from flac.syntax.terms import (
    App,
    Bind,
    Case,
    FunT,
    Lam,
    SaysT,
    UnitM,
    UnitT,
    Var,
    canonical_term,
    free_vars,
    substitute,
)

a = Name("a")


def test_lambda_with_pc():
    e = parse_term(r"\x: unit [a<-]. x")
    assert e == Lam("x", UnitT(), IntegProj(a), Var("x"))


def test_application_is_left_associative():
    e = parse_term("f x y")
    assert e == App(App(Var("f"), Var("x")), Var("y"))


def test_function_type_with_pc():
    t = parse_type("unit [a]-> a says unit")
    assert t == FunT(UnitT(), a, SaysT(a, UnitT()))


def test_bind_and_eta():
    e = parse_term("bind y = x in eta[a->] y")
    assert e == Bind("y", Var("x"), UnitM(ConfProj(a), Var("y")))


def test_case_binds_in_each_branch():
    e = parse_term("case x of u. u | w. unit")
    assert isinstance(e, Case)
    assert free_vars(e) == {"x"}


@pytest.mark.parametrize("text", ["x where <a |> b>", "sealed[a] unit", "ctx[a] unit", "{unit | unit}"])
def test_intermediate_forms_are_rejected_in_source(text):
    with pytest.raises(ParseError):
        parse_term(text, SOURCE)
    parse_term(text, EXTENDED)


def test_holes_need_hole_mode():
    with pytest.raises(ParseError):
        parse_term("hole[unit]", SOURCE)
    parse_term("hole[unit]", HOLES)


def test_voice_and_view_sugar():
    assert parse_principal("voice(a->)") == voice(ConfProj(a))


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as info:
        parse_term("\\x: unit [a]. ")
    assert info.value.line == 1


def test_program_headers():
    prog = parse_program("-- note\ncontext: [a |> b]\npc: a<-\ngamma: [x : unit]\nx")
    assert prog.pc == IntegProj(a)
    assert len(prog.context.delegations) == 1
    assert prog.gamma == [("x", UnitT())]
    assert prog.term == Var("x")


def test_empty_program_is_a_parse_error():
    with pytest.raises(ParseError):
        parse_program("")


def test_context_and_gamma_lists():
    assert len(parse_context("[a<- |> b<-, a-> |> b->]").delegations) == 2
    assert parse_gamma("x : unit, y : a says unit")[1][0] == "y"


def test_substitution_avoids_capture():
    e = parse_term(r"\y: unit [a]. x")
    out = substitute(e, "x", Var("y"))
    assert "y" in free_vars(out)


def test_canonical_renaming_ignores_binder_names():
    assert canonical_term(parse_term(r"\x: unit [a]. x")) == canonical_term(parse_term(r"\z: unit [a]. z"))
    assert canonical_term(parse_term(r"\x: unit [a]. x")) != canonical_term(parse_term(r"\x: unit [b]. x"))


def test_print_parse_round_trip_on_generated_runs():
    for g in well_typed_terms(41, 150, depth=5):
        trace, _ = run(g.term)
        for e in trace.elements:
            assert parse_term(pretty(e), EXTENDED) == e
        assert parse_type(pretty_type(g.type)) == g.type
