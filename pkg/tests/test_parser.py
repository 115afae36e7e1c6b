import pytest
from hypothesis import given

from gen import NAT, gen_any_type, gen_land, gen_neutral, gen_signed, gen_term, gen_type, strategy
from refine_fpc.parser import (
    ParseError, parse, parse_formula, parse_refinement, parse_term, parse_type,
    prelude, print_ast, print_formula, print_refinement, print_term, print_type,
)
from refine_fpc.syntax import (
    UNIT, And, App, ArrowR, Exists, FinMu, Fix, FixVar, Fold, IVar, Inj, Mod,
    ModUnit, Or, Pair, Polarity, Prod, RealTo, Rec, Refine, Sum, T, TyVar,
    UNIT_I, Var, alpha_eq_formula, alpha_eq_term, alpha_eq_type, mods,
)

EMPTY = parse("", with_prelude=False)


# ------------------------------------------------------------ examples --

def test_parse_nat_type():
    assert parse_type("mu t. Unit + t") == Rec("t", Sum(UNIT, TyVar("t")))


def test_parse_omega():
    assert parse_term("fix x. x") == Fix("x", Var("x"))


def test_parse_tot():
    f = parse_formula("exists i. mu^i X. (<fold><inj1><()> \\/ <fold><inj2> X)")
    assert f == Exists("i", FinMu(IVar("i"), "X", Or(
        mods("fold inj1", ModUnit()), mods("fold inj2", FixVar("X")))))
    assert alpha_eq_formula(f, prelude().formula("tot"))


def test_print_examples():
    assert print_type(parse_type("Unit * Unit")) == "Unit * Unit"
    assert print_term(prelude().term("omega_bool").body) == "fix x. x"
    assert print_formula(And(Mod("pi1", T), Mod("pi2", T))) == "<pi1> T /\\ <pi2> T"


def test_numerals_and_composite_modalities():
    assert parse_formula("<2>") == mods("fold inj2 fold inj2 fold inj1", ModUnit())
    assert parse_formula("<succ> <zero>") == parse_formula("<1>")
    assert parse_formula("<hd> T") == mods("fold pi1", T)
    assert parse_formula("<ge 2> T") == mods("fold inj2 fold inj2", T)
    assert parse_formula("mu^3 X. X") == FinMu(parse_formula("mu^3 X. X").bound, "X", FixVar("X"))
    from refine_fpc.syntax import ivar_value
    assert ivar_value(parse_formula("mu^3 X. X").bound, {}) == 3


# ----------------------------------------------------------- precedence --

@pytest.mark.parametrize("text, expected", [
    ("<()> /\\ T \\/ F", Or(And(ModUnit(), T), parse_formula("F"))),
    ("T \\/ <()> /\\ F", Or(T, And(ModUnit(), parse_formula("F")))),
    ("T \\/ F ~> <()>", RealTo(Or(T, parse_formula("F")), ModUnit())),
    ("T ~> F ~> <()>", RealTo(T, RealTo(parse_formula("F"), ModUnit()))),
    ("<pi1> T /\\ <pi2> T", And(Mod("pi1", T), Mod("pi2", T))),
    ("<pi1> (T /\\ F)", Mod("pi1", And(T, parse_formula("F")))),
    ("T /\\ F /\\ <()>", And(And(T, parse_formula("F")), ModUnit())),
])
def test_formula_precedence(text, expected):
    assert parse_formula(text, EMPTY) == expected


@pytest.mark.parametrize("text, expected", [
    ("Unit + Unit * Unit", Sum(UNIT, Prod(UNIT, UNIT))),
    ("Unit * Unit * Unit", Prod(UNIT, Prod(UNIT, UNIT))),
    ("Unit -> Unit -> Unit", parse_type("Unit -> (Unit -> Unit)")),
])
def test_type_precedence(text, expected):
    assert parse_type(text, EMPTY) == expected


def test_term_precedence():
    assert parse_term("f x y", EMPTY, env=("f", "x", "y")) == App(App(Var("f"), Var("x")), Var("y"))
    assert parse_term("fold inj1 <>", EMPTY) == Fold(Inj(1, UNIT_I))
    assert parse_term("x :: y :: z", EMPTY, env=("x", "y", "z")) == \
        Fold(Pair(Var("x"), Fold(Pair(Var("y"), Var("z")))))


def test_refinement_types():
    r = parse_refinement("{ Bool | <true> } -> { Bool | <true> }")
    assert isinstance(r, ArrowR) and isinstance(r.dom, Refine)
    assert print_refinement(r) == "{ Unit + Unit | <inj1><()> } -> { Unit + Unit | <inj1><()> }"


# --------------------------------------------------------------- errors --

def test_syntax_error_has_span():
    with pytest.raises(ParseError) as e:
        parse("type A = Unit;;\nterm x : A = (<> ;;", with_prelude=False)
    assert e.value.line == 2 and e.value.col is not None
    assert str(e.value).startswith("2:")


def test_unknown_reference():
    with pytest.raises(ParseError, match="unknown"):
        parse_formula("<pi1> nonesuch")
    with pytest.raises(ParseError, match="unknown"):
        parse_term("nonesuch")


def test_duplicate_declaration():
    with pytest.raises(ParseError):
        parse("term a : Unit = <>;;\nterm a : Unit = <>;;", with_prelude=False)


def test_ill_typed_declaration_is_rejected():
    with pytest.raises(ParseError):
        parse("term a : Unit = inj1 <>;;", with_prelude=False)
    with pytest.raises(ParseError):
        parse("formula bad : + Unit = <inj1> T;;", with_prelude=False)


def test_prelude_and_corpus_names():
    pre = prelude()
    for name in ("cntaux", "cnt", "extract", "over", "bftaux", "bft", "zero", "succ", "inf"):
        assert name in pre.terms
    assert alpha_eq_type(pre.types["Nat"].type, NAT)


def test_source_file_judgements():
    from pathlib import Path
    from refine_fpc.parser import load
    src = load(Path(__file__).resolve().parent.parent / "corpus" / "corpus.fpc")
    assert "cnt_bft_spec_n1" in src.judgements
    j = src.judgements["zero_total"]
    assert print_ast(j) == ("|- zero : { mu t. Unit + t | exists i. mu^i X. "
                            "<fold><inj1><()> \\/ <fold><inj2> X }")


# ----------------------------------------------------------- round trips --

@given(strategy(gen_any_type, 4))
def test_type_round_trip(t):
    assert alpha_eq_type(parse_type(print_type(t), EMPTY), t)


@given(strategy(gen_term, 8))
def test_term_round_trip(m):
    text = print_term(m)
    back = parse_term(text, EMPTY, env=("x", "y"))
    assert alpha_eq_term(back, m), text
    assert print_term(back) == text


def closed_formula(c):
    t = gen_type(c, 3)
    k = c.int(0, 3)
    if k == 0:
        return gen_land(c, t, 6)
    if k == 1:
        return gen_neutral(c, t, 7)
    return gen_signed(c, t, Polarity.POS if k == 2 else Polarity.NEG, 7) or T


@given(strategy(closed_formula))
def test_formula_round_trip(f):
    text = print_formula(f)
    back = parse_formula(text, EMPTY)
    assert alpha_eq_formula(back, f), text
    assert print_formula(back) == text
