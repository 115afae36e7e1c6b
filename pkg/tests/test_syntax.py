from hypothesis import given, strategies as st

from gen import BOOL, NAT, gen_any_type, gen_neutral, gen_term, gen_type, strategy
from refine_fpc.formation import is_formula
from refine_fpc.syntax import (
    UNIT, And, App, F, FinMu, FinNu, FixVar, IVar, Lam, Mod, ModUnit, Or,
    Polarity, RealTo, Rec, Succ, Sum, T, TyVar, Var, ZERO, alpha_eq_formula,
    alpha_eq_term, alpha_eq_type, free_fixvars, free_vars, fresh, is_closed_type,
    ivar_value, iterate, mods, numeral, subst_formula, subst_term, type_depth,
    unfold_rec,
)

ZERO_M = mods("fold inj1", ModUnit())


def succ_m(f):
    return mods("fold inj2", f)


# ------------------------------------------------------------ examples --

def test_subst_identity_case():
    assert subst_formula(FixVar("X"), "X", T) == T


def test_subst_builds_numeral_modalities():
    f = Mod("fold", Mod("inj2", FixVar("X")))
    assert subst_formula(f, "X", ZERO_M) == succ_m(ZERO_M)


def test_subst_leaves_other_variables():
    assert subst_formula(And(FixVar("X"), FixVar("Y")), "X", F) == And(F, FixVar("Y"))


def test_subst_avoids_capture_under_fixpoint_binder():
    f = FinMu(numeral(1), "Y", And(FixVar("X"), FixVar("Y")))
    out = subst_formula(f, "X", FixVar("Y"))
    assert isinstance(out, FinMu) and out.var != "Y"
    assert free_fixvars(out) == {"Y"}


def test_iterate_examples():
    body = Or(ZERO_M, succ_m(FixVar("X")))
    assert iterate("X", body, 0, F) == F
    assert iterate("X", body, 2, F) == Or(ZERO_M, succ_m(Or(ZERO_M, succ_m(F))))
    psi = Mod("pi1", T)
    assert iterate("X", And(psi, Mod("pi2", FixVar("X"))), 1, T) == And(psi, Mod("pi2", T))


def test_ivar_value_examples():
    assert ivar_value(Succ(Succ(ZERO)), {}) == 2
    assert ivar_value(IVar("i"), {"i": 3}) == 3
    assert ivar_value(Succ(IVar("i")), {"i": 0}) == 1


def test_ivar_value_unbound_is_an_error():
    import pytest
    with pytest.raises(KeyError):
        ivar_value(IVar("j"), {})


# --------------------------------------------------------- types, terms --

def test_rec_alpha_equivalence_and_unfolding():
    other = Rec("s", Sum(UNIT, TyVar("s")))
    assert alpha_eq_type(NAT, other)
    assert not alpha_eq_type(NAT, Rec("s", Sum(UNIT, UNIT)))
    assert alpha_eq_type(unfold_rec(NAT), Sum(UNIT, NAT))
    assert is_closed_type(NAT) and not is_closed_type(TyVar("a"))
    assert type_depth(BOOL) == 1 and type_depth(NAT) == 2


def test_term_substitution_avoids_capture():
    m = Lam("y", App(Var("x"), Var("y")))
    out = subst_term(m, "x", Var("y"))
    assert isinstance(out, Lam) and out.var != "y"
    assert free_vars(out) == {"y"}
    assert alpha_eq_term(Lam("a", Var("a")), Lam("b", Var("b")))


def test_fresh_avoids_names():
    n = fresh("x", {"x", "x1"})
    assert n not in {"x", "x1"}


# ----------------------------------------------------------- properties --

@given(strategy(gen_type, 3).flatmap(lambda t: st.tuples(st.just(t), strategy(gen_neutral, t, 6))))
def test_subst_by_own_variable_is_identity(tf):
    t, f = tf
    # open one fixpoint binder and close it again
    if isinstance(f, (FinMu, FinNu)):
        assert alpha_eq_formula(subst_formula(f.body, f.var, FixVar(f.var)), f.body)
    assert alpha_eq_formula(subst_formula(f, "Z", FixVar("Z")), f)


@given(strategy(gen_type, 3).flatmap(lambda t: st.tuples(st.just(t), strategy(gen_neutral, t, 5))),
       st.integers(0, 3))
def test_iterate_recurrence(tf, n):
    t, f = tf
    body = Or(f, FixVar("X")) if not isinstance(f, (FinMu, FinNu)) else f.body
    x = "X" if not isinstance(f, (FinMu, FinNu)) else f.var
    assert iterate(x, body, n + 1, T) == subst_formula(body, x, iterate(x, body, n, T))


def _realtos(f):
    match f:
        case RealTo(a, b):
            return [f, *_realtos(a), *_realtos(b)]
        case And(a, b) | Or(a, b):
            return _realtos(a) + _realtos(b)
        case Mod(_, b) | FinMu(_, _, b) | FinNu(_, _, b):
            return _realtos(b)
    return []


@given(strategy(gen_type, 3).flatmap(lambda t: st.tuples(st.just(t), strategy(gen_neutral, t, 7))))
def test_realto_has_no_free_fixpoint_variables(tf):
    t, f = tf
    if is_formula(f, t, Polarity.NEUTRAL):
        assert all(not free_fixvars(r) for r in _realtos(f))


@given(strategy(gen_term, 7))
def test_term_alpha_eq_is_reflexive_under_renaming(m):
    assert alpha_eq_term(m, m)
    if "x" in free_vars(m):
        assert alpha_eq_term(subst_term(m, "x", Var("x")), m)


@given(strategy(gen_any_type, 4))
def test_type_alpha_eq_reflexive(t):
    assert alpha_eq_type(t, t)
