import pytest
from hypothesis import given, strategies as st

from gen import finite_type, gen_land, gen_neutral, gen_type, strategy
from oracles import FALSE_E, TRUE_E, brute_entails, nat_element, sat
from refine_fpc import domain as D
from refine_fpc.domain import FragmentError, enumerate_fe, fe_of_land
from refine_fpc.formation import is_formula, mod_arg_type
from refine_fpc.logic import (
    ConsistencyDerivation, Refuted, check_consistency_derivation,
    check_derived_sequent_soundness, consistency, entail, entail_closed_neutral,
    entail_land, injection_clash, member, realto_instances, rule_instances, satisfies,
)
from refine_fpc.parser import parse_formula, prelude
from refine_fpc.syntax import F, And, Polarity, T

p = parse_formula


# ----------------------------------------------------------- membership --

def test_member_examples():
    assert member(TRUE_E, p("<true>"))
    assert not member(FALSE_E, p("<true>"))
    assert not member(D.BOT, p("<true>"))
    assert member(D.BOT, T)
    assert member(nat_element(2), p("mu^3 X. <zero> \\/ <succ> X"))
    assert not member(nat_element(3), p("mu^3 X. <zero> \\/ <succ> X"))
    assert member(D.BOT, p("nu^2 X. <zero> \\/ <succ> X")) is False


def test_member_at_functions():
    neg = D.stepjoin([(TRUE_E, FALSE_E), (FALSE_E, TRUE_E)])
    assert member(neg, p("<true> ~> <false>"))
    assert not member(neg, p("<true> ~> <true>"))
    assert member(neg, p("(<true> \\/ <false>) ~> (<true> \\/ <false>)"))


def test_satisfies_requires_a_quantifier_bound():
    tot = prelude().formula("tot")
    assert satisfies(nat_element(2), tot, qbound=4)
    assert not satisfies(nat_element(2), tot, qbound=2)


# ----------------------------------------------------------- entailment --

def test_entail_land_examples():
    assert entail_land(p("<pi1> <()> /\\ <pi2> <()>"), p("<pi1> <()>"))
    assert not entail_land(p("<pi1> <()>"), p("<pi1> <()> /\\ <pi2> <()>"))
    assert entail_land(injection_clash(), F)
    assert not entail_land(T, F)


def test_entail_closed_neutral_examples():
    assert entail(p("<true>"), p("<true> \\/ <false>"))
    assert not entail(p("<inj1> T \\/ <inj2> T"), p("<true>"))
    assert entail(p("<zero> \\/ <1>"), p("mu^2 X. <zero> \\/ <succ> X"))
    assert not entail_closed_neutral(p("mu^3 X. <zero> \\/ <succ> X"), p("mu^2 X. <zero> \\/ <succ> X"))
    # an arrow formula with a disjunctive consequent
    assert entail(p("<true> ~> <true>"), p("<true> ~> (<true> \\/ <false>)"))


def test_entail_rejects_quantified_formulae():
    with pytest.raises(FragmentError):
        entail(prelude().formula("tot"), T)


# ---------------------------------------------------------- consistency --

def test_consistency_derivation_with_false_branch():
    f = p("(<inj1> T ~> <true>) /\\ (<inj2> T ~> <false>)")
    d = consistency(f)
    assert isinstance(d, ConsistencyDerivation) and d.rule == "C-arrow"
    assert d.branches[(0, 1)] == "false"
    assert d.branches[(0,)].conclusion == p("<true>")
    assert check_consistency_derivation(d)
    assert "J={1,2}: premises entail F" in d.to_text()
    assert d.to_json()["rule"] == "C-arrow"


def test_consistency_refutes_clashing_functions():
    r = consistency(p("(T ~> <true>) /\\ (T ~> <false>)"))
    assert isinstance(r, Refuted)
    assert fe_of_land(r.core) is None
    assert "inconsistent" in r.to_text()


def test_consistency_minimal_core():
    r = consistency(p("<pi1> <()> /\\ <pi2> <inj1> T /\\ <pi2> <inj2> T"))
    assert isinstance(r, Refuted)
    assert r.core == p("<pi2> <inj1> T /\\ <pi2> <inj2> T")


def test_tampered_derivation_is_rejected():
    d = consistency(p("<fold> <inj1> <()>"))
    assert check_consistency_derivation(d)
    d.premises[0].conclusion = p("<inj2> <()>")
    assert not check_consistency_derivation(d)


# --------------------------------------------------- sequent soundness --

def _atoms(c, t, k=3):
    out = []
    while len(out) < k:
        f = gen_neutral(c, t, 5)
        if is_formula(f, t, Polarity.NEUTRAL):
            out.append(f)
    return out


def _rule_case(c):
    t = gen_type(c, 3)
    m = c.pick([m for m in ("pi1", "pi2", "inj1", "inj2", "fold") if mod_arg_type(m, t) is not None]
               or [None])
    if m is None:
        return rule_instances(t, _atoms(c, t))
    bt = mod_arg_type(m, t)
    return rule_instances(t, _atoms(c, t)) + rule_instances(bt, _atoms(c, bt), (m, t))


@given(strategy(_rule_case))
def test_axiom_instances_are_sound(instances):
    assert check_derived_sequent_soundness(instances) == []
    for inst in instances:
        elems = enumerate_fe(inst.type, 3)
        assert brute_entails(inst.left, inst.right, inst.type, elems), inst.rule


def _realto_case(c):
    a, b = finite_type(c, 1), gen_type(c, 2, False)
    lefts = [gen_land(c, a, 3), *_atoms(c, a, 1)]
    return realto_instances(a, b, lefts, _atoms(c, b, 2))


@given(strategy(_realto_case))
def test_realizability_instances_are_sound(instances):
    for inst in instances:
        elems = enumerate_fe(inst.type, 5)
        assert brute_entails(inst.left, inst.right, inst.type, elems), inst.rule


# ---------------------------------------------------------- properties --

def typed(fn, *a):
    return strategy(gen_type, 3).flatmap(lambda t: st.tuples(st.just(t), strategy(fn, t, *a)))


@given(typed(gen_neutral, 6))
def test_membership_is_monotone(tf):
    t, f = tf
    if not is_formula(f, t, Polarity.NEUTRAL):
        return
    els = enumerate_fe(t, 4)
    ins = [x for x in els if member(x, f)]
    for x in ins:
        for y in els:
            if D.leq(x, y):
                assert member(y, f)


@given(typed(gen_neutral, 6))
def test_member_agrees_with_structural_routes(tf):
    t, f = tf
    if not is_formula(f, t, Polarity.NEUTRAL):
        return
    for x in enumerate_fe(t, 4):
        m = member(x, f)
        assert m == satisfies(x, f) == sat(x, f, t)


@given(strategy(gen_type, 3).flatmap(lambda t: st.tuples(
    st.just(t), strategy(gen_neutral, t, 5), strategy(gen_neutral, t, 5), strategy(gen_neutral, t, 5))))
def test_entailment_is_a_preorder(tabc):
    t, a, b, c = tabc
    if not all(is_formula(f, t, Polarity.NEUTRAL) for f in (a, b, c)):
        return
    assert entail(a, a)
    assert entail(F, a) and entail(a, T)
    if entail(a, b) and entail(b, c):
        assert entail(a, c)
    assert entail(And(a, b), a)
