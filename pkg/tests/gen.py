"""Random generators for types, terms and formulae.

Every generator takes a chooser with ``int(lo, hi)`` and ``pick(seq)``, so
the same code drives seeded ``random.Random`` runs (acceptance) and
hypothesis strategies (property tests).
"""
from __future__ import annotations

import random

from hypothesis import strategies as st

from refine_fpc.formation import is_formula, mod_arg_type
from refine_fpc.syntax import (
    UNIT, And, App, Arrow, Case, Exists, F, FinMu, FinNu, Fix, FixVar, Fold,
    Forall, IVar, Inj, Lam, Mod, ModUnit, Or, Pair, Polarity, Prod, Proj,
    RealTo, Rec, Sum, T, TyVar, UNIT_I, Unfold, Var, alpha_eq_type, numeral,
    type_depth,
)

BOOL = Sum(UNIT, UNIT)
NAT = Rec("t", Sum(UNIT, TyVar("t")))
STREAM_BOOL = Rec("s", Prod(BOOL, TyVar("s")))
BTREE = Rec("u", Sum(UNIT, Prod(TyVar("u"), TyVar("u"))))


class RandomChooser:
    def __init__(self, seed):
        self.rng = random.Random(seed)

    def int(self, lo, hi):
        return self.rng.randint(lo, hi)

    def pick(self, seq):
        return seq[self.rng.randrange(len(seq))]


class DrawChooser:
    def __init__(self, draw):
        self.draw = draw

    def int(self, lo, hi):
        return self.draw(st.integers(lo, hi))

    def pick(self, seq):
        return seq[self.draw(st.integers(0, len(seq) - 1))]


def strategy(fn, *args, **kw):
    """Hypothesis strategy running fn(chooser, *args)."""
    @st.composite
    def s(draw):
        return fn(DrawChooser(draw), *args, **kw)
    return s()


# ---------------------------------------------------------------- types --

def finite_type(c, depth=2):
    """Unit, sums and products only: every element is finite."""
    if depth <= 0 or c.int(0, 2) == 0:
        return c.pick([UNIT, BOOL])
    k = c.int(0, 1)
    a, b = finite_type(c, depth - 1), finite_type(c, depth - 1)
    return Prod(a, b) if k == 0 else Sum(a, b)


def gen_type(c, depth=4, arrows=True):
    """Closed type of constructor depth at most depth.

    Arrow domains are finite types, so oracles can quantify over all of
    them; arrows do not nest (enumeration at arrow types is expensive).
    """
    if depth <= 1:
        return c.pick([UNIT, BOOL]) if depth == 1 else UNIT
    k = c.int(0, 6 if arrows else 2)
    if k == 0:
        return c.pick([UNIT, BOOL])
    if k == 1:
        return Prod(gen_type(c, depth - 1, arrows), gen_type(c, depth - 1, arrows))
    if k == 2:
        return Sum(gen_type(c, depth - 1, arrows), gen_type(c, depth - 1, arrows))
    if k in (3, 4):
        return Arrow(finite_type(c, 1), gen_type(c, depth - 2, False))
    pool = [t for t in (NAT, STREAM_BOOL, BTREE) if type_depth(t) <= depth]
    return c.pick(pool) if pool else BOOL


def _mods_at(t):
    return [m for m in ("pi1", "pi2", "inj1", "inj2", "fold") if mod_arg_type(m, t) is not None]


# -------------------------------------------------- conjunctive formulae --

def _atom(c, t):
    """Smallest non-trivial formula at t where one exists, else T."""
    if c.int(0, 3) == 0:
        return T
    if isinstance(t, type(UNIT)):
        return ModUnit()
    if isinstance(t, Sum):
        return Mod(c.pick(["inj1", "inj2"]), T)
    if isinstance(t, Rec) and isinstance(t.body, Sum):
        return Mod("fold", Mod(c.pick(["inj1", "inj2"]), T))
    return T


def gen_land(c, t, budget=6, false_rate=12):
    """Closed conjunctive formula at t."""
    if budget <= 0:
        return _atom(c, t)
    opts = ["and"] + ["unit"] * isinstance(t, type(UNIT)) + ["mod"] * bool(_mods_at(t))
    if isinstance(t, Arrow):
        opts += ["arrow", "arrow"]
    if c.int(0, false_rate) == 0:
        return F
    match c.pick(opts):
        case "unit":
            return ModUnit()
        case "and":
            k = c.int(1, budget - 1) if budget > 1 else 0
            return And(gen_land(c, t, k, false_rate), gen_land(c, t, budget - 1 - k, false_rate))
        case "mod":
            m = c.pick(_mods_at(t))
            return Mod(m, gen_land(c, mod_arg_type(m, t), budget - 1, false_rate))
        case "arrow":
            k = c.int(0, budget - 1)
            return RealTo(gen_land(c, t.dom, k, false_rate),
                          gen_land(c, t.cod, budget - 1 - k, false_rate))


# ----------------------------------------------- closed neutral formulae --

def gen_neutral(c, t, budget=6, theta=None, fresh=None):
    """Closed neutral formula at t, with bounded iterations at numerals."""
    theta = theta or {}
    fresh = fresh if fresh is not None else [0]
    if budget <= 0:
        vs = [x for x, s in theta.items() if alpha_eq_type(s, t)]
        return FixVar(c.pick(vs)) if vs and c.int(0, 1) else c.pick([T, F])
    opts = ["T", "F", "and", "or", "or", "mu", "nu"]
    opts += ["unit"] * isinstance(t, type(UNIT)) + ["mod", "mod"] * bool(_mods_at(t))
    opts += ["var", "var"] * any(alpha_eq_type(s, t) for s in theta.values())
    opts += ["arrow", "arrow"] * isinstance(t, Arrow)
    match c.pick(opts):
        case "T":
            return T
        case "F":
            return F
        case "unit":
            return ModUnit()
        case "and" | "or" as op:
            k = c.int(0, budget - 1)
            a = gen_neutral(c, t, k, theta, fresh)
            b = gen_neutral(c, t, budget - 1 - k, theta, fresh)
            return And(a, b) if op == "and" else Or(a, b)
        case "mod":
            m = c.pick(_mods_at(t))
            return Mod(m, gen_neutral(c, mod_arg_type(m, t), budget - 1, theta, fresh))
        case "var":
            return FixVar(c.pick([x for x, s in theta.items() if alpha_eq_type(s, t)]))
        case "mu" | "nu" as op:
            fresh[0] += 1
            x = f"X{fresh[0]}"
            body = gen_neutral(c, t, budget - 1, {**theta, x: t}, fresh)
            n = numeral(c.int(0, 3))
            return FinMu(n, x, body) if op == "mu" else FinNu(n, x, body)
        case "arrow":
            k = c.int(0, min(3, budget - 1))
            return RealTo(gen_neutral(c, t.dom, k, {}, fresh),
                          gen_neutral(c, t.cod, budget - 1 - k, {}, fresh))


# ---------------------------------------------------- quantified formulae --

def _signed(c, t, budget, sign, theta, ivars, fresh):
    if budget <= 0:
        vs = [x for x, s in theta.items() if alpha_eq_type(s, t)]
        return FixVar(c.pick(vs)) if vs and c.int(0, 1) else c.pick([T, F])
    opts = ["T", "and", "or", "mu", "nu", "mu", "nu"]
    opts += ["unit"] * isinstance(t, type(UNIT)) + ["mod", "mod"] * bool(_mods_at(t))
    opts += ["var"] * any(alpha_eq_type(s, t) for s in theta.values())
    opts += ["arrow"] * isinstance(t, Arrow)
    opts += ["quant", "quant"] * (sign is not Polarity.NEUTRAL)
    match c.pick(opts):
        case "T":
            return T
        case "unit":
            return ModUnit()
        case "and" | "or" as op:
            k = c.int(0, budget - 1)
            a = _signed(c, t, k, sign, theta, ivars, fresh)
            b = _signed(c, t, budget - 1 - k, sign, theta, ivars, fresh)
            return And(a, b) if op == "and" else Or(a, b)
        case "mod":
            m = c.pick(_mods_at(t))
            return Mod(m, _signed(c, mod_arg_type(m, t), budget - 1, sign, theta, ivars, fresh))
        case "var":
            return FixVar(c.pick([x for x, s in theta.items() if alpha_eq_type(s, t)]))
        case "mu" | "nu" as op:
            fresh[0] += 1
            x = f"X{fresh[0]}"
            if ivars and c.int(0, 2):
                it = numeral(c.int(0, 1), IVar(c.pick(ivars)))
            else:
                it = numeral(c.int(0, 2))
            body = _signed(c, t, budget - 1, sign, {**theta, x: t}, ivars, fresh)
            return FinMu(it, x, body) if op == "mu" else FinNu(it, x, body)
        case "quant":
            fresh[0] += 1
            i = f"i{fresh[0]}"
            body = _signed(c, t, budget - 1, sign, theta, ivars + [i], fresh)
            return Exists(i, body) if sign is Polarity.POS else Forall(i, body)
        case "arrow":
            k = c.int(0, min(3, budget - 1))
            return RealTo(_signed(c, t.dom, k, sign.flip(), {}, ivars, fresh),
                          _signed(c, t.cod, budget - 1 - k, sign, {}, ivars, fresh))


def has_quantifier(f) -> bool:
    match f:
        case Exists() | Forall():
            return True
        case And(a, b) | Or(a, b) | RealTo(a, b):
            return has_quantifier(a) or has_quantifier(b)
        case Mod(_, b) | FinMu(_, _, b) | FinNu(_, _, b):
            return has_quantifier(b)
    return False


def gen_signed(c, t, sign, budget=6, tries=50):
    """Closed formula of the given sign containing a quantifier, or None."""
    for _ in range(tries):
        f = _signed(c, t, budget, sign, {}, [], [0])
        if has_quantifier(f) and is_formula(f, t, sign):
            return f
    return None


# ---------------------------------------------------------------- terms --

def gen_term(c, budget=6, env=("x", "y")):
    """Untyped random term (for syntax round trips)."""
    if budget <= 0:
        return c.pick([UNIT_I, *[Var(v) for v in env]]) if env else UNIT_I
    k = c.int(0, 11)
    b1 = c.int(0, budget - 1)
    b2 = budget - 1 - b1
    match k:
        case 0:
            return UNIT_I
        case 1:
            return Var(c.pick(env)) if env else UNIT_I
        case 2:
            v = c.pick(["x", "y", "z", "f"])
            return Lam(v, gen_term(c, budget - 1, (*env, v)))
        case 3:
            return App(gen_term(c, b1, env), gen_term(c, b2, env))
        case 4:
            return Pair(gen_term(c, b1, env), gen_term(c, b2, env))
        case 5:
            return Proj(c.int(1, 2), gen_term(c, budget - 1, env))
        case 6:
            v = c.pick(["g", "h"])
            return Fix(v, gen_term(c, budget - 1, (*env, v)))
        case 7:
            return Fold(gen_term(c, budget - 1, env))
        case 8:
            return Unfold(gen_term(c, budget - 1, env))
        case 9:
            return Inj(c.int(1, 2), gen_term(c, budget - 1, env))
        case 10:
            s = gen_term(c, b1, env)
            n1 = gen_term(c, b2 // 2, (*env, "a"))
            n2 = gen_term(c, b2 - b2 // 2, (*env, "b"))
            return Case(s, "a", n1, "b", n2)
        case _:
            return Var(c.pick(env)) if env else UNIT_I


def gen_any_type(c, depth=4, tvs=()):
    """Random type, possibly with bound type variables (for round trips)."""
    if depth <= 0:
        return c.pick([UNIT, *[TyVar(v) for v in tvs]])
    k = c.int(0, 5)
    match k:
        case 0:
            return c.pick([UNIT, *[TyVar(v) for v in tvs]])
        case 1:
            return Prod(gen_any_type(c, depth - 1, tvs), gen_any_type(c, depth - 1, tvs))
        case 2:
            return Sum(gen_any_type(c, depth - 1, tvs), gen_any_type(c, depth - 1, tvs))
        case 3:
            return Arrow(gen_any_type(c, depth - 1, tvs), gen_any_type(c, depth - 1, tvs))
        case _:
            v = c.pick(["t", "s"])
            return Rec(v, gen_any_type(c, depth - 1, (*tvs, v)))
