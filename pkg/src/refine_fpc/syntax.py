"""Abstract syntax for pure types, terms, iteration terms, formulae and
refinement types, together with binding and substitution.

All nodes are frozen dataclasses. Structural equality is literal; use the
``alpha_eq_*`` helpers (or the ``*_key`` canonical forms) when bound names
should not matter.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Union


_counter = itertools.count()


def fresh(base: str, avoid=()) -> str:
    root = base.split("'")[0] or "v"
    while True:
        name = f"{root}'{next(_counter)}"
        if name not in avoid:
            return name


# ----------------------------------------------------------------- types --

@dataclass(frozen=True)
class UnitT:
    pass


@dataclass(frozen=True)
class Prod:
    left: "PureType"
    right: "PureType"


@dataclass(frozen=True)
class Arrow:
    dom: "PureType"
    cod: "PureType"


@dataclass(frozen=True)
class Sum:
    left: "PureType"
    right: "PureType"


@dataclass(frozen=True)
class TyVar:
    name: str


@dataclass(frozen=True)
class Rec:
    var: str
    body: "PureType"


PureType = Union[UnitT, Prod, Arrow, Sum, TyVar, Rec]
UNIT = UnitT()


def free_tyvars(t) -> frozenset:
    match t:
        case TyVar(n):
            return frozenset([n])
        case Rec(v, b):
            return free_tyvars(b) - {v}
        case Prod(a, b) | Arrow(a, b) | Sum(a, b):
            return free_tyvars(a) | free_tyvars(b)
        case _:
            return frozenset()


def is_closed_type(t) -> bool:
    return not free_tyvars(t)


def subst_type(t, name: str, s):
    """Capture-avoiding t[s/name]."""
    match t:
        case TyVar(n):
            return s if n == name else t
        case Rec(v, b):
            if v == name:
                return t
            fv = free_tyvars(s)
            if v in fv:
                v2 = fresh(v, fv | free_tyvars(b))
                b = subst_type(b, v, TyVar(v2))
                v = v2
            return Rec(v, subst_type(b, name, s))
        case Prod(a, b):
            return Prod(subst_type(a, name, s), subst_type(b, name, s))
        case Arrow(a, b):
            return Arrow(subst_type(a, name, s), subst_type(b, name, s))
        case Sum(a, b):
            return Sum(subst_type(a, name, s), subst_type(b, name, s))
        case _:
            return t


def unfold_rec(t: Rec):
    return subst_type(t.body, t.var, t)


def type_key(t, env=()):
    """De Bruijn canonical form; equal keys iff alpha-equivalent."""
    match t:
        case TyVar(n):
            return ("v", env.index(n)) if n in env else ("f", n)
        case Rec(v, b):
            return ("mu", type_key(b, (v,) + env))
        case Prod(a, b):
            return ("*", type_key(a, env), type_key(b, env))
        case Arrow(a, b):
            return ("->", type_key(a, env), type_key(b, env))
        case Sum(a, b):
            return ("+", type_key(a, env), type_key(b, env))
        case UnitT():
            return ("1",)
    # metavariables (formation) and anything else compare by identity
    return ("?", t)


def alpha_eq_type(a, b) -> bool:
    return type_key(a) == type_key(b)


def type_depth(t) -> int:
    match t:
        case Prod(a, b) | Arrow(a, b) | Sum(a, b):
            return 1 + max(type_depth(a), type_depth(b))
        case Rec(_, b):
            return 1 + type_depth(b)
        case _:
            return 0


# ----------------------------------------------------------------- terms --

@dataclass(frozen=True)
class UnitI:
    pass


@dataclass(frozen=True)
class Pair:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Proj:
    index: int
    body: "Term"


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Lam:
    var: str
    body: "Term"


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"


@dataclass(frozen=True)
class Fix:
    var: str
    body: "Term"


@dataclass(frozen=True)
class Fold:
    body: "Term"


@dataclass(frozen=True)
class Unfold:
    body: "Term"


@dataclass(frozen=True)
class Inj:
    index: int
    body: "Term"


@dataclass(frozen=True)
class Case:
    scrut: "Term"
    var1: str
    branch1: "Term"
    var2: str
    branch2: "Term"


@dataclass(frozen=True)
class FinConst:
    """Opaque constant denoting a finite element of ``type``."""
    elem: object
    type: PureType


@dataclass(frozen=True)
class Global:
    """Reference to a closed top-level declaration (printed by name)."""
    name: str
    body: "Term"
    type: PureType = None


Term = Union[UnitI, Pair, Proj, Var, Lam, App, Fix, Fold, Unfold, Inj, Case,
             FinConst, Global]
UNIT_I = UnitI()


def free_vars(m) -> frozenset:
    match m:
        case Var(x):
            return frozenset([x])
        case Lam(x, b) | Fix(x, b):
            return free_vars(b) - {x}
        case App(a, b) | Pair(a, b):
            return free_vars(a) | free_vars(b)
        case Proj(_, b) | Fold(b) | Unfold(b) | Inj(_, b):
            return free_vars(b)
        case Case(s, x1, n1, x2, n2):
            return free_vars(s) | (free_vars(n1) - {x1}) | (free_vars(n2) - {x2})
        case _:
            return frozenset()


def subst_term(m, x: str, n):
    """Capture-avoiding m[n/x]."""
    fv = free_vars(n)

    def binder(v, body):
        if v == x:
            return v, body, False
        if v in fv:
            v2 = fresh(v, fv | free_vars(body))
            body = subst_term(body, v, Var(v2))
            v = v2
        return v, body, True

    match m:
        case Var(y):
            return n if y == x else m
        case Lam(v, b):
            v, b, go = binder(v, b)
            return Lam(v, subst_term(b, x, n) if go else b)
        case Fix(v, b):
            v, b, go = binder(v, b)
            return Fix(v, subst_term(b, x, n) if go else b)
        case App(a, b):
            return App(subst_term(a, x, n), subst_term(b, x, n))
        case Pair(a, b):
            return Pair(subst_term(a, x, n), subst_term(b, x, n))
        case Proj(i, b):
            return Proj(i, subst_term(b, x, n))
        case Fold(b):
            return Fold(subst_term(b, x, n))
        case Unfold(b):
            return Unfold(subst_term(b, x, n))
        case Inj(i, b):
            return Inj(i, subst_term(b, x, n))
        case Case(s, x1, n1, x2, n2):
            x1, n1, go1 = binder(x1, n1)
            x2, n2, go2 = binder(x2, n2)
            return Case(subst_term(s, x, n),
                        x1, subst_term(n1, x, n) if go1 else n1,
                        x2, subst_term(n2, x, n) if go2 else n2)
        case _:
            return m


def term_key(m, env=()):
    match m:
        case Var(x):
            return ("v", env.index(x)) if x in env else ("f", x)
        case Lam(x, b):
            return ("lam", term_key(b, (x,) + env))
        case Fix(x, b):
            return ("fix", term_key(b, (x,) + env))
        case App(a, b):
            return ("app", term_key(a, env), term_key(b, env))
        case Pair(a, b):
            return ("pair", term_key(a, env), term_key(b, env))
        case Proj(i, b):
            return ("pi", i, term_key(b, env))
        case Fold(b):
            return ("fold", term_key(b, env))
        case Unfold(b):
            return ("unfold", term_key(b, env))
        case Inj(i, b):
            return ("inj", i, term_key(b, env))
        case Case(s, x1, n1, x2, n2):
            return ("case", term_key(s, env), term_key(n1, (x1,) + env),
                    term_key(n2, (x2,) + env))
        case FinConst(d, t):
            return ("fin", d, type_key(t))
        case Global(name, _, _):
            return ("g", name)
        case UnitI():
            return ("unit",)
    raise TypeError(f"not a term: {m!r}")


def alpha_eq_term(a, b) -> bool:
    return term_key(a) == term_key(b)


# -------------------------------------------------------- iteration terms --

@dataclass(frozen=True)
class IVar:
    name: str


@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class Succ:
    pred: "IterTerm"


IterTerm = Union[IVar, Zero, Succ]
ZERO = Zero()


def numeral(n: int, base=ZERO):
    t = base
    for _ in range(n):
        t = Succ(t)
    return t


def split_iter(t):
    """(ivar name or None, number of successors)."""
    k = 0
    while isinstance(t, Succ):
        t, k = t.pred, k + 1
    return (t.name if isinstance(t, IVar) else None), k


def iter_ivars(t) -> frozenset:
    v, _ = split_iter(t)
    return frozenset() if v is None else frozenset([v])


def ivar_value(t, nu) -> int:
    v, k = split_iter(t)
    if v is None:
        return k
    if v not in nu:
        raise KeyError(f"unbound iteration variable {v}")
    return nu[v] + k


def subst_iter(t, name: str, s):
    v, k = split_iter(t)
    if v == name:
        return numeral(k, s)
    return t


# -------------------------------------------------------------- formulae --

MODS = ("pi1", "pi2", "inj1", "inj2", "fold")


@dataclass(frozen=True)
class TrueF:
    pass


@dataclass(frozen=True)
class FalseF:
    pass


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class ModUnit:
    pass


@dataclass(frozen=True)
class Mod:
    mod: str
    body: "Formula"


@dataclass(frozen=True)
class FixVar:
    name: str


@dataclass(frozen=True)
class FinMu:
    bound: IterTerm
    var: str
    body: "Formula"


@dataclass(frozen=True)
class FinNu:
    bound: IterTerm
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    ivar: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    ivar: str
    body: "Formula"


@dataclass(frozen=True)
class RealTo:
    left: "Formula"
    right: "Formula"


Formula = Union[TrueF, FalseF, And, Or, ModUnit, Mod, FixVar, FinMu, FinNu,
                Exists, Forall, RealTo]
T = TrueF()
F = FalseF()
UNIT_MOD = ModUnit()


class Polarity(Enum):
    NEUTRAL = "+-"
    POS = "+"
    NEG = "-"

    def flip(self) -> "Polarity":
        return {Polarity.NEUTRAL: Polarity.NEUTRAL, Polarity.POS: Polarity.NEG,
                Polarity.NEG: Polarity.POS}[self]


def conj(fs):
    fs = list(fs)
    if not fs:
        return T
    out = fs[0]
    for f in fs[1:]:
        out = And(out, f)
    return out


def disj(fs):
    fs = list(fs)
    if not fs:
        return F
    out = fs[0]
    for f in fs[1:]:
        out = Or(out, f)
    return out


def conjuncts(f) -> list:
    if isinstance(f, And):
        return conjuncts(f.left) + conjuncts(f.right)
    return [f]


def disjuncts(f) -> list:
    if isinstance(f, Or):
        return disjuncts(f.left) + disjuncts(f.right)
    return [f]


def mods(path: str, body):
    """``mods("fold pi1", phi)`` is <fold><pi1>phi."""
    for m in reversed(path.split()):
        body = Mod(m, body)
    return body


def free_fixvars(f) -> frozenset:
    match f:
        case FixVar(x):
            return frozenset([x])
        case FinMu(_, x, b) | FinNu(_, x, b):
            return free_fixvars(b) - {x}
        case And(a, b) | Or(a, b) | RealTo(a, b):
            return free_fixvars(a) | free_fixvars(b)
        case Mod(_, b) | Exists(_, b) | Forall(_, b):
            return free_fixvars(b)
        case _:
            return frozenset()


def free_ivars(f) -> frozenset:
    match f:
        case FinMu(t, _, b) | FinNu(t, _, b):
            return iter_ivars(t) | free_ivars(b)
        case Exists(i, b) | Forall(i, b):
            return free_ivars(b) - {i}
        case And(a, b) | Or(a, b) | RealTo(a, b):
            return free_ivars(a) | free_ivars(b)
        case Mod(_, b):
            return free_ivars(b)
        case _:
            return frozenset()


def bound_names(f) -> frozenset:
    match f:
        case FinMu(_, x, b) | FinNu(_, x, b):
            return bound_names(b) | {x}
        case Exists(i, b) | Forall(i, b):
            return bound_names(b) | {i}
        case And(a, b) | Or(a, b) | RealTo(a, b):
            return bound_names(a) | bound_names(b)
        case Mod(_, b):
            return bound_names(b)
        case _:
            return frozenset()


def subst_formula(f, x: str, g):
    """Capture-avoiding f[g/X] for a fixpoint variable X."""
    if x not in free_fixvars(f):
        return f
    fix_fv = free_fixvars(g)
    iv_fv = free_ivars(g)
    match f:
        case FixVar(y):
            return g if y == x else f
        case And(a, b):
            return And(subst_formula(a, x, g), subst_formula(b, x, g))
        case Or(a, b):
            return Or(subst_formula(a, x, g), subst_formula(b, x, g))
        case RealTo(a, b):
            return RealTo(subst_formula(a, x, g), subst_formula(b, x, g))
        case Mod(m, b):
            return Mod(m, subst_formula(b, x, g))
        case FinMu(t, y, b) | FinNu(t, y, b):
            if y in fix_fv:
                y2 = fresh(y, fix_fv | free_fixvars(b))
                b = subst_formula(b, y, FixVar(y2))
                y = y2
            return type(f)(t, y, subst_formula(b, x, g))
        case Exists(i, b) | Forall(i, b):
            if i in iv_fv:
                i2 = fresh(i, iv_fv | free_ivars(b))
                b = subst_ivar(b, i, IVar(i2))
                i = i2
            return type(f)(i, subst_formula(b, x, g))
    return f


def subst_ivar(f, name: str, t):
    """Capture-avoiding f[t/i] for an iteration variable i."""
    if name not in free_ivars(f):
        return f
    t_fv = iter_ivars(t)
    match f:
        case FinMu(b0, y, b) | FinNu(b0, y, b):
            return type(f)(subst_iter(b0, name, t), y, subst_ivar(b, name, t))
        case Exists(i, b) | Forall(i, b):
            if i in t_fv:
                i2 = fresh(i, t_fv | free_ivars(b))
                b = subst_ivar(b, i, IVar(i2))
                i = i2
            return type(f)(i, subst_ivar(b, name, t))
        case And(a, b):
            return And(subst_ivar(a, name, t), subst_ivar(b, name, t))
        case Or(a, b):
            return Or(subst_ivar(a, name, t), subst_ivar(b, name, t))
        case RealTo(a, b):
            return RealTo(subst_ivar(a, name, t), subst_ivar(b, name, t))
        case Mod(m, b):
            return Mod(m, subst_ivar(b, name, t))
    return f


def instantiate(f, nu: dict):
    for i, n in nu.items():
        f = subst_ivar(f, i, numeral(n))
    return f


def iterate(x: str, body, n: int, base):
    """(X.body)^n(base)."""
    out = base
    for _ in range(n):
        out = subst_formula(body, x, out)
    return out


def formula_key(f, fenv=(), ienv=()):
    def it(t):
        v, k = split_iter(t)
        if v is None:
            return ("n", k)
        return ("i", ienv.index(v) if v in ienv else v, k)

    match f:
        case FixVar(x):
            return ("X", fenv.index(x)) if x in fenv else ("X!", x)
        case FinMu(t, x, b):
            return ("mu", it(t), formula_key(b, (x,) + fenv, ienv))
        case FinNu(t, x, b):
            return ("nu", it(t), formula_key(b, (x,) + fenv, ienv))
        case Exists(i, b):
            return ("E", formula_key(b, fenv, (i,) + ienv))
        case Forall(i, b):
            return ("A", formula_key(b, fenv, (i,) + ienv))
        case And(a, b):
            return ("/\\", formula_key(a, fenv, ienv), formula_key(b, fenv, ienv))
        case Or(a, b):
            return ("\\/", formula_key(a, fenv, ienv), formula_key(b, fenv, ienv))
        case RealTo(a, b):
            return ("~>", formula_key(a, fenv, ienv), formula_key(b, fenv, ienv))
        case Mod(m, b):
            return (m, formula_key(b, fenv, ienv))
        case TrueF():
            return ("T",)
        case FalseF():
            return ("F",)
        case ModUnit():
            return ("()",)
    raise TypeError(f"not a formula: {f!r}")


def alpha_eq_formula(a, b) -> bool:
    return formula_key(a) == formula_key(b)


def size(f) -> int:
    match f:
        case And(a, b) | Or(a, b) | RealTo(a, b):
            return 1 + size(a) + size(b)
        case Mod(_, b) | Exists(_, b) | Forall(_, b) | FinMu(_, _, b) | FinNu(_, _, b):
            return 1 + size(b)
        case _:
            return 1


def has_iteration(f) -> bool:
    match f:
        case FinMu() | FinNu() | FixVar() | Exists() | Forall():
            return True
        case And(a, b) | Or(a, b) | RealTo(a, b):
            return has_iteration(a) or has_iteration(b)
        case Mod(_, b):
            return has_iteration(b)
    return False


# ------------------------------------------------------ refinement types --

@dataclass(frozen=True)
class Pure:
    type: PureType


@dataclass(frozen=True)
class Refine:
    type: PureType
    formula: Formula


@dataclass(frozen=True)
class ProdR:
    left: "RefinementType"
    right: "RefinementType"


@dataclass(frozen=True)
class ArrowR:
    dom: "RefinementType"
    cod: "RefinementType"


RefinementType = Union[Pure, Refine, ProdR, ArrowR]


def underlying(r):
    match r:
        case Pure(t) | Refine(t, _):
            return t
        case ProdR(a, b):
            return Prod(underlying(a), underlying(b))
        case ArrowR(a, b):
            return Arrow(underlying(a), underlying(b))
    raise TypeError(f"not a refinement type: {r!r}")
