"""Well-formedness: pure typing of terms, formula formation with polarity,
the Pos/Neg guard predicates and fragment membership."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .domain import has_type
from .syntax import (
    And, App, Arrow, ArrowR, Case, Exists, FalseF, FinConst, FinMu, FinNu,
    Fix, FixVar, Fold, Forall, Global, Inj, Lam, Mod, ModUnit, Or, Pair,
    Polarity, Prod, ProdR, Proj, Pure, Rec, RealTo, Refine, Sum, TrueF,
    TyVar, UNIT, UnitI, UnitT, Unfold, Var, alpha_eq_type, free_fixvars,
    free_ivars, free_tyvars, iter_ivars, subst_type, unfold_rec, fresh,
    conj,
)


class PureTypeError(TypeError):
    pass


class FormationError(ValueError):
    def __init__(self, reason, formula=None):
        super().__init__(reason)
        self.reason = reason
        self.formula = formula


# ------------------------------------------------------- pure typing --

_meta_ids = itertools.count()


@dataclass(frozen=True)
class Meta:
    id: int


@dataclass
class Derivation:
    rule: str
    term: object
    type: object
    children: list = field(default_factory=list)

    def lines(self, indent=0):
        from .parser import print_term, print_type
        head = print_term(self.term)
        if len(head) > 60:
            head = head[:57] + "..."
        out = ["  " * indent + f"[{self.rule}] {head} : {print_type(self.type)}"]
        for c in self.children:
            out += c.lines(indent + 1)
        return out

    def __str__(self):
        return "\n".join(self.lines())


class _Infer:
    def __init__(self):
        self.sub = {}
        self.deferred = []

    def meta(self):
        return Meta(next(_meta_ids))

    def resolve(self, t):
        while isinstance(t, Meta) and t in self.sub:
            t = self.sub[t]
        return t

    def zonk(self, t):
        t = self.resolve(t)
        match t:
            case Prod(a, b):
                return Prod(self.zonk(a), self.zonk(b))
            case Arrow(a, b):
                return Arrow(self.zonk(a), self.zonk(b))
            case Sum(a, b):
                return Sum(self.zonk(a), self.zonk(b))
            case Rec(v, b):
                return Rec(v, self.zonk(b))
        return t

    def occurs(self, m, t):
        t = self.resolve(t)
        if t == m:
            return True
        match t:
            case Prod(a, b) | Arrow(a, b) | Sum(a, b):
                return self.occurs(m, a) or self.occurs(m, b)
            case Rec(_, b):
                return self.occurs(m, b)
        return False

    def unify(self, a, b, term=None):
        a, b = self.resolve(a), self.resolve(b)
        if a == b:
            return
        if isinstance(a, Meta) or isinstance(b, Meta):
            m, t = (a, b) if isinstance(a, Meta) else (b, a)
            if self.occurs(m, t):
                raise PureTypeError(f"infinite type in {_show(term)}")
            self.sub[m] = t
            return
        match a, b:
            case (UnitT(), UnitT()):
                return
            case (Prod(a1, a2), Prod(b1, b2)) | (Sum(a1, a2), Sum(b1, b2)) | \
                 (Arrow(a1, a2), Arrow(b1, b2)):
                if type(a) is type(b):
                    self.unify(a1, b1, term)
                    self.unify(a2, b2, term)
                    return
            case (TyVar(x), TyVar(y)):
                if x == y:
                    return
            case (Rec(), Rec()):
                z = TyVar(fresh("z"))
                self.unify(subst_type(self.zonk(a.body), a.var, z),
                           subst_type(self.zonk(b.body), b.var, z), term)
                return
        raise PureTypeError(
            f"type mismatch: {_show_ty(self.zonk(a))} vs {_show_ty(self.zonk(b))}"
            + (f" at {_show(term)}" if term is not None else ""))

    def instantiate(self, t):
        for v in sorted(free_tyvars(t)):
            t = subst_type(t, v, self.meta())
        return t

    def check(self, ctx, m, exp):
        node = Derivation("?", m, exp)
        match m:
            case UnitI():
                node.rule = "unit"
                self.unify(exp, UNIT, m)
            case Pair(a, b):
                node.rule = "pair"
                ta, tb = self.meta(), self.meta()
                self.unify(exp, Prod(ta, tb), m)
                node.children = [self.check(ctx, a, ta), self.check(ctx, b, tb)]
            case Proj(i, b):
                node.rule = f"pi{i}"
                ta, tb = self.meta(), self.meta()
                node.children = [self.check(ctx, b, Prod(ta, tb))]
                self.unify(exp, ta if i == 1 else tb, m)
            case Var(x):
                node.rule = "var"
                if x not in ctx:
                    raise PureTypeError(f"variable not found: {x}")
                self.unify(ctx[x], exp, m)
            case Lam(x, b):
                node.rule = "lam"
                ta, tb = self.meta(), self.meta()
                self.unify(exp, Arrow(ta, tb), m)
                node.children = [self.check({**ctx, x: ta}, b, tb)]
            case App(f, a):
                node.rule = "app"
                ta = self.meta()
                node.children = [self.check(ctx, f, Arrow(ta, exp)),
                                 self.check(ctx, a, ta)]
            case Fix(x, b):
                node.rule = "fix"
                node.children = [self.check({**ctx, x: exp}, b, exp)]
            case Fold(b):
                node.rule = "fold"
                self.deferred.append(("fold", ctx, b, exp, node))
            case Unfold(b):
                node.rule = "unfold"
                ta = self.meta()
                node.children = [self.check(ctx, b, ta)]
                self.deferred.append(("unfold", ctx, b, (ta, exp), node))
            case Inj(i, b):
                node.rule = f"inj{i}"
                ta, tb = self.meta(), self.meta()
                self.unify(exp, Sum(ta, tb), m)
                node.children = [self.check(ctx, b, ta if i == 1 else tb)]
            case Case(s, x1, n1, x2, n2):
                node.rule = "case"
                ta, tb = self.meta(), self.meta()
                node.children = [self.check(ctx, s, Sum(ta, tb)),
                                 self.check({**ctx, x1: ta}, n1, exp),
                                 self.check({**ctx, x2: tb}, n2, exp)]
            case FinConst(d, t):
                node.rule = "fin"
                if not has_type(d, t):
                    raise PureTypeError(f"finite element {d} is not of the annotated type")
                self.unify(exp, t, m)
            case Global(_, body, t):
                node.rule = "global"
                if t is not None:
                    self.unify(exp, self.instantiate(t), m)
                else:
                    node.children = [self.check({}, body, exp)]
            case _:
                raise PureTypeError(f"not a term: {m!r}")
        return node

    def run_deferred(self):
        progress = True
        while self.deferred and progress:
            progress = False
            pending, self.deferred = self.deferred, []
            for item in pending:
                kind, ctx, b, tys, node = item
                target = self.resolve(tys if kind == "fold" else tys[0])
                if isinstance(target, Meta):
                    self.deferred.append(item)
                    continue
                if not isinstance(target, Rec):
                    raise PureTypeError(
                        f"{kind} at non-recursive type {_show_ty(self.zonk(target))}")
                progress = True
                unf = unfold_rec(self.zonk(target))
                if kind == "fold":
                    node.children = [self.check(ctx, b, unf)]
                else:
                    self.unify(tys[1], unf, b)
        if self.deferred:
            raise PureTypeError("cannot determine the recursive type of a fold/unfold")

    def finish(self, node):
        t = self.zonk(node.type)
        node.type = _default(t)
        for c in node.children:
            self.finish(c)
        return node


def _default(t):
    match t:
        case Meta():
            return UNIT
        case Prod(a, b):
            return Prod(_default(a), _default(b))
        case Arrow(a, b):
            return Arrow(_default(a), _default(b))
        case Sum(a, b):
            return Sum(_default(a), _default(b))
        case Rec(v, b):
            return Rec(v, _default(b))
    return t


def _show(m):
    from .parser import print_term
    try:
        s = print_term(m)
    except Exception:
        s = repr(m)
    return s if len(s) < 80 else s[:77] + "..."


def _show_ty(t):
    from .parser import print_type
    try:
        return print_type(t)
    except Exception:
        return repr(t)


def check_pure_term(ctx: dict, m, t) -> Derivation:
    """Derivation of ctx |- m : t; raises PureTypeError on failure.

    Free type variables in t and ctx are rigid.
    """
    inf = _Infer()
    node = inf.check(dict(ctx), m, t)
    inf.run_deferred()
    return inf.finish(node)


def infer_pure_type(ctx: dict, m):
    inf = _Infer()
    mt = inf.meta()
    inf.check(dict(ctx), m, mt)
    inf.run_deferred()
    return _default(inf.zonk(mt))


# ------------------------------------------------- formula formation --

def pos_in(i: str, f) -> bool:
    if i not in free_ivars(f):
        return True
    match f:
        case And(a, b) | Or(a, b):
            return pos_in(i, a) and pos_in(i, b)
        case Mod(_, b):
            return pos_in(i, b)
        case RealTo(a, b):
            return neg_in(i, a) and pos_in(i, b)
        case Exists(_, b):
            return pos_in(i, b)
        case FinMu(_, _, b):
            return pos_in(i, b)
        case FinNu(t, _, b):
            return pos_in(i, b) and i not in iter_ivars(t)
    return False


def neg_in(i: str, f) -> bool:
    if i not in free_ivars(f):
        return True
    match f:
        case And(a, b) | Or(a, b):
            return neg_in(i, a) and neg_in(i, b)
        case Mod(_, b):
            return neg_in(i, b)
        case RealTo(a, b):
            return pos_in(i, a) and neg_in(i, b)
        case Forall(_, b):
            return neg_in(i, b)
        case FinNu(_, _, b):
            return neg_in(i, b)
        case FinMu(t, _, b):
            return neg_in(i, b) and i not in iter_ivars(t)
    return False


_MOD_SHAPE = {"pi1": Prod, "pi2": Prod, "inj1": Sum, "inj2": Sum, "fold": Rec}


def mod_arg_type(m: str, t):
    """Type of the body of <m>phi at type t, or None if ill-typed."""
    if not isinstance(t, _MOD_SHAPE[m]):
        return None
    if m == "fold":
        return unfold_rec(t)
    return t.left if m in ("pi1", "inj1") else t.right


def check_formula(theta: dict, f, t, sign: Polarity):
    """Raise FormationError unless f is in L^sign(theta; t)."""
    match f:
        case TrueF() | FalseF():
            return
        case And(a, b) | Or(a, b):
            check_formula(theta, a, t, sign)
            check_formula(theta, b, t, sign)
        case ModUnit():
            if not isinstance(t, UnitT):
                raise FormationError(f"<()> at non-unit type {_show_ty(t)}", f)
        case Mod(m, b):
            bt = mod_arg_type(m, t)
            if bt is None:
                raise FormationError(f"<{m}> at type {_show_ty(t)}", f)
            check_formula(theta, b, bt, sign)
        case FixVar(x):
            if x not in theta:
                raise FormationError(f"unbound fixpoint variable {x}", f)
            if not alpha_eq_type(theta[x], t):
                raise FormationError(f"fixpoint variable {x} used at the wrong type", f)
        case FinMu(_, x, b) | FinNu(_, x, b):
            check_formula({**theta, x: t}, b, t, sign)
        case Exists(i, b):
            if sign is not Polarity.POS:
                raise FormationError("existential quantifier outside a positive formula", f)
            check_formula(theta, b, t, sign)
            if not pos_in(i, b):
                raise FormationError(f"{i} is not positive in the body of exists {i}", f)
        case Forall(i, b):
            if sign is not Polarity.NEG:
                raise FormationError("universal quantifier outside a negative formula", f)
            check_formula(theta, b, t, sign)
            if not neg_in(i, b):
                raise FormationError(f"{i} is not negative in the body of forall {i}", f)
        case RealTo(a, b):
            if not isinstance(t, Arrow):
                raise FormationError(f"~> at non-arrow type {_show_ty(t)}", f)
            if free_fixvars(f):
                raise FormationError("~> with free fixpoint variables", f)
            check_formula({}, a, t.dom, sign.flip())
            check_formula({}, b, t.cod, sign)
        case _:
            raise FormationError(f"not a formula: {f!r}", f)


def is_formula(f, t, sign: Polarity, theta=None) -> bool:
    try:
        check_formula(theta or {}, f, t, sign)
        return True
    except FormationError:
        return False


def in_omega(f) -> bool:
    match f:
        case TrueF() | FalseF() | ModUnit():
            return True
        case And(a, b) | Or(a, b) | RealTo(a, b):
            return in_omega(a) and in_omega(b)
        case Mod(_, b):
            return in_omega(b)
    return False


def in_land(f) -> bool:
    match f:
        case TrueF() | FalseF() | ModUnit():
            return True
        case And(a, b) | RealTo(a, b):
            return in_land(a) and in_land(b)
        case Mod(_, b):
            return in_land(b)
    return False


def in_dnf(f) -> bool:
    match f:
        case Or(a, b):
            return in_dnf(a) and in_dnf(b)
    return in_land(f)


def fragment_of(f) -> str:
    if in_land(f):
        return "land"
    if in_omega(f):
        return "omega"
    return "iter"


# ------------------------------------------------- refinement types --

def flatten_refinement(r):
    """(underlying type, formula) with r equivalent to {type | formula}."""
    match r:
        case Pure(t):
            return t, TrueF()
        case Refine(t, f):
            return t, f
        case ProdR(a, b):
            ta, fa = flatten_refinement(a)
            tb, fb = flatten_refinement(b)
            return Prod(ta, tb), conj([Mod("pi1", fa), Mod("pi2", fb)])
        case ArrowR(a, b):
            ta, fa = flatten_refinement(a)
            tb, fb = flatten_refinement(b)
            return Arrow(ta, tb), RealTo(fa, fb)
    raise TypeError(f"not a refinement type: {r!r}")


def check_refinement(r, sign: Polarity):
    match r:
        case Pure(_):
            return
        case Refine(t, f):
            check_formula({}, f, t, sign)
        case ProdR(a, b):
            check_refinement(a, sign)
            check_refinement(b, sign)
        case ArrowR(a, b):
            check_refinement(a, sign.flip())
            check_refinement(b, sign)
        case _:
            raise FormationError(f"not a refinement type: {r!r}")
