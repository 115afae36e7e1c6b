"""Normal forms: unfolding of bounded iterations, the quantifier-free
fragment, disjunctive normal form, prenex form and per-type shapes of
conjunctive formulae."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import domain as D
from .domain import FragmentError, fe_of_land
from .formation import in_land, in_omega
from .syntax import (
    And, Exists, F, FalseF, FinMu, FinNu, FixVar, Forall, IVar, Mod, ModUnit,
    Or, RealTo, T, TrueF, UNIT_MOD, conj, conjuncts, fresh, free_ivars,
    iterate, split_iter, subst_ivar,
)


DEFAULT_DNF_CAP = 4096


class DnfCapExceeded(RuntimeError):
    def __init__(self, cap, size):
        super().__init__(f"disjunctive normal form exceeds cap {cap} ({size} disjuncts)")
        self.cap = cap
        self.size = size


# ------------------------------------------------------------ unfolding --

def unfold_iter(f):
    match f:
        case FinMu(t, x, b) | FinNu(t, x, b):
            v, n = split_iter(t)
            if v is not None:
                raise FragmentError(f"open iteration term in {type(f).__name__}")
            base = F if isinstance(f, FinMu) else T
            return iterate(x, unfold_iter(b), n, base)
        case And(a, b):
            return And(unfold_iter(a), unfold_iter(b))
        case Or(a, b):
            return Or(unfold_iter(a), unfold_iter(b))
        case RealTo(a, b):
            return RealTo(unfold_iter(a), unfold_iter(b))
        case Mod(m, b):
            return Mod(m, unfold_iter(b))
        case Exists() | Forall():
            raise FragmentError("quantifier in a formula expected to be closed neutral")
    return f


def to_omega(f):
    if free_ivars(f):
        raise FragmentError("formula has free iteration variables")
    out = unfold_iter(f)
    if not in_omega(out):
        raise FragmentError("formula has free fixpoint variables")
    return out


# ------------------------------------------------------------------ dnf --

def _and(a, b):
    if isinstance(a, TrueF):
        return b
    if isinstance(b, TrueF):
        return a
    return And(a, b)


def _check_cap(n, cap):
    if cap is not None and n > cap:
        raise DnfCapExceeded(cap, n)


def to_dnf(f, cap=DEFAULT_DNF_CAP, prune=False) -> list:
    """List of conjunctive formulae whose disjunction is equivalent to f.

    With prune, inconsistent disjuncts are dropped and duplicates removed.
    """
    if not in_omega(f):
        raise FragmentError("to_dnf expects a quantifier- and iteration-free formula")
    out = _dnf(f, cap, prune)
    return out


def _uniq(ds, prune):
    if not prune:
        return ds
    seen, out = set(), []
    for d in ds:
        if d not in seen and fe_of_land(d) is not None:
            seen.add(d)
            out.append(d)
    return out


def _dnf(f, cap, prune):
    match f:
        case TrueF():
            return [T]
        case FalseF():
            return []
        case ModUnit():
            return [UNIT_MOD]
        case Or(a, b):
            out = _uniq(_dnf(a, cap, prune) + _dnf(b, cap, prune), prune)
            _check_cap(len(out), cap)
            return out
        case And(a, b):
            xs, ys = _dnf(a, cap, prune), _dnf(b, cap, prune)
            if not prune:
                _check_cap(len(xs) * len(ys), cap)
            out = _uniq([_and(x, y) for x in xs for y in ys], prune)
            _check_cap(len(out), cap)
            return out
        case Mod(m, b):
            return _uniq([Mod(m, x) for x in _dnf(b, cap, prune)], prune)
        case RealTo(a, b):
            xs = _dnf(a, cap, prune)
            if not xs:
                return [T]
            ys = _dnf(b, cap, prune)
            if not ys:
                return _uniq([conj(RealTo(x, F) for x in xs)], prune)
            _check_cap(len(ys) ** len(xs), cap)
            out = [conj(RealTo(x, y) for x, y in zip(xs, choice))
                   for choice in itertools.product(ys, repeat=len(xs))]
            return _uniq(out, prune)
    raise FragmentError(f"unexpected formula in dnf: {f!r}")


def minimal(elems) -> list:
    """Antichain of the minimal elements (the union of their upsets is kept)."""
    elems = sorted(set(elems), key=lambda d: (D.fe_size(d), str(d)))
    out = []
    for d in elems:
        if not any(D.leq(e, d) for e in out):
            out.append(d)
    return out


def dnf_elements(f, cap=DEFAULT_DNF_CAP, env=None) -> list:
    """Minimal finite elements d_i with [[f]] the union of their upsets.

    Works on closed neutral formulae directly, iterating fixpoints on sets of
    elements instead of unfolding them syntactically. For closed f this is
    the element-level image of to_dnf(to_omega(f), prune=True).
    """
    env = env or {}
    match f:
        case TrueF():
            return [D.BOT]
        case FalseF():
            return []
        case ModUnit():
            return [D.TOP]
        case FixVar(x):
            return env[x]
        case Or(a, b):
            out = minimal(dnf_elements(a, cap, env) + dnf_elements(b, cap, env))
            _check_cap(len(out), cap)
            return out
        case And(a, b):
            xs = dnf_elements(a, cap, env)
            if not xs:
                return []
            ys = dnf_elements(b, cap, env)
            js = set()
            for x in xs:
                for y in ys:
                    j = D.join(x, y)
                    if j is not None:
                        js.add(j)
                # bound on the pruned disjuncts before absorption
                if cap is not None and len(js) > cap:
                    raise DnfCapExceeded(cap, len(js))
            out = minimal(js)
            _check_cap(len(out), cap)
            return out
        case Mod(m, b):
            xs = dnf_elements(b, cap, env)
            wrap = {
                "pi1": lambda d: D.pair(d, D.BOT),
                "pi2": lambda d: D.pair(D.BOT, d),
                "inj1": lambda d: D.inj(1, d),
                "inj2": lambda d: D.inj(2, d),
                "fold": D.fold,
            }[m]
            return minimal(wrap(x) for x in xs)
        case FinMu(t, x, b) | FinNu(t, x, b):
            v, n = split_iter(t)
            if v is not None:
                raise FragmentError("open iteration term")
            cur = [] if isinstance(f, FinMu) else [D.BOT]
            for _ in range(n):
                cur = dnf_elements(b, cap, {**env, x: cur})
            return cur
        case RealTo(a, b):
            xs = dnf_elements(a, cap, {})
            if not xs:
                return [D.BOT]
            ys = dnf_elements(b, cap, {})
            if not ys:
                return []
            _check_cap(len(ys) ** len(xs), cap)
            out = []
            for choice in itertools.product(ys, repeat=len(xs)):
                s = D.stepjoin(list(zip(xs, choice)))
                if s is not None:
                    out.append(s)
            return minimal(out)
    raise FragmentError(f"not a closed neutral formula: {f!r}")


# -------------------------------------------------------------- prenex --

@dataclass(frozen=True)
class PrenexForm:
    kind: str | None  # "exists", "forall" or None
    ivar: str | None
    body: object

    def formula(self):
        if self.kind == "exists":
            return Exists(self.ivar, self.body)
        if self.kind == "forall":
            return Forall(self.ivar, self.body)
        return self.body

    def at(self, n: int):
        from .syntax import numeral
        if self.kind is None:
            return self.body
        return subst_ivar(self.body, self.ivar, numeral(n))


def _flipq(k):
    return {"exists": "forall", "forall": "exists", None: None}[k]


def _merge(k1, i1, b1, k2, i2, b2, op):
    if k1 is None and k2 is None:
        return None, None, op(b1, b2)
    if k1 is None:
        return k2, i2, op(b1, b2)
    if k2 is None:
        return k1, i1, op(b1, b2)
    if k1 != k2:
        raise FragmentError("mixed quantifiers: formula is neither positive nor negative")
    return k1, i1, op(b1, subst_ivar(b2, i2, IVar(i1)))


def _pre(f):
    match f:
        case And(a, b) | Or(a, b):
            return _merge(*_pre(a), *_pre(b), type(f))
        case RealTo(a, b):
            ka, ia, ba = _pre(a)
            return _merge(_flipq(ka), ia, ba, *_pre(b), RealTo)
        case Mod(m, b):
            k, i, bb = _pre(b)
            return k, i, Mod(m, bb)
        case FinMu(t, x, b) | FinNu(t, x, b):
            k, i, bb = _pre(b)
            return k, i, type(f)(t, x, bb)
        case Exists(i, b) | Forall(i, b):
            kind = "exists" if isinstance(f, Exists) else "forall"
            k, j, bb = _pre(b)
            if k is None:
                return kind, i, bb
            if k != kind:
                raise FragmentError("mixed quantifiers: formula is neither positive nor negative")
            return kind, i, subst_ivar(bb, j, IVar(i))
    return None, None, f


def _freshen(f):
    """Rename every bound iteration variable apart."""
    match f:
        case Exists(i, b) | Forall(i, b):
            j = fresh(i)
            return type(f)(j, _freshen(subst_ivar(b, i, IVar(j))))
        case And(a, b) | Or(a, b) | RealTo(a, b):
            return type(f)(_freshen(a), _freshen(b))
        case Mod(m, b):
            return Mod(m, _freshen(b))
        case FinMu(t, x, b) | FinNu(t, x, b):
            return type(f)(t, x, _freshen(b))
    return f


def to_prenex(f, sign=None) -> PrenexForm:
    from .syntax import Polarity
    k, i, body = _pre(_freshen(f))
    if sign is Polarity.POS and k == "forall" or sign is Polarity.NEG and k == "exists":
        raise FragmentError(f"prenex form of a {sign.name.lower()} formula has the wrong quantifier")
    if sign is Polarity.NEUTRAL and k is not None:
        raise FragmentError("neutral formula contains quantifiers")
    return PrenexForm(k, i, body)


# ------------------------------------------------------- normal shapes --

@dataclass(frozen=True)
class Inconsistent:
    pass


@dataclass(frozen=True)
class TriviallyTrue:
    pass


@dataclass(frozen=True)
class UnitShape:
    def formula(self):
        return UNIT_MOD


@dataclass(frozen=True)
class FoldShape:
    body: object

    def formula(self):
        return Mod("fold", self.body)


@dataclass(frozen=True)
class InjShape:
    index: int
    body: object

    def formula(self):
        return Mod(f"inj{self.index}", self.body)


@dataclass(frozen=True)
class ProdShape:
    left: object
    right: object

    def formula(self):
        return And(Mod("pi1", self.left), Mod("pi2", self.right))


@dataclass(frozen=True)
class ArrowShape:
    steps: tuple

    def formula(self):
        return conj(RealTo(a, b) for a, b in self.steps)


def land_normal(f):
    if not in_land(f):
        raise FragmentError("land_normal expects a conjunctive formula")
    d = fe_of_land(f)
    if d is None:
        return Inconsistent()
    if d == D.BOT:
        return TriviallyTrue()
    cs = [c for c in conjuncts(f) if not isinstance(c, TrueF)]
    heads = {type(c) for c in cs}
    if ModUnit in heads:
        return UnitShape()
    if RealTo in heads:
        return ArrowShape(tuple((c.left, c.right) for c in cs))
    ms = {c.mod for c in cs}
    if ms <= {"pi1", "pi2"}:
        left = [c.body for c in cs if c.mod == "pi1"]
        right = [c.body for c in cs if c.mod == "pi2"]
        return ProdShape(conj(left), conj(right))
    if ms == {"fold"}:
        return FoldShape(conj(c.body for c in cs))
    (m,) = ms
    return InjShape(int(m[-1]), conj(c.body for c in cs))
