"""Fuel-bounded call-by-need evaluation over values that embed finite
elements, and the one-sided semantic checks built on it.

``check_le(v, d)`` asks whether d is below the denotation of v, and
``holds(v, phi)`` whether the denotation satisfies a positive formula. Both
answer with a three-valued ``Tri``: YES and NO are definitive, UNKNOWN means
the fuel ran out (or an existential search was exhausted).
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from . import domain as D
from .normalize import dnf_elements, to_prenex
from .syntax import (
    And, App, Case, Exists, FalseF, FinConst, FinMu, FinNu, Fix, FixVar,
    Fold, Forall, Global, Inj, Lam, Mod, ModUnit, Or, Pair, Polarity, Proj,
    RealTo, T, TrueF, UNIT_MOD, UnitI, Unfold, Var, conj, instantiate,
    ivar_value,
)


class Tri(Enum):
    YES = "Yes"
    NO = "No"
    UNKNOWN = "Unknown"

    def __str__(self):
        return self.value


YES, NO, UNKNOWN = Tri.YES, Tri.NO, Tri.UNKNOWN


def tri_and(a, b):
    if a is NO or b is NO:
        return NO
    if a is YES and b is YES:
        return YES
    return UNKNOWN


def tri_or(a, b):
    if a is YES or b is YES:
        return YES
    if a is NO and b is NO:
        return NO
    return UNKNOWN


@dataclass(frozen=True)
class Fuel:
    fix: int = 64
    search: int = 16


class EvalError(RuntimeError):
    """Ill-typed destruction: signals a bug upstream, not a user error."""


# --------------------------------------------------------------- values --

class Thunk:
    __slots__ = ("fn", "value", "busy")

    def __init__(self, fn=None, value=None):
        self.fn = fn
        self.value = value
        self.busy = False

    @staticmethod
    def of(v):
        return Thunk(value=v)

    def force(self):
        if self.value is not None:
            return self.value
        if self.busy:
            return VBOT_X
        self.busy = True
        try:
            v = self.fn()
        finally:
            self.busy = False
        self.value, self.fn = v, None
        return v


@dataclass(frozen=True)
class VUnit:
    pass


@dataclass(frozen=True, eq=False)
class VPair:
    left: Thunk
    right: Thunk


@dataclass(frozen=True, eq=False)
class VInj:
    index: int
    body: Thunk


@dataclass(frozen=True, eq=False)
class VFold:
    body: Thunk


@dataclass(frozen=True, eq=False)
class VClosure:
    env: dict
    var: str
    body: object


@dataclass(frozen=True)
class VFin:
    """A finite element; exact means the denotation is exactly elem,
    otherwise it is only known to be above it."""
    elem: object
    exact: bool = True


VUNIT = VUnit()
VBOT_X = VFin(D.BOT, False)   # fuel exhausted: some unknown element above bottom


# ------------------------------------------------------------ evaluator --

class Evaluator:
    def __init__(self, fuel: Fuel = None, trace=None):
        self.fuel = fuel or Fuel()
        self.fix_left = self.fuel.fix
        self.trace = trace
        self.globals = {}

    def delay(self, m, env):
        return Thunk(lambda: self.whnf(m, env))

    def whnf(self, m, env):
        match m:
            case UnitI():
                return VUNIT
            case Var(x):
                return env[x].force()
            case Lam(x, b):
                return VClosure(env, x, b)
            case App(f, a):
                return self.apply(self.whnf(f, env), self.delay(a, env))
            case Pair(a, b):
                return VPair(self.delay(a, env), self.delay(b, env))
            case Proj(i, b):
                return self.proj(i, self.whnf(b, env))
            case Fix(x, b):
                if self.fix_left <= 0:
                    if self.trace:
                        self.trace(f"fix {x}: fuel exhausted")
                    return VBOT_X
                self.fix_left -= 1
                if self.trace:
                    self.trace(f"fix {x}: unfold (fuel left {self.fix_left})")
                return self.whnf(b, {**env, x: self.delay(m, env)})
            case Fold(b):
                return VFold(self.delay(b, env))
            case Unfold(b):
                return self.unfold(self.whnf(b, env))
            case Inj(i, b):
                return VInj(i, self.delay(b, env))
            case Case(s, x1, n1, x2, n2):
                v = self.whnf(s, env)
                match v:
                    case VInj(i, t):
                        pass
                    case VFin(D.InjFE(index=i, body=e), ex):
                        t = Thunk.of(VFin(e, ex))
                    case VFin(D.Bot(), ex):
                        return v
                    case _:
                        raise EvalError(f"case on a non-sum value {v!r}")
                if i == 1:
                    return self.whnf(n1, {**env, x1: t})
                return self.whnf(n2, {**env, x2: t})
            case FinConst(d, _):
                return VFin(d, True)
            case Global(name, body, _):
                th = self.globals.get(name)
                if th is None:
                    th = self.globals[name] = self.delay(body, {})
                return th.force()
        raise EvalError(f"not a term: {m!r}")

    def proj(self, i, v):
        match v:
            case VPair(a, b):
                return (a if i == 1 else b).force()
            case VFin(d, ex):
                return VFin(D.proj_fe(i, d), ex)
        raise EvalError(f"projection from a non-pair value {v!r}")

    def unfold(self, v):
        match v:
            case VFold(t):
                return t.force()
            case VFin(d, ex):
                return VFin(D.unfold_fe(d), ex)
        raise EvalError(f"unfold of a non-fold value {v!r}")

    def apply(self, f, arg: Thunk):
        match f:
            case VClosure(env, x, b):
                return self.whnf(b, {**env, x: arg})
            case VFin(d, ex):
                if d == D.BOT:
                    return f
                out, exact = D.BOT, ex
                for a, b in d.steps:
                    r = self.check_le(arg, a)
                    if r is YES:
                        out = D.join(out, b)
                    elif r is UNKNOWN:
                        exact = False
                return VFin(out, exact)
        raise EvalError(f"application of a non-function value {f!r}")

    def check_le(self, v, d) -> Tri:
        if d == D.BOT:
            return YES
        val = v.force() if isinstance(v, Thunk) else v
        if isinstance(val, VFin):
            if D.leq(d, val.elem):
                return YES
            if val.exact or D.join(d, val.elem) is None:
                return NO
            return UNKNOWN
        match d:
            case D.TopUnit():
                if isinstance(val, VUnit):
                    return YES
            case D.PairFE(a, b):
                if isinstance(val, VPair):
                    r = self.check_le(val.left, a)
                    if r is NO:
                        return NO
                    return tri_and(r, self.check_le(val.right, b))
            case D.InjFE(i, a):
                if isinstance(val, VInj):
                    if val.index != i:
                        return NO
                    return self.check_le(val.body, a)
            case D.FoldFE(a):
                if isinstance(val, VFold):
                    return self.check_le(val.body, a)
            case D.StepJoin(steps):
                if isinstance(val, VClosure):
                    out = YES
                    for a, b in steps:
                        r = self.check_le(self.apply(val, Thunk.of(VFin(a))), b)
                        out = tri_and(out, r)
                        if out is NO:
                            return NO
                    return out
        raise EvalError(f"cannot compare {d} with value {val!r}")

    # -- satisfaction of neutral formulae

    def hold(self, src, f, fenv):
        """(Tri, witness) where the witness is a conjunctive formula that
        the value satisfies and that entails f, available on YES."""
        match f:
            case TrueF():
                return YES, T
            case FalseF():
                return NO, None
            case ModUnit():
                val = _force(src)
                if isinstance(val, VUnit):
                    return YES, UNIT_MOD
                if isinstance(val, VFin):
                    if val.elem == D.TOP:
                        return YES, UNIT_MOD
                    return (NO if val.exact else UNKNOWN), None
                raise EvalError(f"<()> on a non-unit value {val!r}")
            case And(a, b):
                r1, g1 = self.hold(src, a, fenv)
                if r1 is NO:
                    return NO, None
                r2, g2 = self.hold(src, b, fenv)
                r = tri_and(r1, r2)
                return r, (And(g1, g2) if r is YES else None)
            case Or(a, b):
                r1, g1 = self.hold(src, a, fenv)
                if r1 is YES:
                    return YES, g1
                r2, g2 = self.hold(src, b, fenv)
                if r2 is YES:
                    return YES, g2
                return tri_or(r1, r2), None
            case Mod("pi1" | "pi2" as m, b):
                i = int(m[-1])
                r, g = self.hold(Thunk(lambda: self.proj(i, _force(src))), b, fenv)
                return r, (Mod(m, g) if r is YES else None)
            case Mod("fold", b):
                r, g = self.hold(Thunk(lambda: self.unfold(_force(src))), b, fenv)
                return r, (Mod("fold", g) if r is YES else None)
            case Mod(m, b):
                i = int(m[-1])
                val = _force(src)
                match val:
                    case VInj(j, t):
                        pass
                    case VFin(D.InjFE(index=j, body=e), ex):
                        t = VFin(e, ex)
                    case VFin(D.Bot(), ex):
                        return (NO if ex else UNKNOWN), None
                    case _:
                        raise EvalError(f"<{m}> on a non-sum value {val!r}")
                if j != i:
                    return NO, None
                r, g = self.hold(t, b, fenv)
                return r, (Mod(m, g) if r is YES else None)
            case FixVar(x):
                kind, n, body, benv = fenv[x]
                if n == 0:
                    return (NO, None) if kind == "mu" else (YES, T)
                return self.hold(src, body, {**benv, x: (kind, n - 1, body, benv)})
            case FinMu(t, x, b) | FinNu(t, x, b):
                kind = "mu" if isinstance(f, FinMu) else "nu"
                n = ivar_value(t, {})
                return self.hold(src, FixVar(x), {**fenv, x: (kind, n, b, fenv)})
            case RealTo(a, b):
                ds = dnf_elements(a)
                out, parts = YES, []
                fn = Thunk(lambda: _force(src))
                for d in ds:
                    res = Thunk(lambda d=d: self.apply(fn.force(), Thunk.of(VFin(d))))
                    r, g = self.hold(res, b, {})
                    out = tri_and(out, r)
                    if out is NO:
                        return NO, None
                    parts.append(RealTo(D.land_of_fe(d), g) if r is YES else None)
                return out, (conj(parts) if out is YES else None)
            case Exists() | Forall():
                raise EvalError("quantifier left in a prenexed formula")
        raise EvalError(f"not a formula: {f!r}")


def _force(src):
    return src.force() if isinstance(src, Thunk) else src


def _source(ev, v):
    if isinstance(v, (VUnit, VPair, VInj, VFold, VClosure, VFin)):
        return v
    return ev.delay(v, {})


# ------------------------------------------------------------ interface --

def whnf(m, env=None, fuel: Fuel = None, trace=None):
    return Evaluator(fuel, trace).whnf(m, env or {})


def apply_v(f, a, fuel: Fuel = None):
    ev = Evaluator(fuel)
    fv = f if not _is_term(f) else ev.whnf(f, {})
    at = Thunk.of(a) if not _is_term(a) else ev.delay(a, {})
    return ev.apply(fv, at)


def _is_term(x):
    return not isinstance(x, (VUnit, VPair, VInj, VFold, VClosure, VFin, Thunk))


def check_le(v, d, fuel: Fuel = None, trace=None) -> Tri:
    ev = Evaluator(fuel, trace)
    return ev.check_le(_source(ev, v), d)


@dataclass(frozen=True)
class HoldsResult:
    verdict: Tri
    witness: int | None = None  # instance of the prenex quantifier
    gamma: object = None        # conjunctive witness formula

    def __bool__(self):
        return self.verdict is YES


def holds(v, f, nu=None, fuel: Fuel = None, trace=None) -> HoldsResult:
    """Does the denotation of v satisfy the positive formula f?

    Quantifiers are prenexed to a single existential, whose instances
    0..fuel.search are tried in turn, each with a fresh evaluation so that
    every instance gets the full fix fuel. Never answers NO to an
    existential.
    """
    fuel = fuel or Fuel()
    if nu:
        f = instantiate(f, nu)
    pf = to_prenex(f, Polarity.POS)
    if pf.kind is None:
        ev = Evaluator(fuel, trace)
        r, g = ev.hold(_source(ev, v), pf.body, {})
        return HoldsResult(r, None, g)
    for n in range(fuel.search + 1):
        ev = Evaluator(fuel, trace)
        r, g = ev.hold(_source(ev, v), pf.at(n), {})
        if r is YES:
            return HoldsResult(YES, n, g)
    return HoldsResult(UNKNOWN)


# ------------------------------------------------------------ observers --

def read_nat(v, ev=None):
    """Numeral value of a Nat value, or None if not (yet) defined."""
    ev = ev or Evaluator()
    n = 0
    val = _force(v)
    while True:
        val = ev.unfold(val)
        match val:
            case VInj(1, _) | VFin(D.InjFE(index=1), _):
                return n
            case VInj(2, t):
                val, n = t.force(), n + 1
            case VFin(D.InjFE(index=2, body=e), ex):
                val, n = VFin(e, ex), n + 1
            case _:
                return None


def read_stream(v, limit, read_elem, ev=None):
    """(elements, tail_state) for the defined prefix of a stream value.

    tail_state is "bottom" when the stream is definitively undefined after
    the prefix, "unknown" when fuel ran out, "limit" if limit was reached.
    """
    ev = ev or Evaluator()
    out = []
    val = _force(v)
    while len(out) < limit:
        cell = ev.unfold(val)
        if isinstance(cell, VFin) and cell.elem == D.BOT:
            return out, ("bottom" if cell.exact else "unknown")
        head = ev.proj(1, cell)
        x = read_elem(head, ev)
        if x is None:
            if isinstance(head, VFin) and head.elem == D.BOT and head.exact:
                return out, "bottom"
            return out, "unknown"
        out.append(x)
        val = ev.proj(2, cell)
    return out, "limit"
