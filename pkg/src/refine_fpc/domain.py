"""Finite elements of the Scott domains of closed pure types.

A single untyped ``BOT`` is the least element at every type: the smart
constructors collapse ``(bot, bot)``, ``fold(bot)`` and the empty step join
to it, so structural equality coincides with order-equivalence. Step joins
are kept in a canonical form (their jump points, sorted), which makes
function elements hashable and comparable with ``==`` as well.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .syntax import (
    And, Arrow, FalseF, Mod, ModUnit, Prod, Rec, RealTo, Sum, TrueF, UnitT,
    T, UNIT_MOD, conj, type_key, unfold_rec,
)


class FragmentError(ValueError):
    pass


def _cached_hash(self):
    # elements are hashed constantly (caches, sets); compute once
    h = self.__dict__.get("_h")
    if h is None:
        h = hash((type(self).__name__, *(v for k, v in self.__dict__.items() if k != "_h")))
        object.__setattr__(self, "_h", h)
    return h


@dataclass(frozen=True)
class Bot:
    def __str__(self):
        return "bot"


@dataclass(frozen=True)
class TopUnit:
    def __str__(self):
        return "top"


@dataclass(frozen=True)
class PairFE:
    left: object
    right: object

    __hash__ = _cached_hash

    def __str__(self):
        return f"({self.left}, {self.right})"


@dataclass(frozen=True)
class InjFE:
    index: int
    body: object

    __hash__ = _cached_hash

    def __str__(self):
        return f"inj{self.index}({self.body})"


@dataclass(frozen=True)
class FoldFE:
    body: object

    __hash__ = _cached_hash

    def __str__(self):
        return f"fold({self.body})"


@dataclass(frozen=True)
class StepJoin:
    steps: tuple  # ((d, e), ...) canonical

    __hash__ = _cached_hash

    def __str__(self):
        return "{" + "; ".join(f"{a} => {b}" for a, b in self.steps) + "}"


BOT = Bot()
TOP = TopUnit()


def pair(a, b):
    if a == BOT and b == BOT:
        return BOT
    return PairFE(a, b)


def inj(i, a):
    return InjFE(i, a)


def fold(a):
    return BOT if a == BOT else FoldFE(a)


def stepjoin(steps):
    """Canonical join of step functions, or None when inconsistent."""
    steps = [(d, e) for d, e in steps if e != BOT]
    if not steps:
        return BOT
    return _canonical(frozenset(steps))


@lru_cache(maxsize=1 << 16)
def _canonical(steps: frozenset):
    # close the jump points under binary joins; each pair is joined once
    pts = list(dict.fromkeys(d for d, _ in steps))
    seen = set(pts)
    i = 0
    while i < len(pts):
        p = pts[i]
        for q in pts[:i]:
            j = join(p, q)
            if j is not None and j not in seen:
                seen.add(j)
                pts.append(j)
        i += 1
    vals = {}
    for a in pts:
        v = BOT
        for d, e in steps:
            if leq(d, a):
                v = join(v, e)
                if v is None:
                    return None
        vals[a] = v
    keys = []
    for a in pts:
        below = BOT
        for b in pts:
            if b != a and leq(b, a):
                below = join(below, vals[b])
        if below != vals[a]:
            keys.append((a, vals[a]))
    if not keys:
        return BOT
    keys.sort(key=lambda s: (str(s[0]), str(s[1])))
    return StepJoin(tuple(keys))


def step(d, e):
    return stepjoin([(d, e)])


# ---------------------------------------------------------------- order --

@lru_cache(maxsize=1 << 18)
def leq(d, e) -> bool:
    if d == BOT:
        return True
    if e == BOT:
        return False
    match d:
        case TopUnit():
            return e == TOP
        case PairFE(a, b):
            return isinstance(e, PairFE) and leq(a, e.left) and leq(b, e.right)
        case InjFE(i, a):
            return isinstance(e, InjFE) and e.index == i and leq(a, e.body)
        case FoldFE(a):
            return isinstance(e, FoldFE) and leq(a, e.body)
        case StepJoin(steps):
            return isinstance(e, StepJoin) and all(leq(b, apply_fe(e, a)) for a, b in steps)
    raise TypeError(f"not a finite element: {d!r}")


@lru_cache(maxsize=1 << 18)
def join(d, e):
    """Least upper bound, or None if d and e have no common upper bound."""
    if d == BOT:
        return e
    if e == BOT or d == e:
        return d
    match d:
        case TopUnit():
            return TOP if e == TOP else None
        case PairFE(a, b):
            if not isinstance(e, PairFE):
                return None
            l, r = join(a, e.left), join(b, e.right)
            return None if l is None or r is None else pair(l, r)
        case InjFE(i, a):
            if not isinstance(e, InjFE) or e.index != i:
                return None
            j = join(a, e.body)
            return None if j is None else inj(i, j)
        case FoldFE(a):
            if not isinstance(e, FoldFE):
                return None
            j = join(a, e.body)
            return None if j is None else fold(j)
        case StepJoin(steps):
            if not isinstance(e, StepJoin):
                return None
            return stepjoin(steps + e.steps)
    raise TypeError(f"not a finite element: {d!r}")


def join_all(ds):
    out = BOT
    for d in ds:
        out = join(out, d)
        if out is None:
            return None
    return out


@lru_cache(maxsize=1 << 18)
def apply_fe(f, a):
    if f == BOT:
        return BOT
    out = BOT
    for d, e in f.steps:
        if leq(d, a):
            out = join(out, e)
    assert out is not None, "step join invariant violated"
    return out


def proj_fe(i, d):
    if d == BOT:
        return BOT
    return d.left if i == 1 else d.right


def unfold_fe(d):
    return BOT if d == BOT else d.body


def fe_size(d) -> int:
    match d:
        case Bot():
            return 0
        case TopUnit():
            return 1
        case PairFE(a, b):
            return 1 + fe_size(a) + fe_size(b)
        case InjFE(_, a):
            return 1 + fe_size(a)
        case FoldFE(a):
            return fe_size(a)
        case StepJoin(steps):
            return sum(1 + fe_size(a) + fe_size(b) for a, b in steps)
    raise TypeError(f"not a finite element: {d!r}")


def has_type(d, t) -> bool:
    if d == BOT:
        return True
    match t:
        case UnitT():
            return d == TOP
        case Prod(a, b):
            return isinstance(d, PairFE) and has_type(d.left, a) and has_type(d.right, b)
        case Sum(a, b):
            return isinstance(d, InjFE) and has_type(d.body, a if d.index == 1 else b)
        case Rec():
            return isinstance(d, FoldFE) and has_type(d.body, unfold_rec(t))
        case Arrow(a, b):
            return isinstance(d, StepJoin) and all(
                has_type(x, a) and has_type(y, b) for x, y in d.steps)
    return False


# ---------------------------------------------------------- enumeration --

_enum_cache: dict = {}


def enumerate_fe(t, r: int) -> list:
    """All finite elements of closed type t of size at most r."""
    return list(_enum(t, r, frozenset()))


def _enum(t, r, busy):
    key = (type_key(t), r)
    if key in _enum_cache:
        return _enum_cache[key]
    if key in busy:
        return (BOT,)
    busy = busy | {key}
    out = [BOT]
    match t:
        case UnitT():
            if r >= 1:
                out.append(TOP)
        case Sum(a, b):
            if r >= 1:
                out += [inj(1, x) for x in _enum(a, r - 1, busy)]
                out += [inj(2, x) for x in _enum(b, r - 1, busy)]
        case Prod(a, b):
            if r >= 1:
                for x in _enum(a, r - 1, busy):
                    for y in _enum(b, r - 1 - fe_size(x), busy):
                        if x != BOT or y != BOT:
                            out.append(pair(x, y))
        case Rec():
            out += [fold(x) for x in _enum(unfold_rec(t), r, busy) if x != BOT]
        case Arrow(a, b):
            out += _enum_arrow(a, b, r, busy)
        case _:
            raise TypeError(f"cannot enumerate open type {t!r}")
    res = tuple(sorted(set(out), key=lambda d: (fe_size(d), str(d))))
    _enum_cache[key] = res
    return res


def _enum_arrow(a, b, r, busy):
    singles = []
    for x in _enum(a, r - 1, busy):
        for y in _enum(b, r - 1 - fe_size(x), busy):
            if y != BOT:
                singles.append(step(x, y))
    seen = set(singles)
    frontier = list(singles)
    while frontier:
        nxt = []
        for f in frontier:
            for s in singles:
                j = join(f, s)
                if j is not None and j not in seen and fe_size(j) <= r:
                    seen.add(j)
                    nxt.append(j)
        frontier = nxt
    return list(seen)


# ---------------------------------------------- formulae <-> elements --

def fe_of_land(f):
    """Finite element d with [[f]] = up(d), or None if [[f]] is empty."""
    match f:
        case TrueF():
            return BOT
        case FalseF():
            return None
        case ModUnit():
            return TOP
        case And(a, b):
            x = fe_of_land(a)
            if x is None:
                return None
            y = fe_of_land(b)
            return None if y is None else join(x, y)
        case Mod(m, b):
            x = fe_of_land(b)
            if x is None:
                return None
            if m == "pi1":
                return pair(x, BOT)
            if m == "pi2":
                return pair(BOT, x)
            if m == "inj1":
                return inj(1, x)
            if m == "inj2":
                return inj(2, x)
            return fold(x)
        case RealTo(a, b):
            x = fe_of_land(a)
            if x is None:
                return BOT
            y = fe_of_land(b)
            return None if y is None else step(x, y)
    raise FragmentError(f"not in the conjunctive fragment: {f!r}")


def land_of_fe(d):
    match d:
        case Bot():
            return T
        case TopUnit():
            return UNIT_MOD
        case PairFE(a, b):
            parts = []
            if a != BOT:
                parts.append(Mod("pi1", land_of_fe(a)))
            if b != BOT:
                parts.append(Mod("pi2", land_of_fe(b)))
            return conj(parts)
        case InjFE(i, a):
            return Mod(f"inj{i}", land_of_fe(a))
        case FoldFE(a):
            return Mod("fold", land_of_fe(a))
        case StepJoin(steps):
            return conj(RealTo(land_of_fe(a), land_of_fe(b)) for a, b in steps)
    raise TypeError(f"not a finite element: {d!r}")


# -------------------------------------------------------- serialization --

def fe_to_json(d):
    match d:
        case Bot():
            return ["bot"]
        case TopUnit():
            return ["top"]
        case PairFE(a, b):
            return ["pair", fe_to_json(a), fe_to_json(b)]
        case InjFE(i, a):
            return ["inj", i, fe_to_json(a)]
        case FoldFE(a):
            return ["fold", fe_to_json(a)]
        case StepJoin(steps):
            return ["steps", [[fe_to_json(a), fe_to_json(b)] for a, b in steps]]
    raise TypeError(f"not a finite element: {d!r}")


def fe_from_json(j):
    tag = j[0]
    if tag == "bot":
        return BOT
    if tag == "top":
        return TOP
    if tag == "pair":
        return pair(fe_from_json(j[1]), fe_from_json(j[2]))
    if tag == "inj":
        return inj(j[1], fe_from_json(j[2]))
    if tag == "fold":
        return fold(fe_from_json(j[1]))
    if tag == "steps":
        out = stepjoin([(fe_from_json(a), fe_from_json(b)) for a, b in j[1]])
        if out is None:
            raise ValueError("inconsistent step join")
        return out
    raise ValueError(f"bad finite element tag {tag!r}")
