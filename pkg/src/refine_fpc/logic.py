"""Decision procedures for the decidable fragments: membership of finite
elements, entailment between conjunctive and between closed neutral
formulae, and the consistency predicate with checkable derivations."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import domain as D
from .domain import FragmentError, fe_of_land
from .formation import in_land
from .normalize import land_normal, to_dnf, to_omega, TriviallyTrue
from .syntax import (
    And, Exists, F, FalseF, FinMu, FinNu, FixVar, Forall, Mod, ModUnit, Or,
    RealTo, T, TrueF, conj, conjuncts, ivar_value,
)


# ----------------------------------------------------------- membership --

def member(x, f) -> bool:
    """x in [[f]] for a closed neutral f, through its normal form."""
    for delta in to_dnf(to_omega(f)):
        d = fe_of_land(delta)
        if d is not None and D.leq(d, x):
            return True
    return False


def satisfies(x, f, nu=None, qbound=None) -> bool:
    """Structural x in [[f]], evaluated clause by clause on the element.

    Independent of the normal-form pipeline; used as a second oracle.
    Quantifiers are only accepted with an explicit search bound.
    """
    return _sat(x, f, {}, dict(nu or {}), qbound)


def _sat(x, f, env, nu, qb):
    match f:
        case TrueF():
            return True
        case FalseF():
            return False
        case ModUnit():
            return x == D.TOP
        case And(a, b):
            return _sat(x, a, env, nu, qb) and _sat(x, b, env, nu, qb)
        case Or(a, b):
            return _sat(x, a, env, nu, qb) or _sat(x, b, env, nu, qb)
        case Mod("pi1", b):
            return _sat(D.proj_fe(1, x), b, env, nu, qb)
        case Mod("pi2", b):
            return _sat(D.proj_fe(2, x), b, env, nu, qb)
        case Mod("fold", b):
            return _sat(D.unfold_fe(x), b, env, nu, qb)
        case Mod(m, b):
            i = int(m[-1])
            return isinstance(x, D.InjFE) and x.index == i and _sat(x.body, b, env, nu, qb)
        case FixVar(v):
            kind, n, body, benv = env[v]
            if n == 0:
                return kind == "nu"
            return _sat(x, body, {**benv, v: (kind, n - 1, body, benv)}, nu, qb)
        case FinMu(t, v, b) | FinNu(t, v, b):
            kind = "mu" if isinstance(f, FinMu) else "nu"
            n = ivar_value(t, nu)
            return _sat(x, FixVar(v), {**env, v: (kind, n, b, env)}, nu, qb)
        case Exists(i, b):
            if qb is None:
                raise FragmentError("quantifier without a search bound")
            return any(_sat(x, b, env, {**nu, i: n}, qb) for n in range(qb + 1))
        case Forall(i, b):
            if qb is None:
                raise FragmentError("quantifier without a search bound")
            return all(_sat(x, b, env, {**nu, i: n}, qb) for n in range(qb + 1))
        case RealTo(a, b):
            return all(_sat(D.apply_fe(x, m), b, {}, nu, qb) for m in _mins(a, {}, nu))
    raise FragmentError(f"not a formula: {f!r}")


def _antichain(ds):
    out = []
    for d in sorted(set(ds), key=D.fe_size):
        if not any(D.leq(e, d) for e in out):
            out.append(d)
    return out


def _mins(f, env, nu):
    """Minimal elements of [[f]] (finite for closed neutral f)."""
    match f:
        case TrueF():
            return [D.BOT]
        case FalseF():
            return []
        case ModUnit():
            return [D.TOP]
        case And(a, b):
            js = [D.join(x, y) for x in _mins(a, env, nu) for y in _mins(b, env, nu)]
            return _antichain(j for j in js if j is not None)
        case Or(a, b):
            return _antichain(_mins(a, env, nu) + _mins(b, env, nu))
        case Mod("pi1", b):
            return [D.pair(x, D.BOT) for x in _mins(b, env, nu)]
        case Mod("pi2", b):
            return [D.pair(D.BOT, x) for x in _mins(b, env, nu)]
        case Mod("fold", b):
            return [D.fold(x) for x in _mins(b, env, nu)]
        case Mod(m, b):
            return [D.inj(int(m[-1]), x) for x in _mins(b, env, nu)]
        case FixVar(v):
            kind, n, body, benv = env[v]
            if n == 0:
                return [] if kind == "mu" else [D.BOT]
            return _mins(body, {**benv, v: (kind, n - 1, body, benv)}, nu)
        case FinMu(t, v, b) | FinNu(t, v, b):
            kind = "mu" if isinstance(f, FinMu) else "nu"
            return _mins(FixVar(v), {**env, v: (kind, ivar_value(t, nu), b, env)}, nu)
        case RealTo(a, b):
            lows = _mins(a, {}, nu)
            if not lows:
                return [D.BOT]
            highs = _mins(b, {}, nu)
            out = []
            for choice in itertools.product(highs, repeat=len(lows)):
                s = D.stepjoin(list(zip(lows, choice)))
                if s is not None:
                    out.append(s)
            return _antichain(out)
    raise FragmentError(f"not a closed neutral formula: {f!r}")


# ----------------------------------------------------------- entailment --

def entail_land(psi, phi) -> bool:
    if not (in_land(psi) and in_land(phi)):
        raise FragmentError("entail_land expects two conjunctive formulae")
    a = fe_of_land(psi)
    if a is None:
        return True
    b = fe_of_land(phi)
    if b is None:
        return False
    return D.leq(b, a)


def entail_closed_neutral(psi, phi) -> bool:
    for delta in to_dnf(to_omega(psi)):
        d = fe_of_land(delta)
        if d is not None and not member(d, phi):
            return False
    return True


def entail(psi, phi) -> bool:
    if in_land(psi) and in_land(phi):
        return entail_land(psi, phi)
    return entail_closed_neutral(psi, phi)


# ---------------------------------------------------------- consistency --

@dataclass
class ConsistencyDerivation:
    rule: str
    conclusion: object
    premises: list = field(default_factory=list)
    # arrow rule: subset (tuple of indices) -> "false" or a derivation
    branches: dict = field(default_factory=dict)

    def lines(self, indent=0):
        from .parser import print_formula
        pad = "  " * indent
        out = [f"{pad}{self.rule}: C({print_formula(self.conclusion)})"]
        for p in self.premises:
            out += p.lines(indent + 1)
        for j, b in self.branches.items():
            label = "{" + ",".join(str(i + 1) for i in j) + "}"
            if b == "false":
                out.append(f"{pad}  J={label}: premises entail F")
            else:
                out.append(f"{pad}  J={label}:")
                out += b.lines(indent + 2)
        return out

    def to_text(self):
        return "\n".join(self.lines())

    def to_json(self):
        from .parser import print_formula
        out = {"rule": self.rule, "conclusion": print_formula(self.conclusion),
               "premises": [p.to_json() for p in self.premises]}
        if self.branches:
            out["branches"] = [
                {"subset": [i + 1 for i in j],
                 "result": "false" if b == "false" else b.to_json()}
                for j, b in self.branches.items()]
        return out


@dataclass
class Refuted:
    core: object

    def to_text(self):
        from .parser import print_formula
        return f"refuted: {print_formula(self.core)} is inconsistent"

    def to_json(self):
        from .parser import print_formula
        return {"refuted": print_formula(self.core)}


def consistency(delta):
    if not in_land(delta):
        raise FragmentError("consistency expects a conjunctive formula")
    if fe_of_land(delta) is None:
        return Refuted(_core(delta))
    return _derive(delta)


def _core(delta):
    cs = conjuncts(delta)
    i = 0
    while i < len(cs):
        rest = cs[:i] + cs[i + 1:]
        if rest and fe_of_land(conj(rest)) is None:
            cs = rest
        else:
            i += 1
    return conj(cs)


def _arrow_conjuncts(f):
    cs = conjuncts(f)
    if all(isinstance(c, RealTo) for c in cs):
        return cs
    return None


def _derive(f):
    match f:
        case TrueF():
            return ConsistencyDerivation("C-true", f)
        case ModUnit():
            return ConsistencyDerivation("C-unit", f)
        case Mod("fold", b):
            return ConsistencyDerivation("C-fold", f, [_derive(b)])
        case Mod("inj1", b) | Mod("inj2", b):
            return ConsistencyDerivation(f"C-{f.mod}", f, [_derive(b)])
        case And(Mod("pi1", a), Mod("pi2", b)):
            return ConsistencyDerivation("C-pair", f, [_derive(a), _derive(b)])
    cs = _arrow_conjuncts(f)
    if cs is not None and all(fe_of_land(c.left) is not None for c in cs):
        prem = []
        for c in cs:
            prem += [_derive(c.left), _derive(c.right)]
        branches = {}
        for k in range(len(cs) + 1):
            for js in itertools.combinations(range(len(cs)), k):
                lhs = conj(cs[j].left for j in js)
                if fe_of_land(lhs) is None:
                    branches[js] = "false"
                else:
                    branches[js] = _derive(conj(cs[j].right for j in js))
        return ConsistencyDerivation("C-arrow", f, prem, branches)
    shape = land_normal(f)
    if isinstance(shape, TriviallyTrue):
        canon = T
    elif cs is not None:
        canon = conj(c for c in cs if fe_of_land(c.left) is not None)
    else:
        canon = shape.formula()
    return ConsistencyDerivation("C-closure", f, [_derive(canon)])


def check_consistency_derivation(node) -> bool:
    """Re-check every node against the rule schemas."""
    f = node.conclusion
    kids = node.premises
    ok_kids = all(check_consistency_derivation(k) for k in kids)
    match node.rule:
        case "C-true":
            return isinstance(f, TrueF) and not kids
        case "C-unit":
            return isinstance(f, ModUnit) and not kids
        case "C-fold" | "C-inj1" | "C-inj2":
            m = node.rule[2:]
            return (isinstance(f, Mod) and f.mod == m and len(kids) == 1
                    and kids[0].conclusion == f.body and ok_kids)
        case "C-pair":
            return (isinstance(f, And) and isinstance(f.left, Mod) and f.left.mod == "pi1"
                    and isinstance(f.right, Mod) and f.right.mod == "pi2" and len(kids) == 2
                    and kids[0].conclusion == f.left.body
                    and kids[1].conclusion == f.right.body and ok_kids)
        case "C-closure":
            return (len(kids) == 1 and ok_kids and in_land(f)
                    and entail_land(kids[0].conclusion, f))
        case "C-arrow":
            cs = _arrow_conjuncts(f)
            if cs is None or len(kids) != 2 * len(cs) or not ok_kids:
                return False
            for i, c in enumerate(cs):
                if kids[2 * i].conclusion != c.left or kids[2 * i + 1].conclusion != c.right:
                    return False
            for k in range(len(cs) + 1):
                for js in itertools.combinations(range(len(cs)), k):
                    b = node.branches.get(js)
                    if b is None:
                        return False
                    if b == "false":
                        if not entail_land(conj(cs[j].left for j in js), F):
                            return False
                    elif b.conclusion != conj(cs[j].right for j in js) or \
                            not check_consistency_derivation(b):
                        return False
            return True
    return False


# ------------------------------------------------- sequent soundness --

@dataclass(frozen=True)
class SequentInstance:
    rule: str
    left: object
    right: object
    type: object


def rule_instances(t, atoms, mod=None) -> list:
    """Instances of the axiom schemas of the deduction system at type t.

    atoms: closed neutral formulae at t (at least three are used). mod, if
    given, is a modality valid at t with atoms at its argument type.
    """
    a, b, c = atoms[:3]
    out = [
        SequentInstance("refl", a, a, t),
        SequentInstance("D", And(a, Or(b, c)), Or(And(a, b), And(a, c)), t),
        SequentInstance("D-converse", Or(And(a, b), And(a, c)), And(a, Or(b, c)), t),
        SequentInstance("dual-D", Or(a, And(b, c)), And(Or(a, b), Or(a, c)), t),
        SequentInstance("and-elim", And(a, b), a, t),
        SequentInstance("or-intro", a, Or(a, b), t),
        SequentInstance("F-left", F, a, t),
        SequentInstance("T-right", a, T, t),
    ]
    if mod is not None:
        m, mt = mod
        out += [
            SequentInstance("mod-and", And(Mod(m, a), Mod(m, b)), Mod(m, And(a, b)), mt),
            SequentInstance("mod-or", Mod(m, Or(a, b)), Or(Mod(m, a), Mod(m, b)), mt),
            SequentInstance("mod-F", Mod(m, F), F, mt),
        ]
        if m not in ("inj1", "inj2"):
            out.append(SequentInstance("mod-T", T, Mod(m, T), mt))
    return out


def realto_instances(dom, cod, lefts, rights) -> list:
    """Instances of the realizability rules at dom -> cod.

    lefts: closed neutral formulae at dom (first one conjunctive);
    rights: closed neutral formulae at cod.
    """
    from .syntax import Arrow
    t = Arrow(dom, cod)
    p1, p2 = lefts[:2]
    f1, f2 = rights[:2]
    out = [
        SequentInstance("~>/and", And(RealTo(p1, f1), RealTo(p1, f2)), RealTo(p1, And(f1, f2)), t),
        SequentInstance("T~>", T, RealTo(p1, T), t),
        SequentInstance("or/~>", And(RealTo(p1, f1), RealTo(p2, f1)), RealTo(Or(p1, p2), f1), t),
        SequentInstance("F~>", T, RealTo(F, f1), t),
    ]
    if in_land(p1):
        out.append(SequentInstance("~>/or", RealTo(p1, Or(f1, f2)),
                                   Or(RealTo(p1, f1), RealTo(p1, f2)), t))
        if fe_of_land(p1) is not None:
            out.append(SequentInstance("C", RealTo(p1, F), F, t))
    return out


def injection_clash(phi=T, psi=T):
    return And(Mod("inj1", phi), Mod("inj2", psi))


def check_derived_sequent_soundness(instances, rank=3) -> list:
    """Counterexamples (instance, element) among enumerated elements."""
    bad = []
    for inst in instances:
        for x in D.enumerate_fe(inst.type, rank):
            if member(x, inst.left) and not member(x, inst.right):
                bad.append((inst, x))
                break
    return bad
