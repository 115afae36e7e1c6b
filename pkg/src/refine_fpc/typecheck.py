"""Subtyping, and the fuel-bounded checker for positive judgements.

The checker reduces ``x1 : {t1 | psi1}, ... |- M : {s | phi}`` to finitely
many conjunctive leaf problems:

1. arrows at the top of the goal are moved into the context as fresh
   variables, so the term becomes ``M y1 ... yk``;
2. context formulae are prenexed to one universal each, the goal to one
   existential;
3. the universals are instantiated at m and each context formula is split
   into the minimal finite elements of its disjunctive normal form;
   an empty split discharges the judgement by the False rule;
4. for every tuple of elements, the term with the elements substituted is
   checked against the goal instantiated at p.

Search is iterative deepening along the diagonal of (m, p, fix fuel), with
results cached so that a leaf that once answered Yes is not revisited.
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

from . import domain as D
from .domain import FragmentError, fe_of_land, fe_from_json, fe_to_json, land_of_fe
from .eval import Fuel, Tri, check_le, holds
from .formation import (
    FormationError, PureTypeError, check_pure_term, check_refinement,
    flatten_refinement,
)
from .logic import entail, satisfies
from .normalize import DEFAULT_DNF_CAP, DnfCapExceeded, dnf_elements, to_prenex
from .syntax import (
    App, ArrowR, FinConst, Fix, Fold, Global, Inj, Lam, Pair, Polarity, ProdR, Pure,
    RealTo, UnitI, Var, Arrow, is_closed_type, subst_term, underlying,
    free_vars,
)


# ------------------------------------------------------------ judgements --

@dataclass(frozen=True)
class Judgement:
    context: tuple          # ((name, refinement type), ...)
    term: object
    goal: object

    @classmethod
    def of(cls, decl):
        return cls(tuple(decl.context), decl.term, decl.goal)

    def __str__(self):
        from .parser import print_judgement
        return print_judgement(self.context, self.term, self.goal)


@dataclass(frozen=True)
class FuelSchedule:
    max_m: int = 8
    max_p: int = 8
    fix: tuple = (16, 32, 64, 128, 256)
    dnf_cap: int = DEFAULT_DNF_CAP
    shared_m: bool = True
    time_limit: float | None = None   # seconds, None for no limit

    def __post_init__(self):
        if not self.fix:
            raise ValueError("fix-fuel schedule must not be empty")


@dataclass(frozen=True)
class Leaf:
    indices: tuple          # one index per context entry
    p: int | None           # goal instance (None when the goal has no quantifier)
    fix: int
    gamma: object           # conjunctive formula, the chosen right disjunct


@dataclass(frozen=True)
class Certificate:
    ms: tuple               # instantiation of each context quantifier
    p: int                  # largest goal instance used
    fix: int                # largest fix fuel used
    names: tuple            # context variable names after peeling
    elements: tuple         # per context entry: tuple of finite elements
    leaves: tuple           # Leaf per tuple of elements, in product order
    vacuous: tuple = ()     # context entries whose split is empty

    @property
    def m(self):
        return max(self.ms, default=0)

    def to_json(self):
        from .parser import print_formula
        return {
            "m": self.m,
            "ms": list(self.ms),
            "p": self.p,
            "fix": self.fix,
            "names": list(self.names),
            "elements": [[fe_to_json(d) for d in es] for es in self.elements],
            "vacuous": list(self.vacuous),
            "leaves": [
                {"indices": list(lf.indices), "p": lf.p, "fix": lf.fix,
                 "gamma": print_formula(lf.gamma)}
                for lf in self.leaves],
        }

    @classmethod
    def from_json(cls, j):
        from .parser import parse_formula, SourceFile
        empty = SourceFile()
        return cls(
            tuple(j["ms"]), j["p"], j["fix"], tuple(j["names"]),
            tuple(tuple(fe_from_json(d) for d in es) for es in j["elements"]),
            tuple(Leaf(tuple(lf["indices"]), lf["p"], lf["fix"],
                       parse_formula(lf["gamma"], empty)) for lf in j["leaves"]),
            tuple(j.get("vacuous", ())),
        )


@dataclass(frozen=True)
class Derived:
    certificate: Certificate
    stages: int = 0
    seconds: float = 0.0

    name = "Derived"


@dataclass(frozen=True)
class FuelExhausted:
    m: int
    p: int
    fix: int
    reason: str = ""
    stages: int = 0
    seconds: float = 0.0

    name = "FuelExhausted"


@dataclass(frozen=True)
class IllFormed:
    reason: str

    name = "IllFormed"


def verdict_to_json(v) -> dict:
    out = {"verdict": v.name}
    match v:
        case Derived(c, stages, secs):
            out.update(certificate=c.to_json(), stages=stages, seconds=round(secs, 3))
        case FuelExhausted(m, p, fix, reason, stages, secs):
            out.update(deepest={"m": m, "p": p, "fix": fix}, reason=reason,
                       stages=stages, seconds=round(secs, 3))
        case IllFormed(reason):
            out.update(reason=reason)
    return out


# ------------------------------------------------------------- subtyping --

class UndecidableLeaf(ValueError):
    pass


def subtype(r, s) -> bool:
    """r <= s for refinement types over the same pure type.

    Structural on products and arrows; other cases flatten both sides and
    decide the entailment of the formulae.
    """
    if not _same_type(underlying(r), underlying(s)):
        raise ValueError("subtyping between different pure types")
    if isinstance(s, Pure):
        return True
    match r, s:
        case (ProdR(a, b), ProdR(c, e)):
            if subtype(a, c) and subtype(b, e):
                return True
        case (ArrowR(a, b), ArrowR(c, e)):
            if subtype(c, a) and subtype(b, e):
                return True
    _, psi = flatten_refinement(r)
    _, phi = flatten_refinement(s)
    try:
        return entail(psi, phi)
    except FragmentError as e:
        raise UndecidableLeaf(str(e)) from None


def _same_type(a, b):
    from .syntax import alpha_eq_type
    return alpha_eq_type(a, b)


# ------------------------------------------------------- preparation --

@dataclass
class _Problem:
    names: list
    types: list
    prenex: list           # PrenexForm per context entry (universal or none)
    term: object
    goal_type: object
    goal: object           # PrenexForm (existential or none)


def well_formed(j: Judgement):
    """None if j is a well-formed positive judgement, else the reason."""
    names = [x for x, _ in j.context]
    if len(set(names)) != len(names):
        return "duplicate variable in context"
    for x, r in j.context:
        t = underlying(r)
        if not is_closed_type(t):
            return f"type of {x} is not closed"
        try:
            check_refinement(r, Polarity.NEG)
        except FormationError as e:
            return f"context entry {x} is not negative: {e}"
    if not is_closed_type(underlying(j.goal)):
        return "goal type is not closed"
    try:
        check_refinement(j.goal, Polarity.POS)
    except FormationError as e:
        return f"goal is not positive: {e}"
    extra = free_vars(j.term) - set(names)
    if extra:
        return f"free variables not in context: {', '.join(sorted(extra))}"
    try:
        check_pure_term({x: underlying(r) for x, r in j.context}, j.term, underlying(j.goal))
    except PureTypeError as e:
        return f"term is not of the underlying type: {e}"
    return None


def _prepare(j: Judgement) -> _Problem:
    names, types, forms = [], [], []
    for x, r in j.context:
        t, f = flatten_refinement(r)
        names.append(x)
        types.append(t)
        forms.append(f)
    m = j.term
    gt, gf = flatten_refinement(j.goal)
    # top-level arrows of the goal become context entries
    k = 0
    while isinstance(gf, RealTo) and isinstance(gt, Arrow):
        y = f"arg'{k}"
        while y in names:
            k += 1
            y = f"arg'{k}"
        names.append(y)
        types.append(gt.dom)
        forms.append(gf.left)
        m = App(m, Var(y))
        gt, gf = gt.cod, gf.right
        k += 1
    prenex = [to_prenex(f, Polarity.NEG) for f in forms]
    return _Problem(names, types, prenex, m, gt, to_prenex(gf, Polarity.POS))


def _instance(pf, n):
    return pf.at(n) if pf.kind is not None else pf.body


def _leaf_term(prob, elems):
    m = prob.term
    for x, t, d in zip(prob.names, prob.types, elems):
        m = subst_term(m, x, FinConst(d, t))
    return m


# --------------------------------------------------------------- search --

def _m_vectors(prob, level, shared):
    n = len(prob.names)
    quant = [i for i, pf in enumerate(prob.prenex) if pf.kind is not None]
    if not quant:
        return [(0,) * n] if level == 0 else []
    if shared:
        return [tuple(level if i in quant else 0 for i in range(n))]
    out = []
    for vec in itertools.product(range(level + 1), repeat=len(quant)):
        if max(vec) == level:
            full = [0] * n
            for i, v in zip(quant, vec):
                full[i] = v
            out.append(tuple(full))
    return out


def _split(prob, ms, cap):
    return [tuple(dnf_elements(_instance(pf, m), cap)) for pf, m in zip(prob.prenex, ms)]


def check_judgement(j: Judgement, schedule: FuelSchedule = None, progress=None):
    """Search for a certificate of j; returns Derived, FuelExhausted or IllFormed."""
    schedule = schedule or FuelSchedule()
    reason = well_formed(j)
    if reason:
        return IllFormed(reason)
    try:
        prob = _prepare(j)
    except FragmentError as e:
        return IllFormed(str(e))
    start = time.monotonic()
    goal_q = prob.goal.kind is not None
    max_p = schedule.max_p if goal_q else 0
    fixes = schedule.fix
    K = len(fixes)
    max_level = max(schedule.max_m, 0) if any(pf.kind for pf in prob.prenex) else 0

    splits = {}        # ms -> element lists (or the cap error)
    done = {}          # (ms, indices) -> Leaf
    tried = {}         # (ms, indices) -> list of (p, k) that were not Yes
    deepest = (0, 0, fixes[0])
    note = ""
    stages = 0
    cap_level = None
    for s in range(max_level + max_p + K):
        for level in range(min(s, max_level) + 1):
            for k in range(min(s - level, K - 1) + 1):
                p = s - level - k
                if p > max_p:
                    continue
                for ms in _m_vectors(prob, level, schedule.shared_m):
                    if schedule.time_limit is not None and \
                            time.monotonic() - start > schedule.time_limit:
                        return FuelExhausted(*deepest, "time limit reached", stages,
                                             time.monotonic() - start)
                    stages += 1
                    deepest = max(deepest, (level, p, fixes[k]))
                    if progress:
                        progress(f"stage m={level} p={p} fix={fixes[k]}")
                    if cap_level is not None and level >= cap_level:
                        continue
                    if ms not in splits:
                        try:
                            splits[ms] = _split(prob, ms, schedule.dnf_cap)
                        except DnfCapExceeded as e:
                            splits[ms] = e
                    sp = splits[ms]
                    if isinstance(sp, DnfCapExceeded):
                        # splits only grow with m
                        note = f"DNF cap {sp.cap} exceeded at m={level}"
                        if schedule.shared_m:
                            cap_level = level
                        continue
                    cert = _attempt(prob, ms, sp, p if goal_q else None, fixes[k],
                                    done, tried, schedule.dnf_cap)
                    if cert is not None:
                        return Derived(cert, stages, time.monotonic() - start)
    return FuelExhausted(*deepest, note or "schedule exhausted", stages,
                         time.monotonic() - start)


def _attempt(prob, ms, sp, p, fix, done, tried, cap):
    vacuous = tuple(i for i, es in enumerate(sp) if not es)
    if vacuous:
        return Certificate(ms, 0, 0, tuple(prob.names), tuple(sp), (), vacuous)
    total = 1
    for es in sp:
        total *= len(es)
    if total > cap:
        return None
    leaves = []
    ok = True
    for idx in itertools.product(*[range(len(es)) for es in sp]):
        key = (ms, idx)
        if key in done:
            leaves.append(done[key])
            continue
        if ok is False:
            continue
        k_fix = fix
        prior = tried.setdefault(key, [])
        if any(pp >= (p or 0) and ff >= fix for pp, ff in prior):
            ok = False
            continue
        elems = [es[i] for es, i in zip(sp, idx)]
        leaf = _check_leaf(prob, elems, idx, p, k_fix, prior)
        if leaf is None:
            prior.append((p or 0, fix))
            ok = False
            continue
        done[key] = leaf
        leaves.append(leaf)
    if not ok:
        return None
    return Certificate(ms, max((lf.p or 0 for lf in leaves), default=0),
                       max((lf.fix for lf in leaves), default=0),
                       tuple(prob.names), tuple(sp), tuple(leaves))


def _check_leaf(prob, elems, idx, p, fix, prior):
    m = _leaf_term(prob, elems)
    if p is None:
        r = holds(m, prob.goal.body, fuel=Fuel(fix, 0))
        return Leaf(idx, None, fix, r.gamma) if r.verdict is Tri.YES else None
    # instances already refuted at this fix fuel need not be retried
    lo = 1 + max((pp for pp, ff in prior if ff >= fix), default=-1)
    for n in range(lo, p + 1):
        r = holds(m, prob.goal.at(n), fuel=Fuel(fix, 0))
        if r.verdict is Tri.YES:
            return Leaf(idx, n, fix, r.gamma)
    return None


# --------------------------------------------------------------- replay --

def replay(c: Certificate, j: Judgement, cap: int = DEFAULT_DNF_CAP) -> bool:
    """Re-verify c against j without any search."""
    if well_formed(j):
        return False
    try:
        prob = _prepare(j)
    except FragmentError:
        return False
    if tuple(prob.names) != tuple(c.names) or len(c.ms) != len(prob.names):
        return False
    for pf, m in zip(prob.prenex, c.ms):
        if pf.kind is None and m != 0:
            return False
    try:
        sp = _split(prob, c.ms, cap)
    except DnfCapExceeded:
        return False
    if [set(es) for es in sp] != [set(es) for es in c.elements]:
        return False
    if c.vacuous:
        return all(not c.elements[i] for i in c.vacuous)
    by_idx = {lf.indices: lf for lf in c.leaves}
    for idx in itertools.product(*[range(len(es)) for es in c.elements]):
        lf = by_idx.get(idx)
        if lf is None:
            return False
        elems = [es[i] for es, i in zip(c.elements, idx)]
        target = fe_of_land(lf.gamma)
        if target is None:
            return False
        goal = prob.goal.body if lf.p is None else prob.goal.at(lf.p)
        if prob.goal.kind is not None and lf.p is None:
            return False
        if not satisfies(target, goal):
            return False
        if check_le(_leaf_term(prob, elems), target, Fuel(lf.fix, 0)) is not Tri.YES:
            return False
    return True


# ------------------------------------------------------ derivation sketch --

@dataclass
class SketchNode:
    rule: str
    claim: str
    children: list = field(default_factory=list)
    note: str = ""

    def lines(self, indent=0):
        pad = "  " * indent
        head = f"{pad}[{self.rule}] {self.claim}"
        if self.note:
            head += f"   -- {self.note}"
        out = [head]
        for ch in self.children:
            out += ch.lines(indent + 1)
        return out

    def __str__(self):
        return "\n".join(self.lines())

    def to_json(self):
        return {"rule": self.rule, "claim": self.claim, "note": self.note,
                "children": [c.to_json() for c in self.children]}

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()


def derivation_sketch(j: Judgement, c: Certificate) -> SketchNode:
    """Human-readable sketch of the typing derivation behind a certificate."""
    from .parser import print_formula, print_type
    prob = _prepare(j)
    root = SketchNode("goal", str(j))
    cur = root
    peeled = [x for x in prob.names if x.startswith("arg'")]
    for x in peeled:
        node = SketchNode("->I", f"abstract over {x}", note="arrow moved into the context")
        cur.children.append(node)
        cur = node
    for x, pf, m in zip(prob.names, prob.prenex, c.ms):
        if pf.kind is not None:
            node = SketchNode(
                "subsumption", f"{x} : {print_formula(pf.formula())} <= {print_formula(pf.at(m))}",
                note=f"forall-L instantiated at m={m}")
            cur.children.append(node)
            cur = node
    if c.vacuous:
        for i in c.vacuous:
            cur.children.append(SketchNode(
                "False", f"{prob.names[i]} : {{{print_type(prob.types[i])} | F}}",
                note="context formula has no consistent disjunct"))
        return root
    split = SketchNode("or-L", f"{len(c.leaves)} disjunct tuple(s)",
                       note="split of the context formulae into conjunctive disjuncts")
    cur.children.append(split)
    for lf in c.leaves:
        elems = [es[i] for es, i in zip(c.elements, lf.indices)]
        ctx = {x: d for x, d in zip(prob.names, elems)}
        goal = prob.goal.body if lf.p is None else prob.goal.at(lf.p)
        leaf = SketchNode("subsumption", f"{print_formula(lf.gamma)} |- goal instance",
                          note="" if lf.p is None else f"exists-R witness p={lf.p}")
        if prob.goal.kind is not None:
            leaf = SketchNode("subsumption", f"{print_formula(goal)} |- {print_formula(prob.goal.formula())}",
                              [leaf], note=f"exists-R at p={lf.p}")
        tgt = fe_of_land(lf.gamma)
        target_node = leaf if not leaf.children else leaf.children[0]
        target_node.children.append(_sketch(prob.term, tgt, ctx, prob, lf.fix))
        claim = ", ".join(f"{x} : {print_formula(land_of_fe(d))}" for x, d in ctx.items())
        split.children.append(SketchNode("tuple", claim or "(empty context)", [leaf]))
    return root


def _sketch(m, e, ctx, prob, fix) -> SketchNode:
    from .parser import print_formula, print_term
    claim = f"{print_term(m)} : {print_formula(land_of_fe(e))}"
    if e == D.BOT:
        return SketchNode("T-intro", claim)
    match m:
        case UnitI():
            return SketchNode("unit", claim)
        case Inj(i, b) if isinstance(e, D.InjFE) and e.index == i:
            return SketchNode(f"inj{i}", claim, [_sketch(b, e.body, ctx, prob, fix)])
        case Fold(b) if isinstance(e, D.FoldFE):
            return SketchNode("fold", claim, [_sketch(b, e.body, ctx, prob, fix)])
        case Pair(a, b) if isinstance(e, D.PairFE):
            return SketchNode("pair", claim, [_sketch(a, e.left, ctx, prob, fix),
                                             _sketch(b, e.right, ctx, prob, fix)])
        case Lam(x, b) if isinstance(e, D.StepJoin):
            kids = []
            for d, r in e.steps:
                kids.append(SketchNode(
                    "->I", f"assume {x} : {print_formula(land_of_fe(d))}",
                    [_sketch(b, r, {**ctx, x: d}, prob, fix)]))
            return SketchNode("and-I" if len(kids) > 1 else "->I-steps", claim, kids)
        case Var(x) if x in ctx:
            return SketchNode("subsumption", claim, [SketchNode(
                "ctx", f"{x} : {print_formula(land_of_fe(ctx[x]))}")],
                note="entailment of conjunctive formulae")
        case App(Lam(x, b), Var(y)) if y in ctx:
            return SketchNode("beta", claim, [_sketch(subst_term(b, x, Var(y)), e, ctx, prob, fix)],
                              note=f"-> rule for the abstraction applied to {y}")
        case App(Global(_, body, _), Var(y)) if y in ctx and not free_vars(body):
            return _sketch(App(body, Var(y)), e, ctx, prob, fix)
        case Global(name, body, _) if not free_vars(body):
            return SketchNode("def", claim, [_sketch(body, e, ctx, prob, fix)],
                              note=f"unfold the definition of {name}")
        case Fix(x, _):
            k = _min_fix(_close(m, ctx, prob), e, fix)
            note = f"k={k}: phi_0 = T, ..., phi_{k} = {print_formula(land_of_fe(e))}"
            return SketchNode("fix", claim, note=note)
    return SketchNode("semantic", claim, note="conjunctive leaf, checked on finite elements")


def _close(m, ctx, prob):
    types = dict(zip(prob.names, prob.types))
    for x, d in ctx.items():
        if x in types:
            m = subst_term(m, x, FinConst(d, types[x]))
    return m


def _min_fix(m, e, cap):
    if free_vars(m):
        return None
    for k in range(cap + 1):
        if check_le(m, e, Fuel(k, 0)) is Tri.YES:
            return k
    return None
