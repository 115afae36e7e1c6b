"""Concrete syntax: lexer, recursive-descent parser, pretty-printers and the
``.fpc`` source-file format.

Precedence, loosest first:

    formulae   binders (mu^t X. / nu^t X. / exists i. / forall i.)  <  ~>  <  \\/  <  /\\  <  <mod>
    terms      binders (\\x. / fix x. / case / if)  <  ::  <  application  <  prefix keywords
    types      mu t.  <  ->  <  +  <  *

``~>``, ``->``, ``+``, ``*`` and ``::`` associate to the right; ``/\\`` and
``\\/`` and application to the left. Binders extend as far right as possible.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources

from .syntax import (
    And, App, Arrow, ArrowR, Case, Exists, F, FalseF, FinConst, FinMu, FinNu,
    Fix, FixVar, Fold, Forall, Global, Inj, IVar, Lam, Mod, ModUnit, Or, Pair,
    Polarity, Prod, ProdR, Proj, Pure, Rec, RealTo, Refine, Sum, T, TrueF,
    TyVar, UNIT, UNIT_I, UNIT_MOD, Unfold, UnitI, UnitT, Var,
    mods, numeral, split_iter, subst_formula, subst_type,
)


class ParseError(ValueError):
    def __init__(self, message, span=None, text=None):
        self.message = message
        self.span = span
        self.line = self.col = None
        if span is not None and text is not None:
            self.line = text.count("\n", 0, span[0]) + 1
            self.col = span[0] - (text.rfind("\n", 0, span[0]) + 1) + 1
        where = f"{self.line}:{self.col}: " if self.line else ""
        super().__init__(where + message)


# ---------------------------------------------------------------- lexer --

_SYMS = [";;", "::", "|-", "->", "~>", "/\\", "\\/", "<()>", "<>",
         "\\", "λ", ".", ",", "(", ")", "<", ">", "{", "}", "|", "=", "*",
         "+", "-", "^", ":", "±"]
_TOKEN = re.compile(
    r"(?P<ws>\s+|--[^\n]*)|(?P<num>\d+)|(?P<id>[A-Za-z_][A-Za-z0-9_']*)|(?P<sym>"
    + "|".join(re.escape(s) for s in _SYMS) + ")")

KEYWORDS = {
    "fix", "fold", "unfold", "inj1", "inj2", "pi1", "pi2", "case", "of",
    "if", "then", "else", "Unit", "mu", "nu", "exists", "forall", "T", "F",
    "type", "term", "formula", "judgement",
}


@dataclass(frozen=True)
class Tok:
    kind: str  # "num", "id", "sym", "eof"
    value: str
    start: int
    end: int


def tokenize(text: str) -> list:
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", (pos, pos + 1), text)
        if m.lastgroup != "ws":
            out.append(Tok(m.lastgroup, m.group(), m.start(), m.end()))
        pos = m.end()
    out.append(Tok("eof", "", len(text), len(text)))
    return out


# ---------------------------------------------------------- declarations --

@dataclass(frozen=True)
class TypeDecl:
    name: str
    params: tuple
    type: object
    span: tuple


@dataclass(frozen=True)
class TermDecl:
    name: str
    type: object
    body: object
    span: tuple

    @property
    def ref(self):
        return Global(self.name, self.body, self.type)


@dataclass(frozen=True)
class FormulaDecl:
    name: str
    sign: Polarity
    type: object
    formula: object
    span: tuple


@dataclass(frozen=True)
class MacroDecl:
    name: str
    params: tuple
    body: object
    span: tuple


@dataclass(frozen=True)
class JudgementDecl:
    name: str
    context: tuple  # ((var, refinement type), ...)
    term: object
    goal: object
    span: tuple


@dataclass
class SourceFile:
    decls: list = field(default_factory=list)
    types: dict = field(default_factory=dict)
    terms: dict = field(default_factory=dict)
    formulas: dict = field(default_factory=dict)
    macros: dict = field(default_factory=dict)
    judgements: dict = field(default_factory=dict)

    def copy(self):
        return SourceFile([], dict(self.types), dict(self.terms), dict(self.formulas),
                          dict(self.macros), dict(self.judgements))

    def term(self, name):
        return self.terms[name].ref

    def formula(self, name):
        return self.formulas[name].formula


# composite modalities: name -> path of primitive modalities
COMPOSITE = {
    "hd": "fold pi1", "tl": "fold pi2", "next": "fold pi2",
    "lbl": "fold pi1", "lft": "fold pi2 pi1", "rgt": "fold pi2 pi2",
    "rght": "fold pi2 pi2", "succ": "fold inj2",
}
CONSTANTS = {
    "true": Mod("inj1", UNIT_MOD),
    "false": Mod("inj2", UNIT_MOD),
    "zero": mods("fold inj1", UNIT_MOD),
}
PRIMITIVE = {"pi1", "pi2", "inj1", "inj2", "fold"}


# --------------------------------------------------------------- parser --

class _Parser:
    def __init__(self, text, scope: SourceFile):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.scope = scope

    # token helpers
    @property
    def tok(self):
        return self.toks[self.i]

    def peek(self, k=1):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, *values):
        t = self.tok
        return t.kind in ("sym", "id") and t.value in values

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return ParseError(msg, (tok.start, tok.end), self.text)

    def advance(self):
        t = self.tok
        self.i += 1
        return t

    def expect(self, value):
        if not self.at(value):
            found = self.tok.value or "end of input"
            raise self.error(f"expected {value!r}, found {found!r}")
        return self.advance()

    def ident(self, what="identifier"):
        t = self.tok
        if t.kind != "id" or t.value in KEYWORDS:
            raise self.error(f"expected {what}, found {t.value or 'end of input'!r}")
        self.advance()
        return t.value

    def number(self):
        t = self.tok
        if t.kind != "num":
            raise self.error(f"expected a number, found {t.value or 'end of input'!r}")
        self.advance()
        return int(t.value)

    def done(self):
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.value!r}")

    # --------------------------------------------------------- types --
    # Types parse into either a PureType or (when refine is on and a
    # refinement appears below) a RefinementType.

    def type_(self, tv, schematic=False, refine=False):
        if self.at("mu"):
            tok = self.advance()
            v = self.ident("type variable")
            self.expect(".")
            body = self.type_(tv | {v}, schematic, refine)
            self._no_refine(body, tok, "a recursive type")
            return Rec(v, body)
        left = self.sum_(tv, schematic, refine)
        if self.at("->"):
            self.advance()
            right = self.type_(tv, schematic, refine)
            if _is_rt(left) or _is_rt(right):
                return ArrowR(_rt(left), _rt(right))
            return Arrow(left, right)
        return left

    def sum_(self, tv, schematic, refine):
        tok = self.tok
        left = self.prod_(tv, schematic, refine)
        if self.at("+"):
            self.advance()
            right = self.sum_(tv, schematic, refine)
            self._no_refine(left, tok, "a sum")
            self._no_refine(right, tok, "a sum")
            return Sum(left, right)
        return left

    def prod_(self, tv, schematic, refine):
        left = self.tapp(tv, schematic, refine)
        if self.at("*"):
            self.advance()
            right = self.prod_(tv, schematic, refine)
            if _is_rt(left) or _is_rt(right):
                return ProdR(_rt(left), _rt(right))
            return Prod(left, right)
        return left

    def tapp(self, tv, schematic, refine):
        t = self.tok
        if t.kind == "id" and t.value not in tv and t.value in self.scope.types:
            decl = self.scope.types[t.value]
            self.advance()
            args = []
            for _ in decl.params:
                a = self.tatom(tv, schematic, refine)
                self._no_refine(a, t, "a type argument")
                args.append(a)
            return _expand_type(decl, args)
        return self.tatom(tv, schematic, refine)

    def tatom(self, tv, schematic, refine):
        t = self.tok
        if self.at("Unit"):
            self.advance()
            return UNIT
        if self.at("("):
            self.advance()
            out = self.type_(tv, schematic, refine)
            self.expect(")")
            return out
        if self.at("mu"):
            return self.type_(tv, schematic, refine)
        if refine and self.at("{"):
            self.advance()
            base = self.type_(tv, schematic, False)
            self.expect("|")
            phi = self.formula()
            self.expect("}")
            return Refine(base, phi)
        if t.kind == "id" and t.value not in KEYWORDS:
            self.advance()
            if t.value in tv:
                return TyVar(t.value)
            if t.value in self.scope.types:
                decl = self.scope.types[t.value]
                if decl.params:
                    raise self.error(f"type {t.value} needs {len(decl.params)} arguments", t)
                return _expand_type(decl, [])
            if schematic:
                return TyVar(t.value)
            raise self.error(f"unknown type {t.value!r}", t)
        raise self.error(f"expected a type, found {t.value or 'end of input'!r}")

    def _no_refine(self, x, tok, where):
        if _is_rt(x):
            raise self.error(f"refinement types are not allowed inside {where}", tok)

    # --------------------------------------------------------- terms --

    def term(self, env):
        if self.at("\\", "λ"):
            self.advance()
            names = [self.binder()]
            while not self.at("."):
                names.append(self.binder())
            self.expect(".")
            body = self.term(env | set(names))
            for x in reversed(names):
                body = Lam(x, body)
            return body
        if self.at("fix"):
            self.advance()
            x = self.binder()
            self.expect(".")
            return Fix(x, self.term(env | {x}))
        if self.at("case"):
            self.advance()
            scrut = self.term(env)
            self.expect("of")
            self.expect("{")
            self.expect("inj1")
            x = self.binder()
            self.expect("->")
            b1 = self.term(env | {x})
            self.expect("|")
            self.expect("inj2")
            y = self.binder()
            self.expect("->")
            b2 = self.term(env | {y})
            self.expect("}")
            return Case(scrut, x, b1, y, b2)
        if self.at("if"):
            self.advance()
            c = self.term(env)
            self.expect("then")
            a = self.term(env)
            self.expect("else")
            b = self.term(env)
            return Case(c, "_", a, "_", b)
        left = self.app(env)
        if self.at("::"):
            self.advance()
            return Fold(Pair(left, self.term(env)))
        return left

    def binder(self):
        if self.tok.kind == "id" and self.tok.value == "_":
            self.advance()
            return "_"
        return self.ident("variable")

    def app(self, env):
        out = self.unary(env)
        while self._starts_unary():
            out = App(out, self.unary(env))
        return out

    def _starts_unary(self):
        t = self.tok
        if t.kind == "id":
            return t.value not in KEYWORDS or t.value in (
                "fold", "unfold", "inj1", "inj2", "pi1", "pi2")
        return t.kind == "sym" and t.value in ("(", "<", "<>")

    def unary(self, env):
        t = self.tok
        if t.kind == "id":
            match t.value:
                case "fold":
                    self.advance()
                    return Fold(self.unary(env))
                case "unfold":
                    self.advance()
                    return Unfold(self.unary(env))
                case "inj1" | "inj2":
                    self.advance()
                    return Inj(int(t.value[-1]), self.unary(env))
                case "pi1" | "pi2":
                    self.advance()
                    return Proj(int(t.value[-1]), self.unary(env))
        return self.tm_atom(env)

    def tm_atom(self, env):
        t = self.tok
        if self.at("<>"):
            self.advance()
            return UNIT_I
        if self.at("<"):
            self.advance()
            a = self.term(env)
            self.expect(",")
            b = self.term(env)
            self.expect(">")
            return Pair(a, b)
        if self.at("("):
            self.advance()
            out = self.term(env)
            self.expect(")")
            return out
        if t.kind == "id" and t.value not in KEYWORDS:
            self.advance()
            if t.value in env:
                if t.value == "_":
                    raise self.error("'_' cannot be referenced", t)
                return Var(t.value)
            if t.value in self.scope.terms:
                return self.scope.terms[t.value].ref
            raise self.error(f"unknown term {t.value!r}", t)
        raise self.error(f"expected a term, found {t.value or 'end of input'!r}")

    # ------------------------------------------------------ formulae --

    def formula(self, fenv=frozenset()):
        if self.at("mu", "nu"):
            kind = self.advance().value
            self.expect("^")
            bound = self.iter_term()
            x = self.ident("fixpoint variable")
            self.expect(".")
            body = self.formula(fenv | {x})
            return (FinMu if kind == "mu" else FinNu)(bound, x, body)
        if self.at("exists", "forall"):
            kind = self.advance().value
            i = self.ident("iteration variable")
            self.expect(".")
            body = self.formula(fenv)
            return (Exists if kind == "exists" else Forall)(i, body)
        left = self.disj(fenv)
        if self.at("~>"):
            self.advance()
            return RealTo(left, self.formula(fenv))
        return left

    def iter_term(self):
        if self.tok.kind == "num":
            return numeral(self.number())
        if self.at("("):
            self.advance()
            out = self.iter_term()
            self.expect(")")
            return out
        v = self.ident("iteration term")
        k = 0
        if self.at("+") and self.peek().kind == "num":
            self.advance()
            k = self.number()
        return numeral(k, IVar(v))

    def disj(self, fenv):
        out = self.conj(fenv)
        while self.at("\\/"):
            self.advance()
            out = Or(out, self.conj(fenv))
        return out

    def conj(self, fenv):
        out = self.f_unary(fenv)
        while self.at("/\\"):
            self.advance()
            out = And(out, self.f_unary(fenv))
        return out

    def f_unary(self, fenv):
        t = self.tok
        if self.at("<()>"):
            self.advance()
            return UNIT_MOD
        if self.at("<"):
            self.advance()
            if self.tok.kind == "num":
                n = self.number()
                self.expect(">")
                return mods(" ".join(["fold inj2"] * n), CONSTANTS["zero"])
            if self.tok.kind != "id":
                raise self.error(f"expected a modality, found {self.tok.value!r}")
            name = self.advance().value
            if name in CONSTANTS:
                self.expect(">")
                return CONSTANTS[name]
            if name == "ge":
                n = self.number()
                self.expect(">")
                return mods(" ".join(["fold inj2"] * n), self.f_unary(fenv))
            if name in PRIMITIVE:
                self.expect(">")
                return Mod(name, self.f_unary(fenv))
            if name in COMPOSITE:
                self.expect(">")
                return mods(COMPOSITE[name], self.f_unary(fenv))
            raise self.error(f"unknown modality <{name}>", t)
        return self.f_atom(fenv)

    def f_atom(self, fenv):
        t = self.tok
        if self.at("T"):
            self.advance()
            return T
        if self.at("F"):
            self.advance()
            return F
        if self.at("("):
            self.advance()
            out = self.formula(fenv)
            self.expect(")")
            return out
        if t.kind == "id" and t.value not in KEYWORDS:
            self.advance()
            name = t.value
            if name in fenv:
                return FixVar(name)
            if name in self.scope.macros:
                decl = self.scope.macros[name]
                args = []
                if decl.params:
                    self.expect("(")
                    args.append(self.formula(fenv))
                    while self.at(","):
                        self.advance()
                        args.append(self.formula(fenv))
                    self.expect(")")
                if len(args) != len(decl.params):
                    raise self.error(f"{name} expects {len(decl.params)} arguments", t)
                return _expand_macro(decl, args)
            if name in self.scope.formulas:
                return self.scope.formulas[name].formula
            raise self.error(f"unknown formula {name!r}", t)
        raise self.error(f"expected a formula, found {t.value or 'end of input'!r}")

    # -------------------------------------------------- declarations --

    def source(self):
        out = self.scope
        while self.tok.kind != "eof":
            start = self.tok.start
            kw = self.tok
            match kw.value if kw.kind == "id" else None:
                case "type":
                    self.advance()
                    name = self.ident("type name")
                    params = []
                    while not self.at("="):
                        params.append(self.ident("type parameter"))
                    self.expect("=")
                    t = self.type_(frozenset(params))
                    end = self.expect(";;").end
                    self._fresh(out.types, name, kw)
                    d = TypeDecl(name, tuple(params), t, (start, end))
                    out.types[name] = d
                case "term":
                    self.advance()
                    name = self.ident("term name")
                    self.expect(":")
                    t = self.type_(frozenset(), schematic=True)
                    self.expect("=")
                    body = self.term(frozenset())
                    end = self.expect(";;").end
                    self._fresh(out.terms, name, kw)
                    self._check_term(name, body, t, (start, end))
                    d = TermDecl(name, t, body, (start, end))
                    out.terms[name] = d
                case "formula":
                    self.advance()
                    name = self.ident("formula name")
                    if self.at("("):
                        self.advance()
                        params = [self.ident("parameter")]
                        while self.at(","):
                            self.advance()
                            params.append(self.ident("parameter"))
                        self.expect(")")
                        self.expect("=")
                        body = self.formula(frozenset(params))
                        end = self.expect(";;").end
                        self._fresh(out.macros, name, kw)
                        d = MacroDecl(name, tuple(params), body, (start, end))
                        out.macros[name] = d
                    else:
                        self.expect(":")
                        sign = self.sign()
                        t = self.type_(frozenset())
                        self.expect("=")
                        phi = self.formula()
                        end = self.expect(";;").end
                        self._fresh(out.formulas, name, kw)
                        self._check_formula(name, phi, t, sign, (start, end))
                        d = FormulaDecl(name, sign, t, phi, (start, end))
                        out.formulas[name] = d
                case "judgement":
                    self.advance()
                    name = self.ident("judgement name")
                    self.expect("=")
                    ctx = []
                    if not self.at("|-"):
                        ctx.append(self.ctx_entry())
                        while self.at(","):
                            self.advance()
                            ctx.append(self.ctx_entry())
                    self.expect("|-")
                    m = self.term(frozenset(x for x, _ in ctx))
                    self.expect(":")
                    goal = _rt(self.type_(frozenset(), refine=True))
                    end = self.expect(";;").end
                    self._fresh(out.judgements, name, kw)
                    d = JudgementDecl(name, tuple(ctx), m, goal, (start, end))
                    out.judgements[name] = d
                case _:
                    raise self.error(f"expected a declaration, found {kw.value!r}")
            out.decls.append(d)
        return out

    def ctx_entry(self):
        x = self.ident("variable")
        self.expect(":")
        return x, _rt(self.type_(frozenset(), refine=True))

    def sign(self):
        if self.at("±"):
            self.advance()
            return Polarity.NEUTRAL
        if self.at("+"):
            self.advance()
            if self.at("-"):
                self.advance()
                return Polarity.NEUTRAL
            return Polarity.POS
        if self.at("-"):
            self.advance()
            return Polarity.NEG
        raise self.error("expected a sign (+, - or +-)")

    def _fresh(self, ns, name, tok):
        if name in ns:
            raise self.error(f"duplicate declaration {name!r}", tok)

    def _check_term(self, name, body, t, span):
        from .formation import PureTypeError, check_pure_term
        try:
            check_pure_term({}, body, t)
        except PureTypeError as e:
            raise ParseError(f"term {name}: {e}", span, self.text) from None

    def _check_formula(self, name, phi, t, sign, span):
        from .formation import FormationError, check_formula
        try:
            check_formula({}, phi, t, sign)
        except FormationError as e:
            raise ParseError(f"formula {name}: {e}", span, self.text) from None


def _is_rt(x):
    return isinstance(x, (Pure, Refine, ProdR, ArrowR))


def _rt(x):
    return x if _is_rt(x) else Pure(x)


def _expand_type(decl, args):
    t = decl.type
    for p, a in zip(decl.params, args):
        t = subst_type(t, p, a)
    return t


def _expand_macro(decl, args):
    f = decl.body
    for p, a in zip(decl.params, args):
        f = subst_formula(f, p, a)
    return f


def _simplify_rt(r):
    """Collapse refinement trees without any formula into Pure."""
    match r:
        case ProdR(a, b) | ArrowR(a, b):
            a, b = _simplify_rt(a), _simplify_rt(b)
            if isinstance(a, Pure) and isinstance(b, Pure):
                ctor = Prod if isinstance(r, ProdR) else Arrow
                return Pure(ctor(a.type, b.type))
            return type(r)(a, b)
    return r


# ------------------------------------------------------------ entry points --

def _run(text, fn, scope=None):
    p = _Parser(text, scope if scope is not None else prelude())
    out = fn(p)
    p.done()
    return out


def parse_type(text: str, scope=None, schematic=False):
    return _run(text, lambda p: p.type_(frozenset(), schematic), scope)


def parse_term(text: str, scope=None, env=()):
    return _run(text, lambda p: p.term(frozenset(env)), scope)


def parse_formula(text: str, scope=None, fixvars=()):
    return _run(text, lambda p: p.formula(frozenset(fixvars)), scope)


def parse_refinement(text: str, scope=None):
    return _run(text, lambda p: _simplify_rt(_rt(p.type_(frozenset(), refine=True))), scope)


def parse(text: str, with_prelude=True) -> SourceFile:
    """Parse a source file on top of the prelude (or an empty scope)."""
    base = prelude().copy() if with_prelude else SourceFile()
    return _Parser(text, base).source()


@lru_cache(maxsize=1)
def prelude() -> SourceFile:
    text = resources.files(__package__).joinpath("prelude.fpc").read_text(encoding="utf-8")
    return _Parser(text, SourceFile()).source()


def load(path, with_prelude=True) -> SourceFile:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), with_prelude)


# --------------------------------------------------------------- printers --

def print_type(t, level=0) -> str:
    match t:
        case UnitT():
            return "Unit"
        case TyVar(v):
            return v
        case Rec(v, b):
            s = f"mu {v}. {print_type(b, 0)}"
            return s if level == 0 else f"({s})"
        case Arrow(a, b):
            s = f"{print_type(a, 2)} -> {print_type(b, 0)}"
            return s if level <= 1 else f"({s})"
        case Sum(a, b):
            s = f"{print_type(a, 3)} + {print_type(b, 2)}"
            return s if level <= 2 else f"({s})"
        case Prod(a, b):
            s = f"{print_type(a, 4)} * {print_type(b, 3)}"
            return s if level <= 3 else f"({s})"
    return f"?{t!r}"


def print_iter(t) -> str:
    v, k = split_iter(t)
    if v is None:
        return str(k)
    return v if k == 0 else f"({v}+{k})"


# formula levels: 0 binder/~>, 1 \/, 2 /\, 3 unary

def print_formula(f, level=0) -> str:
    match f:
        case TrueF():
            return "T"
        case FalseF():
            return "F"
        case ModUnit():
            return "<()>"
        case FixVar(x):
            return x
        case Mod(m, b):
            inner = print_formula(b, 3)
            return f"<{m}> {inner}" if not inner.startswith("<") else f"<{m}>{inner}"
        case And(a, b):
            s = f"{print_formula(a, 2)} /\\ {print_formula(b, 3)}"
            return s if level <= 2 else f"({s})"
        case Or(a, b):
            s = f"{print_formula(a, 1)} \\/ {print_formula(b, 2)}"
            return s if level <= 1 else f"({s})"
        case RealTo(a, b):
            s = f"{print_formula(a, 1)} ~> {print_formula(b, 0)}"
            return s if level == 0 else f"({s})"
        case FinMu(t, x, b) | FinNu(t, x, b):
            kw = "mu" if isinstance(f, FinMu) else "nu"
            s = f"{kw}^{print_iter(t)} {x}. {print_formula(b, 0)}"
            return s if level == 0 else f"({s})"
        case Exists(i, b) | Forall(i, b):
            kw = "exists" if isinstance(f, Exists) else "forall"
            s = f"{kw} {i}. {print_formula(b, 0)}"
            return s if level == 0 else f"({s})"
    return f"?{f!r}"


# term levels: 0 binder, 1 cons, 2 application, 3 prefix, 4 atom

def print_term(m, level=0) -> str:
    match m:
        case UnitI():
            return "<>"
        case Var(x):
            return x
        case Global(name, _, _):
            return name
        case FinConst(d, _):
            return f"#fin({d})"
        case Pair(a, b):
            return f"<{print_term(a)}, {print_term(b)}>"
        case Fold(Pair(h, t)):
            s = f"{print_term(h, 2)} :: {print_term(t, 1)}"
            return s if level <= 1 else f"({s})"
        case Fold(b) | Unfold(b) | Inj(_, b) | Proj(_, b):
            kw = {Fold: "fold", Unfold: "unfold"}.get(type(m))
            if kw is None:
                kw = ("inj" if isinstance(m, Inj) else "pi") + str(m.index)
            s = f"{kw} {print_term(b, 3)}"
            return s if level <= 3 else f"({s})"
        case App(a, b):
            s = f"{print_term(a, 2)} {print_term(b, 4)}"
            return s if level <= 2 else f"({s})"
        case Lam(x, b):
            s = f"\\{x}. {print_term(b, 0)}"
            return s if level == 0 else f"({s})"
        case Fix(x, b):
            s = f"fix {x}. {print_term(b, 0)}"
            return s if level == 0 else f"({s})"
        case Case(c, x, b1, y, b2):
            s = (f"case {print_term(c)} of {{ inj1 {x} -> {print_term(b1)}"
                 f" | inj2 {y} -> {print_term(b2)} }}")
            return s if level == 0 else f"({s})"
    return f"?{m!r}"


def print_refinement(r, level=0) -> str:
    # levels as in print_type
    match r:
        case Pure(t):
            return print_type(t, level)
        case Refine(t, f):
            return f"{{ {print_type(t)} | {print_formula(f)} }}"
        case ArrowR(a, b):
            s = f"{print_refinement(a, 2)} -> {print_refinement(b, 0)}"
            return s if level <= 1 else f"({s})"
        case ProdR(a, b):
            s = f"{print_refinement(a, 4)} * {print_refinement(b, 3)}"
            return s if level <= 3 else f"({s})"
    return f"?{r!r}"


def print_judgement(ctx, m, goal) -> str:
    left = ", ".join(f"{x} : {print_refinement(r)}" for x, r in ctx)
    return (left + " " if left else "") + f"|- {print_term(m)} : {print_refinement(goal)}"


def print_ast(x) -> str:
    """Print any AST node with the printer for its syntactic class."""
    from . import syntax as S
    if isinstance(x, (S.UnitT, S.Prod, S.Arrow, S.Sum, S.TyVar, S.Rec)):
        return print_type(x)
    if isinstance(x, (S.IVar, S.Zero, S.Succ)):
        return print_iter(x)
    if isinstance(x, (Pure, Refine, ProdR, ArrowR)):
        return print_refinement(x)
    if isinstance(x, JudgementDecl):
        return print_judgement(x.context, x.term, x.goal)
    if isinstance(x, (TrueF, FalseF, And, Or, ModUnit, Mod, FixVar, FinMu, FinNu,
                      Exists, Forall, RealTo)):
        return print_formula(x)
    return print_term(x)
