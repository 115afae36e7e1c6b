"""Command-line entry point: ``refine-fpc COMMAND [FILE.fpc] ARGS``.

Exit codes: 0 definitive yes, 1 error or definitive no, 2 unknown / fuel.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import threading
from pathlib import Path

from . import domain as D
from .domain import FragmentError
from .eval import EvalError, Fuel, Tri, holds, VClosure, VFin, VFold, VInj, VPair, VUnit
from .formation import fragment_of
from .logic import Refuted, consistency, entail
from .normalize import DEFAULT_DNF_CAP, DnfCapExceeded, to_dnf, to_omega, to_prenex
from .parser import (
    ParseError, SourceFile, parse, parse_formula, parse_term, print_formula,
    print_term,
)
from .syntax import Polarity
from .typecheck import (
    Derived, FuelExhausted, FuelSchedule, IllFormed, Judgement, check_judgement,
    derivation_sketch, verdict_to_json,
)

SCHEMA = 1
EXIT_YES, EXIT_NO, EXIT_UNKNOWN = 0, 1, 2


class UsageError(Exception):
    pass


# -------------------------------------------------------------- helpers --

def _load(args) -> tuple[SourceFile, list]:
    """Split off an optional leading source file from the positionals."""
    rest = list(args.items)
    with_prelude = os.environ.get("REFINE_FPC_NO_PRELUDE") != "1"
    text = ""
    if rest and (rest[0].endswith(".fpc") or Path(rest[0]).is_file()):
        text = Path(rest.pop(0)).read_text(encoding="utf-8")
    return parse(text, with_prelude), rest


def _formula(src, s):
    if s in src.formulas:
        return src.formulas[s].formula
    return parse_formula(s, src)


def _term(src, s):
    if s in src.terms:
        return src.terms[s].ref
    return parse_term(s, src)


def _need(rest, n, what):
    if len(rest) != n:
        raise UsageError(f"expected {what}")
    return rest


def _schedule(args):
    fixes = sorted({f for f in (16, 32, 64, 128, 256) if f < args.fuel_fix} | {args.fuel_fix})
    return FuelSchedule(max_m=args.max_m, max_p=args.max_p, fix=tuple(fixes),
                        dnf_cap=args.dnf_cap, shared_m=not args.per_quantifier_m,
                        time_limit=args.time_limit)


def _trace(args):
    if not args.trace:
        return None
    return lambda msg: print(f"trace: {msg}", file=sys.stderr)


def _emit(args, payload, text):
    if args.json:
        print(json.dumps({"schema": SCHEMA, **payload}, indent=2, sort_keys=True))
    else:
        print(text)


def show_value(v, depth=6) -> str:
    """Finite rendering of a value, forcing at most depth constructors."""
    if depth <= 0:
        return "..."
    match v:
        case VUnit():
            return "<>"
        case VPair(a, b):
            return f"<{show_value(a.force(), depth - 1)}, {show_value(b.force(), depth - 1)}>"
        case VInj(i, t):
            return f"inj{i} {_paren(show_value(t.force(), depth - 1))}"
        case VFold(t):
            return f"fold {_paren(show_value(t.force(), depth - 1))}"
        case VClosure():
            return "<function>"
        case VFin(d, exact):
            if d == D.BOT and not exact:
                return "?"
            return f"#fin({d})" if exact else f"#above({d})"
    return repr(v)


def _paren(s):
    return s if " " not in s or s.startswith("<") else f"({s})"


# ------------------------------------------------------------- commands --

def cmd_check(args):
    src, rest = _load(args)
    (name,) = _need(rest, 1, "a judgement name")
    if name not in src.judgements:
        raise UsageError(f"unknown judgement {name!r}")
    j = Judgement.of(src.judgements[name])
    v = check_judgement(j, _schedule(args), progress=_trace(args))
    payload = {"command": "check", "judgement": name, **verdict_to_json(v)}
    match v:
        case Derived(c, stages, secs):
            text = (f"{name}: Derived (m={c.m}, p={c.p}, fix={c.fix}, "
                    f"{len(c.leaves)} leaves, {stages} stages, {secs:.2f}s)")
            if args.sketch:
                sk = derivation_sketch(j, c)
                text += "\n" + str(sk)
                payload["sketch"] = sk.to_json()
            code = EXIT_YES
        case FuelExhausted(m, p, fix, reason, stages, secs):
            text = f"{name}: FuelExhausted (deepest m={m}, p={p}, fix={fix}; {reason})"
            code = EXIT_UNKNOWN
        case IllFormed(reason):
            text = f"{name}: IllFormed ({reason})"
            code = EXIT_NO
    _emit(args, payload, text)
    return code


def cmd_entail(args):
    src, rest = _load(args)
    a, b = _need(rest, 2, "two formulae")
    psi, phi = _formula(src, a), _formula(src, b)
    try:
        ok = entail(psi, phi)
    except FragmentError as e:
        frag = f"{fragment_of(psi)}/{fragment_of(phi)}"
        _emit(args, {"command": "entail", "error": str(e), "fragment": frag},
              f"error: {e} (fragments: {frag}; entailment is decided for closed "
              "conjunctive or closed neutral formulae)")
        return EXIT_NO
    _emit(args, {"command": "entail", "derivable": ok,
                 "left": print_formula(psi), "right": print_formula(phi)},
          f"{print_formula(psi)} |- {print_formula(phi)}: {'derivable' if ok else 'not derivable'}")
    return EXIT_YES if ok else EXIT_NO


def cmd_consist(args):
    src, rest = _load(args)
    (a,) = _need(rest, 1, "one formula")
    delta = _formula(src, a)
    try:
        r = consistency(delta)
    except FragmentError as e:
        _emit(args, {"command": "consist", "error": str(e)}, f"error: {e}")
        return EXIT_NO
    ok = not isinstance(r, Refuted)
    _emit(args, {"command": "consist", "consistent": ok, "derivation": r.to_json()},
          r.to_text())
    return EXIT_YES if ok else EXIT_NO


def cmd_nf(args):
    src, rest = _load(args)
    (a,) = _need(rest, 1, "one formula")
    f = _formula(src, a)
    sign = {"+": Polarity.POS, "-": Polarity.NEG, "+-": Polarity.NEUTRAL}[args.sign]
    try:
        match args.stage:
            case "omega":
                out = [print_formula(to_omega(f))]
            case "dnf":
                out = sorted(print_formula(d) for d in
                             to_dnf(to_omega(f), args.dnf_cap, prune=args.prune))
            case "prenex":
                out = [print_formula(to_prenex(f, sign).formula())]
    except (FragmentError, DnfCapExceeded) as e:
        _emit(args, {"command": "nf", "error": str(e)}, f"error: {e}")
        return EXIT_NO
    _emit(args, {"command": "nf", "stage": args.stage, "result": out},
          "\n".join(out) if out else "F  (no disjuncts)")
    return EXIT_YES


def cmd_holds(args):
    src, rest = _load(args)
    a, b = _need(rest, 2, "a term and a formula")
    m, f = _term(src, a), _formula(src, b)
    try:
        r = holds(m, f, fuel=Fuel(args.fuel_fix, args.search), trace=_trace(args))
    except (FragmentError, EvalError) as e:
        _emit(args, {"command": "holds", "error": str(e)}, f"error: {e}")
        return EXIT_NO
    text = str(r.verdict)
    if r.witness is not None:
        text += f", witness i={r.witness}"
    _emit(args, {"command": "holds", "verdict": str(r.verdict), "witness": r.witness,
                 "gamma": None if r.gamma is None else print_formula(r.gamma)}, text)
    return {Tri.YES: EXIT_YES, Tri.NO: EXIT_NO, Tri.UNKNOWN: EXIT_UNKNOWN}[r.verdict]


def cmd_eval(args):
    from .eval import whnf
    src, rest = _load(args)
    (a,) = _need(rest, 1, "a term")
    m = _term(src, a)
    try:
        v = whnf(m, fuel=Fuel(args.fuel_fix, 0), trace=_trace(args))
        shown = show_value(v, args.depth)
    except EvalError as e:
        _emit(args, {"command": "eval", "error": str(e)}, f"error: {e}")
        return EXIT_NO
    _emit(args, {"command": "eval", "term": print_term(m), "value": shown}, shown)
    return EXIT_YES


COMMANDS = {"check": cmd_check, "entail": cmd_entail, "consist": cmd_consist,
            "nf": cmd_nf, "holds": cmd_holds, "eval": cmd_eval}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="JSON output")
    common.add_argument("--trace", action="store_true", help="trace to stderr")
    common.add_argument("--fuel-fix", type=int, default=256, help="fix-unfolding fuel")
    common.add_argument("--max-m", type=int, default=8)
    common.add_argument("--max-p", type=int, default=8)
    common.add_argument("--dnf-cap", type=int, default=DEFAULT_DNF_CAP)

    ap = argparse.ArgumentParser(prog="refine-fpc", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("check", parents=[common], help="check a judgement")
    p.add_argument("--per-quantifier-m", action="store_true",
                   help="instantiate each context quantifier independently")
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--sketch", action="store_true", help="print a derivation sketch")
    sub.add_parser("entail", parents=[common], help="decide psi |- phi")
    sub.add_parser("consist", parents=[common], help="consistency derivation")
    p = sub.add_parser("nf", parents=[common], help="normal forms")
    p.add_argument("--stage", choices=["omega", "dnf", "prenex"], default="dnf")
    p.add_argument("--sign", choices=["+", "-", "+-"], default="+")
    p.add_argument("--prune", action="store_true", help="drop inconsistent disjuncts")
    p = sub.add_parser("holds", parents=[common], help="does a term satisfy a formula")
    p.add_argument("--search", type=int, default=16, help="quantifier search bound")
    p = sub.add_parser("eval", parents=[common], help="weak head normal form")
    p.add_argument("--depth", type=int, default=6)
    for p in sub.choices.values():
        p.add_argument("items", nargs="*", metavar="ARG",
                       help="optional FILE.fpc, then names or inline syntax")
    return ap


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ParseError, UsageError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NO


def call_deep(fn, *a):
    """Run fn on a thread with a large stack (evaluation is recursive)."""
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 200_000))
    old = threading.stack_size(512 * 1024 * 1024)
    box = {}

    def target():
        try:
            box["out"] = fn(*a)
        except BaseException as e:  # re-raised on the calling thread
            box["err"] = e

    th = threading.Thread(target=target)
    th.start()
    th.join()
    threading.stack_size(old)
    if "err" in box:
        raise box["err"]
    return box["out"]


def main(argv=None):
    sys.exit(call_deep(run, argv))


if __name__ == "__main__":
    main()
