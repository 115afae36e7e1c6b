"""Check the cnt . bft counting property and record the fuel it needs.

Writes results/headline.json (the fuel at which the judgement is derived
and timings), the certificate next to it, and prints a one-line summary.
"""
import argparse
import json
import platform
import time
from pathlib import Path

from refine_fpc.cli import call_deep
from refine_fpc.parser import load
from refine_fpc.typecheck import Derived, FuelSchedule, Judgement, check_judgement, replay

ROOT = Path(__file__).resolve().parent.parent


def run(args):
    src = load(args.corpus)
    j = Judgement.of(src.judgements[args.name])
    sched = FuelSchedule(max_m=8, max_p=8, fix=(16, 32, 64, 128, 256), dnf_cap=4096,
                         time_limit=600)
    t0 = time.time()
    v = check_judgement(j, sched, progress=print if args.trace else None)
    secs = time.time() - t0
    out = {"judgement": args.name, "verdict": v.name, "seconds": round(secs, 2),
           "schedule": {"max_m": 8, "max_p": 8, "fix": list(sched.fix), "dnf_cap": 4096},
           "python": platform.python_version()}
    if isinstance(v, Derived):
        c = v.certificate
        t1 = time.time()
        ok = replay(c, j)
        out |= {"m": c.m, "ms": list(c.ms), "p": c.p, "fix": c.fix,
                "leaves": len(c.leaves), "stages": v.stages, "replay": ok,
                "replay_seconds": round(time.time() - t1, 2)}
    args.out.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(v, Derived):
        cert = args.out.with_name(args.out.stem + "_certificate.json")
        cert.write_text(json.dumps(v.certificate.to_json(), sort_keys=True) + "\n")
    args.out.write_text(json.dumps(out, indent=2, sort_keys=True) + "\n")
    print(f"{args.name}: {v.name} in {secs:.1f}s"
          + (f" at m={out['m']}, p={out['p']}, fix={out['fix']}" if "m" in out else ""))
    return 0 if isinstance(v, Derived) else 1


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--corpus", type=Path, default=ROOT / "corpus" / "corpus.fpc")
    ap.add_argument("--name", default="cnt_bft_spec_n1")
    ap.add_argument("--out", type=Path, default=ROOT / "results" / "headline.json")
    ap.add_argument("--trace", action="store_true")
    raise SystemExit(call_deep(run, ap.parse_args()))


if __name__ == "__main__":
    main()
