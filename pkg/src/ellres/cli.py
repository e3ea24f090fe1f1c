"""ellres command line: classify | enumerate | verify | witness | report."""

from __future__ import annotations

import argparse
import json
import sys

from .config import ConfigError, load_config
from .report import EXIT_CONFIG, Outcome, dumps, render, run_classify, run_enumerate, run_verify, run_witness


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ellres", description="Resonance of rank-two bundles on elliptic curves.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, *, enum=False, sampling=False):
        p.add_argument("--config", required=True, metavar="PATH")
        p.add_argument("--out", metavar="PATH", help="write the JSON report here instead of stdout")
        if enum:
            p.add_argument("--workers", type=int, metavar="N")
            p.add_argument("--budget", type=int, metavar="N", help="maximum points or planes to visit")
        if sampling:
            p.add_argument("--sample", type=int, metavar="N", help="resonant points to cross-check")
            p.add_argument("--seed", type=int, metavar="N")

    common(sub.add_parser("classify", help="symbolic description only"))
    common(sub.add_parser("enumerate", help="exhaustive counts over F_p"), enum=True)
    common(sub.add_parser("verify", help="enumerate and compare with the classifier"), enum=True, sampling=True)
    common(sub.add_parser("witness", help="one certified section per predicted stratum"))
    rep = sub.add_parser("report", help="render a stored JSON report as text")
    rep.add_argument("path")
    rep.add_argument("--out", metavar="PATH")
    return ap


def _emit(text: str, path) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "report":
        with open(args.path, encoding="utf-8") as fh:
            _emit(render(json.load(fh)), args.out)
        return 0
    try:
        cfg = load_config(args.config)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "classify":
        outcome = run_classify(cfg)
    elif args.command == "enumerate":
        outcome = run_enumerate(cfg, args.workers, args.budget)
    elif args.command == "verify":
        outcome = run_verify(cfg, args.workers, args.budget, args.sample, args.seed)
    else:
        outcome = run_witness(cfg)
    _emit(outcome.dumps(), args.out)
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
