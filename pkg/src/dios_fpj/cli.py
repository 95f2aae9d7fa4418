"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .config import ConfigError, SimConfig, load_config
from .sweep import ALL_SCHEMES, FIGURES, Axis, closed_form_sweep, emit_csv, run_sweep
from .verify import SUITES, all_passed, run_suite

log = logging.getLogger("dios_fpj")


def _common(p: argparse.ArgumentParser, out: bool = True) -> None:
    p.add_argument("--config", help="YAML config; omitted keys take the defaults")
    p.add_argument("--seed", type=int, help="master seed (overrides run.seed)")
    p.add_argument("--blocks", type=int, help="coherence blocks per point (overrides schedule.n_blocks)")
    p.add_argument("--workers", type=int, help="worker processes (overrides run.workers)")
    if out:
        p.add_argument("--out", help="output CSV path (overrides run.output)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dios-fpj", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="Monte Carlo sweep along one axis")
    p.add_argument("--axis", required=True, choices=[a.value for a in Axis])
    p.add_argument("--schemes", nargs="+", default=list(ALL_SCHEMES), choices=ALL_SCHEMES)
    _common(p)

    p = sub.add_parser("reproduce", help="regenerate the data behind one figure")
    p.add_argument("figure", choices=sorted(FIGURES))
    _common(p)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", nargs="?", default="all", choices=[*SUITES, "all"])
    _common(p, out=False)

    p = sub.add_parser("bounds", help="closed-form lower bounds over the power grid")
    _common(p)
    return parser


def _config(args) -> SimConfig:
    cfg = load_config(args.config)
    run = {}
    if args.seed is not None:
        run["seed"] = args.seed
    if args.workers is not None:
        run["workers"] = args.workers
    if getattr(args, "out", None):
        run["output"] = args.out
    if run:
        cfg = cfg.replace(run=run)
    if args.blocks is not None:
        cfg = cfg.replace(schedule={"n_blocks": args.blocks})
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    if args.command == "verify":
        checks = run_suite(args.suite, cfg, seed=cfg.run.seed)
        for c in checks:
            print(c.line(), file=sys.stderr)
        ok = all_passed(checks)
        json.dump({"suite": args.suite, "passed": ok, "checks": [c.as_dict() for c in checks]},
                  sys.stdout, indent=2)
        print()
        return 0 if ok else 1

    if args.command == "bounds":
        result = closed_form_sweep(cfg)
    else:
        axis = FIGURES[args.figure] if args.command == "reproduce" else Axis(args.axis)
        schemes = ALL_SCHEMES if args.command == "reproduce" else tuple(args.schemes)
        log.info("sweeping %s with %d blocks per point", axis.value, cfg.schedule.n_blocks)
        result = run_sweep(cfg, axis, schemes)
    emit_csv(result, cfg.run.output)
    log.info("wrote %d rows to %s", len(result.rows), cfg.run.output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
