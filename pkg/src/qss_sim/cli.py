"""Command-line entry point.

Exit codes: 0 success, 1 a verification check failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .adversary import AdversaryKind
from .errors import ConfigError, InvalidDistribution, UnknownParameter
from .harness.config import SimConfig, load_config
from .harness.enumerate import enumerate_detection
from .harness.simulate import SWEEPABLE, dumps, exact_summary, exact_table, run_simulation, sweep, sweep_csv
from .harness.verify import verify_algebra

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG = 0, 1, 2


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _config(args) -> SimConfig:
    if getattr(args, "config", None):
        return load_config(args.config, seed=getattr(args, "seed", None))
    return SimConfig()


def cmd_run(args) -> int:
    report = run_simulation(_config(args))
    _emit(report.to_json(include_timing=args.timing), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = verify_algebra()
    for c in checks:
        line = f"{'PASS' if c.passed else 'FAIL'}  {c.name}"
        print(line + (f"  [{c.detail}]" if c.detail else ""))
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def cmd_enumerate(args) -> int:
    cfg = _config(args)
    exact = enumerate_detection(cfg.protocol.charlie_op_distribution, cfg.ancilla)
    _emit(dumps({"summary": exact_summary(exact), "branches": exact_table(exact)}), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    rows = sweep(_config(args), args.param, values)
    _emit(sweep_csv(args.param, rows), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qss-sim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="Monte Carlo simulation from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--timing", action="store_true", help="add wall-clock duration (breaks byte reproducibility)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", help="run the Bell-algebra check suite")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("enumerate", help="exact control-round failure probabilities")
    p.add_argument("--adversary", required=True, choices=[AdversaryKind.BOB_REPLACE.value])
    p.add_argument("--config", help="takes charlie_op_distribution and ancilla from here")
    p.add_argument("--out")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("sweep", help="one simulation per parameter value, CSV out")
    p.add_argument("--config", required=True)
    p.add_argument("--param", required=True, help=f"one of: {', '.join(SWEEPABLE)}")
    p.add_argument("--values", required=True, help="comma-separated")
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, InvalidDistribution, UnknownParameter, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
