"""Command-line entry points: run a configured simulation, sweep the
mollification parameter, run the identity verification suite, or validate a
coefficient set.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import harness
from .coefficients import (InvalidCoefficients, derive_viscosities,
                           example_set, matrix_entries, validate)
from .derivation import run_identity_suite


def _cmd_run(args: argparse.Namespace) -> int:
    config = harness.parse_config(args.config)
    try:
        traj = harness.run_simulation(config)
    except InvalidCoefficients as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # solver abort
        print(f"solver abort: {exc}", file=sys.stderr)
        return 1
    outdir = harness.resolve_output_dir(config, args.output)
    summary = harness.write_outputs(traj, config, outdir)
    print(f"wrote {outdir} (max defect {summary['max_defect']:.3e}, "
          f"final E {summary['final']['total']:.6g})")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = harness.parse_config(args.config)
    deltas = [float(tok) for tok in args.deltas.split(",")]
    outdir = harness.resolve_output_dir(config, args.output)
    try:
        report = harness.run_sweep(config, deltas, workers=args.workers,
                                   outdir=outdir)
    except InvalidCoefficients as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except harness.SweepAborted as exc:
        harness.write_sweep(exc.partial, config, outdir)
        print(f"sweep abort ({exc}); partial report written to "
              f"{outdir / 'sweep.json'}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"sweep abort: {exc}", file=sys.stderr)
        return 1
    harness.write_sweep(report, config, outdir)
    print(f"wrote {outdir / 'sweep.json'}")
    for name, status in report.statuses.items():
        print(f"  {name}: {status}")
    for name, order in report.observed_orders.items():
        print(f"  order[{name}] = {order:.3f}")
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    rows = run_identity_suite(seed=args.seed, samples=args.samples,
                              num_sets=args.sets, canary=args.canary)
    base = example_set()
    derived = derive_viscosities(base)
    angles = np.linspace(0.0, np.pi, 33)
    a11, a12, a21, a22 = matrix_entries(base, angles)
    identity_dev = max(np.max(np.abs(a11 - 1.0)), np.max(np.abs(a12)),
                       np.max(np.abs(a21)), np.max(np.abs(a22 - 1.0)))
    hard_checks = [
        ("example set: gamma1 == 2", abs(derived.gamma1 - 2.0), 1e-14),
        ("example set: gamma2 == 0", abs(derived.gamma2), 1e-14),
        ("example set: A(n) == I", float(identity_dev), 1e-14),
        ("example set: lambda == 1", abs(derived.lambda_lo - 1.0), 1e-12),
    ]

    width = max(len(r.name) for r in rows)
    width = max(width, max(len(nm) for nm, _, _ in hard_checks))
    ok = True
    for row in rows:
        ok &= row.passed
        status = "pass" if row.passed else "FAIL"
        print(f"{row.name:<{width}s}  {status}  max_residual={row.max_residual:.3e}"
              f"  threshold={row.threshold:.1e}")
    for name, residual, threshold in hard_checks:
        passed = residual <= threshold
        ok &= passed
        status = "pass" if passed else "FAIL"
        print(f"{name:<{width}s}  {status}  max_residual={residual:.3e}"
              f"  threshold={threshold:.1e}")
    print("verification:", "PASS" if ok else "FAIL")
    return 0 if ok else 1


def _cmd_validate(args: argparse.Namespace) -> int:
    config = harness.parse_config(args.config)
    report = validate(config.coefficients)
    if args.json:
        print(json.dumps(report.as_dict(), indent=2, sort_keys=True))
    else:
        print(report.as_text())
    return 0 if report.is_valid else 1


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="nematic1d",
        description="1D compressible nematic liquid-crystal flow toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one configured simulation")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--output", default=None,
                       help="override the configured output directory")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="mollification-parameter sweep")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--deltas", default="0.1,0.05,0.025,0.0125",
                         help="comma-separated, strictly decreasing")
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.add_argument("--output", default=None)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_verify = sub.add_parser("verify", help="run the identity suite")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--samples", type=int, default=10_000)
    p_verify.add_argument("--sets", type=int, default=20)
    p_verify.add_argument("--canary", action="store_true",
                          help=argparse.SUPPRESS)
    p_verify.set_defaults(func=_cmd_verify)

    p_val = sub.add_parser("validate-coefficients",
                           help="print the admissibility report")
    p_val.add_argument("--config", required=True)
    p_val.add_argument("--json", action="store_true")
    p_val.set_defaults(func=_cmd_validate)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
