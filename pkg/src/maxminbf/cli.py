"""Command-line experiment runner.

One subcommand per experiment kind; exits nonzero if any sub-solve failed to
converge.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .harness import EXPERIMENT_KINDS, ExperimentSpec, run_experiment
from .scenario import load_scenario


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="maxminbf",
        description="Max-min weighted SINR beamforming and power control "
                    "experiments for a coordinated multicell downlink.",
    )
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in EXPERIMENT_KINDS:
        p = sub.add_parser(kind, help=f"run the {kind} experiment")
        p.add_argument("--scenario", type=Path, default=None,
                       help="scenario TOML file (defaults to the baseline)")
        p.add_argument("--out", type=Path, default=Path("results"),
                       help="output directory for CSV/JSON artifacts")
        p.add_argument("--trials", type=int, default=1)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--sweep", type=str, default="",
                       help="comma-separated sweep values "
                            "(antenna counts or power budgets)")
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--max-iter", type=int, default=None)
        p.add_argument("--kn-ratio", type=float, default=0.8,
                       help="users-to-antennas ratio for concentration sweeps")
        p.add_argument("--geometries", type=int, default=20,
                       help="geometry count for power sweeps")
        p.add_argument("--draws", type=int, default=20,
                       help="channel draws per geometry for power sweeps")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    sweep = tuple(float(tok) for tok in args.sweep.split(",") if tok.strip())
    spec = ExperimentSpec(
        scenario=load_scenario(args.scenario),
        kind=args.kind,
        out_dir=args.out,
        trials=args.trials,
        seed=args.seed,
        sweep=sweep,
        kn_ratio=args.kn_ratio,
        geometries=args.geometries,
        draws=args.draws,
        tol=args.tol,
        max_iter=args.max_iter,
    )
    summary = run_experiment(spec)
    ok = bool(summary.get("all_converged", False))
    print(f"{args.kind}: wrote results to {spec.out_dir} "
          f"(all_converged={ok})")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
