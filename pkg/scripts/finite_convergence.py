#!/usr/bin/env python3
"""Per-iteration convergence of the exact solver on the baseline scenario.

Writes one trace CSV per trial plus a JSON summary with all optimality gaps.
Any extra arguments are passed straight to the CLI (e.g. --trials 10).
"""
import sys

from maxminbf.cli import main

if __name__ == "__main__":
    sys.exit(main(["finite-convergence",
                   "--out", "results/finite_convergence",
                   "--trials", "5", "--seed", "1"] + sys.argv[1:]))
