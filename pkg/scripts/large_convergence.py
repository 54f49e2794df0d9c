#!/usr/bin/env python3
"""Convergence of the statistics-only solver (no channel realizations).

One geometry per trial; traces show the joint dual/primal power iteration.
"""
import sys

from maxminbf.cli import main

if __name__ == "__main__":
    sys.exit(main(["large-convergence",
                   "--scenario", "scenarios/large_system.toml",
                   "--out", "results/large_convergence",
                   "--trials", "3", "--seed", "1"] + sys.argv[1:]))
