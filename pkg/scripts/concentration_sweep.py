#!/usr/bin/env python3
"""SINR concentration as the antenna count grows at a fixed load factor.

Nested fixed geometry, K/N = 0.8; the per-user relative deviation of the
instantaneous SINRs from their deterministic equivalents shrinks with N.
"""
import sys

from maxminbf.cli import main

if __name__ == "__main__":
    sys.exit(main(["concentration-sweep",
                   "--out", "results/concentration_sweep",
                   "--sweep", "16,32,64", "--kn-ratio", "0.8",
                   "--trials", "200", "--seed", "31"] + sys.argv[1:]))
