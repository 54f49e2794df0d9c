#!/usr/bin/env python3
"""Mean achieved SINR vs the cluster power budget, optimal and asymptotic.

Small-system setting (4 antennas, 3 users per cell) averaged over geometries
and channel draws; emits arithmetic and dB-domain (geometric) means.
"""
import sys

from maxminbf.cli import main

if __name__ == "__main__":
    sys.exit(main(["power-sweep",
                   "--scenario", "scenarios/power_sweep.toml",
                   "--out", "results/power_sweep",
                   "--sweep", "1,2,5,10",
                   "--geometries", "20", "--draws", "20",
                   "--seed", "51"] + sys.argv[1:]))
