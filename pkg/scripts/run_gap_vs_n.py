#!/usr/bin/env python3
"""Duality gap of the optimal scheme versus the number of subcarriers.

Writes a CSV with one row per (N, trial); the gap column is the
band-averaged dual-primal difference in bps/Hz.
"""

import sys

from ofdma_swipt.cli import main

if __name__ == "__main__":
    args = sys.argv[1:] or [
        "--config", "configs/paper.yaml",
        "--values", "8,16,32,64",
        "--trials", "20",
        "--out", "results/gap_vs_n.csv",
    ]
    sys.exit(main(["sweep", "--axis", "N"] + args))
