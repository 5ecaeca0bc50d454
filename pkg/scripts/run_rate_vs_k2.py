#!/usr/bin/env python3
"""Weighted sum secrecy rate versus the number of energy receivers."""

import sys

from ofdma_swipt.cli import main

if __name__ == "__main__":
    args = sys.argv[1:] or [
        "--config", "configs/paper.yaml",
        "--values", "1,2,4,8",
        "--trials", "20",
        "--out", "results/rate_vs_k2.csv",
    ]
    sys.exit(main(["sweep", "--axis", "K2"] + args))
