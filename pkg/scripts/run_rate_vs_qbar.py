#!/usr/bin/env python3
"""Weighted sum secrecy rate versus the per-ER harvest target (microwatts)."""

import sys

from ofdma_swipt.cli import main

if __name__ == "__main__":
    args = sys.argv[1:] or [
        "--config", "configs/paper.yaml",
        "--values", "50,100,200,400,800",
        "--trials", "20",
        "--out", "results/rate_vs_qbar.csv",
    ]
    sys.exit(main(["sweep", "--axis", "Qbar"] + args))
