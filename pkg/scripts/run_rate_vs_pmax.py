#!/usr/bin/env python3
"""Weighted sum secrecy rate versus the total power budget (dBm)."""

import sys

from ofdma_swipt.cli import main

if __name__ == "__main__":
    args = sys.argv[1:] or [
        "--config", "configs/paper.yaml",
        "--values", "31,34,37,40",
        "--trials", "20",
        "--out", "results/rate_vs_pmax.csv",
    ]
    sys.exit(main(["sweep", "--axis", "Pmax"] + args))
