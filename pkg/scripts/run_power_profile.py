#!/usr/bin/env python3
"""Per-subcarrier power, split ratio and assignment of a single solve."""

import sys

from ofdma_swipt.cli import main

if __name__ == "__main__":
    args = sys.argv[1:] or [
        "--config", "configs/paper.yaml",
        "--seed", "0",
        "--out", "results/power_profile.csv",
    ]
    sys.exit(main(["profile"] + args))
