#!/usr/bin/env python3
"""Spatial query-size sweep; writes results/experiment3.csv.

Extra command-line flags are passed through.
"""

import pathlib
import sys

from memsrs.cli import main

if __name__ == "__main__":
    pathlib.Path("results").mkdir(exist_ok=True)
    sys.exit(main(["bench", "spatial", "--aspects", "",
                   "--out", "results/experiment3.csv", *sys.argv[1:]]))
