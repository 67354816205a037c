#!/usr/bin/env python3
"""Relational projection-width sweep; writes results/experiment2.csv.

Extra command-line flags are passed through.
"""

import pathlib
import sys

from memsrs.cli import main

if __name__ == "__main__":
    pathlib.Path("results").mkdir(exist_ok=True)
    sys.exit(main(["bench", "relational", "--sizes", "",
                   "--out", "results/experiment2.csv", *sys.argv[1:]]))
