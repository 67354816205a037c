#!/usr/bin/env python3
"""Relational data-size sweep; writes results/experiment1.csv.

Extra command-line flags are passed through, so e.g.
`scripts/experiment1.py --repeats 5` runs a quicker version.
"""

import pathlib
import sys

from memsrs.cli import main

if __name__ == "__main__":
    pathlib.Path("results").mkdir(exist_ok=True)
    sys.exit(main(["bench", "relational", "--nproj", "",
                   "--out", "results/experiment1.csv", *sys.argv[1:]]))
