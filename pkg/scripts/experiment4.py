#!/usr/bin/env python3
"""Spatial query-aspect sweep; writes results/experiment4.csv.

Extra command-line flags are passed through.
"""

import pathlib
import sys

from memsrs.cli import main

if __name__ == "__main__":
    pathlib.Path("results").mkdir(exist_ok=True)
    sys.exit(main(["bench", "spatial", "--query-sizes", "",
                   "--out", "results/experiment4.csv", *sys.argv[1:]]))
