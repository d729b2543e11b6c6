#!/usr/bin/env python3
"""Run the 40 h corrosion-chamber scenario and write CSV + SVG output.

Equivalent to `patina simulate --chamber --out out/chamber`; kept as a
script so the default experiment is one command away.
"""

import sys

from patina.cli import run_main

if __name__ == "__main__":
    sys.exit(run_main(["simulate", "--chamber", "--out", "out/chamber",
                       *sys.argv[1:]]))
