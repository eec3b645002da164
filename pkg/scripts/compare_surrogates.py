#!/usr/bin/env python3
"""Paired surrogate comparison: QGA with forest vs factorization machine
from identical initialization. Thin wrapper over the CLI."""

import sys

from qgafilm.cli import main

if __name__ == "__main__":
    sys.exit(main(["compare", "--out", "runs/compare"] + sys.argv[1:]))
