#!/usr/bin/env python3
"""Surrogate accuracy study: forest vs factorization machine RMSE
across layer counts and training sizes. Thin wrapper over the CLI;
pass --config to override the default study grid."""

import sys

from qgafilm.cli import main

if __name__ == "__main__":
    sys.exit(main(["rmse-study", "--out", "runs/rmse_study"] + sys.argv[1:]))
