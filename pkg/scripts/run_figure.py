#!/usr/bin/env python3
"""Generate the CSV data for one figure preset.

Usage:
    python scripts/run_figure.py fig3 --out data/fig3.csv
    python scripts/run_figure.py fig7c --quick --jobs 1

Equivalent to `simulate --preset <name>`; kept as a script so a whole
figure's data can be regenerated with one command and default paths.
"""

import argparse
import sys

from xxzlaser.cli import main as simulate
from xxzlaser.presets import PRESET_NAMES


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("preset", choices=PRESET_NAMES)
    ap.add_argument("--out", default=None, help="output CSV (default <preset>.csv)")
    ap.add_argument("--quick", action="store_true", help="smoke-test scale grid")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--seed", type=int, default=None)
    args = ap.parse_args()
    argv = ["--preset", args.preset, "--out", args.out or f"{args.preset}.csv",
            "--jobs", str(args.jobs)]
    if args.quick:
        argv.append("--quick")
    if args.seed is not None:
        argv += ["--seed", str(args.seed)]
    return simulate(argv)


if __name__ == "__main__":
    sys.exit(main())
