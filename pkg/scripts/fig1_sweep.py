#!/usr/bin/env python3
"""Run the user-side scaling sweeps (type-count sweep at N=400 and population
sweep at q_U=80) and drop one CSV per config, ready for plotgen."""

import argparse
import pathlib
import sys

from cfregret import cli

ROOT = pathlib.Path(__file__).resolve().parent.parent
CONFIGS = ["user_sweep_qu20", "user_sweep_qu40", "user_sweep_qu80",
           "user_sweep_n200", "user_sweep_n800"]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", default="results")
    ap.add_argument("--trials", type=int, default=None,
                    help="override trial count for a quick pass")
    args = ap.parse_args()
    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for name in CONFIGS:
        argv = ["simulate",
                "--config", str(ROOT / "configs" / f"{name}.json"),
                "--out", str(outdir / f"{name}.csv")]
        if args.trials is not None:
            argv += ["--trials", str(args.trials)]
        print("::", name)
        rc = cli.main(argv)
        if rc != 0:
            return rc
    return 0


if __name__ == "__main__":
    sys.exit(main())
