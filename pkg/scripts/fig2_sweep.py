#!/usr/bin/env python3
"""Run the item-side sweeps (population doubling and type-count doubling with
the practical batch constants) and drop one CSV per config."""

import argparse
import pathlib
import sys

from cfregret import cli

ROOT = pathlib.Path(__file__).resolve().parent.parent
CONFIGS = ["item_n600", "item_n1200", "item_qi120"]


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
