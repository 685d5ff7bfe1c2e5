#!/usr/bin/env python3
"""Print the closed-form regret envelopes and floors at a handful of steps for
a given population/type configuration."""

import argparse
import sys

from cfregret import bounds


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, default=400)
    ap.add_argument("--qU", type=int, default=40)
    ap.add_argument("--qI", type=int, default=500)
    ap.add_argument("--gamma", type=float, default=0.1)
    ap.add_argument("--delta", type=float, default=0.01)
    ap.add_argument("--steps", type=int, nargs="+",
                    default=[10, 100, 1000, 10000])
    args = ap.parse_args()
    ts = sorted(args.steps)
    curves = [
        bounds.user_upper(ts, args.N, args.qU, n_item_types=args.qI),
        bounds.user_upper_noisy(ts, args.N, args.qU, args.gamma,
                                n_item_types=args.qI),
        bounds.user_lower(ts, args.N, args.qU, delta=args.delta),
        bounds.item_upper(ts, args.N, args.qI, n_user_types=args.qU),
        bounds.item_lower(ts, args.N, args.qI),
    ]
    print(f"N={args.N} qU={args.qU} qI={args.qI} "
          f"gamma={args.gamma} delta={args.delta}")
    head = "kind".ljust(16) + "".join(f"t={t}".rjust(12) for t in ts)
    print(head)
    for c in curves:
        row = c.kind.ljust(16) + "".join(f"{v:12.4g}" for v in c.values)
        print(row)
        notes = ", ".join(f"{k}={v}" for k, v in sorted(c.flags.items()))
        if notes:
            print(" " * 4 + notes)
    return 0


if __name__ == "__main__":
    sys.exit(main())
