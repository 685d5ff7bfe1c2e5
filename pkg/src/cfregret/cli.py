"""Command line interface: simulate, bounds, coldstart, verify."""

import argparse
import json
import sys

from .engine import RepeatRecommendation
from .harness import (ExperimentConfig, ConfigError, run_experiment, coldstart,
                      bound_overlays, emit_csv, verify_regularity, verify_ballsbins)
from .bounds import evaluate_bound, BOUND_KINDS, USER_UPPER, USER_UPPER_NOISY, USER_LOWER


def _build_parser():
    parser = argparse.ArgumentParser(prog="cfregret",
                                     description="collaborative filtering regret simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a config and write a regret CSV")
    sim.add_argument("--config", required=True)
    sim.add_argument("--out", required=True)
    sim.add_argument("--seed", type=int, default=None, help="override base_seed")
    sim.add_argument("--trials", type=int, default=None, help="override trial count")

    bnd = sub.add_parser("bounds", help="evaluate a closed-form bound to CSV")
    bnd.add_argument("--kind", required=True, choices=list(BOUND_KINDS))
    bnd.add_argument("--N", type=int, required=True, dest="n_users")
    bnd.add_argument("--qU", type=int, default=None, dest="n_user_types")
    bnd.add_argument("--qI", type=int, default=None, dest="n_item_types")
    bnd.add_argument("--gamma", type=float, default=0.0)
    bnd.add_argument("--delta", type=float, default=0.01)
    bnd.add_argument("--T", type=int, required=True, dest="horizon")
    bnd.add_argument("--out", required=True)

    cs = sub.add_parser("coldstart", help="report the cold-start step for a config")
    cs.add_argument("--config", required=True)
    cs.add_argument("--gamma", type=float, required=True)
    cs.add_argument("--seed", type=int, default=None)
    cs.add_argument("--trials", type=int, default=None)

    ver = sub.add_parser("verify", help="run the self-check suites")
    ver.add_argument("--suite", choices=["regularity", "ballsbins", "all"], default="all")
    return parser


def _load_config(args):
    try:
        with open(args.config, encoding="utf-8") as fh:
            d = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config {args.config}: {e}") from e
    if not isinstance(d, dict):
        raise ConfigError("config root must be an object")
    if args.seed is not None:
        d["base_seed"] = args.seed
    if args.trials is not None:
        d["trials"] = args.trials
    return ExperimentConfig.from_dict(d)


def _cmd_simulate(args):
    cfg = _load_config(args)
    curve = run_experiment(cfg)
    emit_csv(curve, bound_overlays(cfg), args.out)
    for g in cfg.coldstart_gammas:
        t = coldstart(curve, g)
        print(f"coldstart({g:g}) = {t if t is not None else 'never'}")
    print(f"wrote {args.out}")
    return 0


def _cmd_bounds(args):
    kind = args.kind
    if kind in (USER_UPPER, USER_UPPER_NOISY, USER_LOWER) and args.n_user_types is None:
        raise ConfigError(f"{kind} needs --qU")
    if kind.startswith("Item") and args.n_item_types is None:
        raise ConfigError(f"{kind} needs --qI")
    curve = evaluate_bound(kind, args.horizon, n_users=args.n_users,
                           n_user_types=args.n_user_types,
                           n_item_types=args.n_item_types,
                           gamma=args.gamma, delta=args.delta)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write("t," + curve.column_name() + "\n")
        for i in range(len(curve.ts)):
            fh.write("%d,%.6g\n" % (curve.ts[i], curve.values[i]))
    print(f"wrote {args.out}")
    return 0


def _cmd_coldstart(args):
    if not 0.0 < args.gamma < 1.0:
        raise ConfigError("--gamma must lie in (0,1)")
    cfg = _load_config(args)
    curve = run_experiment(cfg)
    t = coldstart(curve, args.gamma)
    print(f"coldstart({args.gamma:g}) = {t if t is not None else 'never'}")
    return 0


def _cmd_verify(args):
    checks = []
    if args.suite in ("regularity", "all"):
        checks += verify_regularity()
    if args.suite in ("ballsbins", "all"):
        checks += verify_ballsbins()
    failed = 0
    for name, ok, detail in checks:
        tag = "PASS" if ok else "FAIL"
        failed += int(not ok)
        suffix = f" ({detail})" if detail else ""
        print(f"{tag} {name}{suffix}")
    return 1 if failed else 0


def main(argv=None):
    args = _build_parser().parse_args(argv)
    handlers = {"simulate": _cmd_simulate, "bounds": _cmd_bounds,
                "coldstart": _cmd_coldstart, "verify": _cmd_verify}
    try:
        return handlers[args.command](args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except RepeatRecommendation as e:
        print(f"experiment failure: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
