"""Command line front door: render one figure from curve tables.

    plotgen results/a.csv results/b.csv --out fig.png
    plotgen --spec plot.json
"""

import argparse
import json
import pathlib
import sys

from . import PlotSpec, SchemaError, close, render_spec


def build_parser():
    ap = argparse.ArgumentParser(prog="plotgen", description=__doc__)
    ap.add_argument("csvs", nargs="*", help="curve tables to plot")
    ap.add_argument("--spec", help="JSON plot spec (inputs/output/labels)")
    ap.add_argument("--out", help="image path (default: first input's stem)")
    ap.add_argument("--labels", nargs="+", help="legend labels, one per table")
    ap.add_argument("--title")
    ap.add_argument("--svg", action="store_true",
                    help="emit SVG instead of PNG")
    ap.add_argument("--no-bounds", action="store_true",
                    help="skip dashed bound overlays")
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.spec:
            if args.csvs:
                raise ValueError("pass --spec or positional tables, not both")
            raw = json.loads(pathlib.Path(args.spec).read_text(encoding="utf-8"))
            spec = PlotSpec.from_dict(raw)
            if args.out:
                spec.output = args.out
            if args.title:
                spec.title = args.title
            if args.no_bounds:
                spec.overlay_bounds = False
        else:
            if not args.csvs:
                raise ValueError("no input tables given")
            if args.labels is not None:
                if len(args.labels) != len(args.csvs):
                    raise ValueError("labels must pair up with inputs")
                inputs = list(zip(args.csvs, args.labels))
            else:
                inputs = list(args.csvs)
            spec = PlotSpec(inputs=inputs, output=args.out,
                            overlay_bounds=not args.no_bounds,
                            title=args.title)
        ext = ".svg" if args.svg else ".png"
        if spec.output is None:
            spec.output = str(pathlib.Path(spec.inputs[0][0]).with_suffix(ext))
        elif args.svg and not spec.output.endswith(".svg"):
            spec.output = str(pathlib.Path(spec.output).with_suffix(".svg"))
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        fig = render_spec(spec)
        close(fig)
    except SchemaError as exc:
        print(f"schema mismatch: column '{exc.column}': {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {spec.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
