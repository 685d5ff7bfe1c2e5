"""Plotting frontend for regret-curve tables. Each input file contributes one
solid mean line plus a shaded 3*SE band; bound_* columns overlay as dashed
lines. Nothing is recomputed: every plotted number comes straight from the
file, so the simulation side stays the single source of truth."""

from dataclasses import dataclass
import itertools
import pathlib

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

__version__ = "0.1.0"

REQUIRED = ("t", "regret_mean", "regret_se", "slope_mean")
BOUND_PREFIX = "bound_"


class SchemaError(ValueError):
    """Input table does not match the curve schema; .column names the culprit."""

    def __init__(self, column, message):
        super().__init__(message)
        self.column = column


def read_table(path):
    text = pathlib.Path(path).read_text(encoding="utf-8")
    rows = [line.split(",") for line in text.split("\n") if line]
    if not rows:
        raise SchemaError("t", f"{path}: empty table")
    header = rows[0]
    for i, want in enumerate(REQUIRED):
        got = header[i] if i < len(header) else "<missing>"
        if got != want:
            raise SchemaError(want,
                              f"{path}: column {i} is '{got}', expected '{want}'")
    for name in header[len(REQUIRED):]:
        if not name.startswith(BOUND_PREFIX):
            raise SchemaError(name, f"{path}: unexpected column '{name}'")
    width = len(header)
    data = np.empty((len(rows) - 1, width), dtype=np.float64)
    for j, row in enumerate(rows[1:], start=2):
        if len(row) != width:
            raise SchemaError(header[-1],
                              f"{path}: line {j} has {len(row)} fields, "
                              f"expected {width}")
        for i, cell in enumerate(row):
            try:
                data[j - 2, i] = float(cell)
            except ValueError:
                raise SchemaError(header[i],
                                  f"{path}: line {j}, column '{header[i]}': "
                                  f"bad number '{cell}'") from None
    cols = {name: data[:, i].copy() for i, name in enumerate(header)}
    return header, cols


@dataclass
class PlotSpec:
    inputs: list
    output: str = None
    overlay_bounds: bool = True
    title: str = None
    xlabel: str = "step"
    ylabel: str = "cumulative regret"

    def __post_init__(self):
        if not self.inputs:
            raise ValueError("need at least one input table")
        norm = []
        for entry in self.inputs:
            if isinstance(entry, (str, pathlib.Path)):
                norm.append((str(entry), pathlib.Path(entry).stem))
            elif isinstance(entry, dict):
                if "path" not in entry or set(entry) - {"path", "label"}:
                    raise ValueError(f"bad input entry: {entry!r}")
                label = entry.get("label") or pathlib.Path(entry["path"]).stem
                norm.append((str(entry["path"]), str(label)))
            else:
                path, label = entry
                norm.append((str(path), str(label)))
        self.inputs = norm

    @classmethod
    def from_dict(cls, raw):
        known = {"inputs", "output", "overlay_bounds", "title",
                 "xlabel", "ylabel"}
        extra = sorted(set(raw) - known)
        if extra:
            raise ValueError(f"unknown spec fields: {extra}")
        return cls(**raw)


def render_spec(spec):
    tables = []
    ref_header = ref_path = None
    for path, label in spec.inputs:
        header, cols = read_table(path)
        if ref_header is None:
            ref_header, ref_path = header, path
        elif header != ref_header:
            off = next(a if a != b and a != "<pad>" else b
                       for a, b in itertools.zip_longest(header, ref_header,
                                                         fillvalue="<pad>")
                       if a != b)
            raise SchemaError(off, f"{path}: header differs from {ref_path} "
                                   f"at column '{off}'")
        tables.append((label, header, cols))
    fig, ax = plt.subplots(figsize=(6.4, 4.2), constrained_layout=True)
    for label, header, cols in tables:
        t = cols["t"]
        line, = ax.plot(t, cols["regret_mean"], lw=1.6, label=label)
        band = 3.0 * cols["regret_se"]
        ax.fill_between(t, cols["regret_mean"] - band,
                        cols["regret_mean"] + band,
                        color=line.get_color(), alpha=0.2, lw=0)
        if spec.overlay_bounds:
            for name in header[len(REQUIRED):]:
                ax.plot(t, cols[name], ls="--", lw=1.2, label=name)
    ax.set_xlabel(spec.xlabel)
    ax.set_ylabel(spec.ylabel)
    if spec.title:
        ax.set_title(spec.title)
    ax.legend(frameon=False, fontsize=8)
    ax.grid(alpha=0.3)
    if spec.output:
        save(fig, spec.output)
    return fig


def render(paths, out=None, labels=None, overlay_bounds=True, title=None):
    if labels is not None:
        if len(labels) != len(paths):
            raise ValueError("labels must pair up with inputs")
        inputs = list(zip(paths, labels))
    else:
        inputs = list(paths)
    return render_spec(PlotSpec(inputs=inputs, output=out,
                                overlay_bounds=overlay_bounds, title=title))


def save(fig, path):
    path = str(path)
    if path.endswith(".svg"):
        # svg embeds a timestamp unless told otherwise; keep output stable
        fig.savefig(path, metadata={"Date": None})
    else:
        fig.savefig(path, dpi=150)


def close(fig):
    plt.close(fig)
