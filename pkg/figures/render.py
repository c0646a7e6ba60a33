#!/usr/bin/env python3
"""Render delimited spectra into publication-style figures.

Reads a small declarative spec file describing panels and series, pulls the
series from CSV files produced by the epr-ifo command line tool, and writes
one raster (png) and one vector (pdf) image per figure. Rendering is a pure
function of the CSV content: the style is pinned and document metadata is
stripped, so re-rendering identical inputs yields identical bytes.

Usage:
    figures/render.py --spec <path> --outdir <dir> [--csv-dir <dir>]

CSV paths in the spec resolve against --csv-dir (default: the spec's
directory).
"""

from __future__ import annotations

import argparse
import csv
import sys
import warnings
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "figure.dpi": 100,
    "savefig.dpi": 150,
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.4,
    "legend.fontsize": 9,
    "legend.framealpha": 0.9,
    "axes.prop_cycle": plt.cycler(
        color=["black", "#d62728", "#1f77b4", "#9467bd", "#2ca02c", "#ff7f0e"]
    ),
}


class RenderError(Exception):
    pass


def read_csv_columns(path: Path) -> dict[str, list[float]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        columns: dict[str, list[float]] = {name: [] for name in header}
        for row in reader:
            for name, value in zip(header, row):
                columns[name].append(float(value))
    return columns


def parse_spec(text: str):
    """Parse the figure spec into (figure, panels, series) dictionaries."""
    figure: dict[str, str] = {}
    panels: dict[int, dict[str, str]] = {}
    series: list[dict[str, str]] = []
    target: dict[str, str] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        # full-line comments only: values may contain '#rrggbb' colors
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip().lower()
            if name == "figure":
                target = figure
            elif name.startswith("panel"):
                try:
                    idx = int(name.split()[1])
                except (IndexError, ValueError):
                    raise RenderError(f"line {lineno}: panel sections are '[panel N]'")
                target = panels.setdefault(idx, {})
            elif name == "series":
                target = {}
                series.append(target)
            else:
                raise RenderError(f"line {lineno}: unknown section [{name}]")
            continue
        if target is None or "=" not in line:
            raise RenderError(f"line {lineno}: expected 'key = value' inside a section")
        key, value = (part.strip() for part in line.split("=", 1))
        target[key] = value
    return figure, panels, series


def render(spec_path: Path, outdir: Path, csv_dir: Path | None = None) -> list[Path]:
    figure, panels, series = parse_spec(spec_path.read_text())
    if not series:
        warnings.warn(f"{spec_path}: no series defined, nothing to render")
        return []
    base = csv_dir if csv_dir is not None else spec_path.parent
    name = figure.get("name", spec_path.stem)
    n_panels = int(figure.get("panels", "1"))
    width = float(figure.get("width", "6.5"))
    height = float(figure.get("height", str(2.8 * n_panels)))

    csv_cache: dict[Path, dict[str, list[float]]] = {}
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(n_panels, 1, figsize=(width, height), squeeze=False)
        axes = axes[:, 0]
        for item in series:
            panel = int(item.get("panel", "1"))
            if not 1 <= panel <= n_panels:
                raise RenderError(f"series panel {panel} outside 1..{n_panels}")
            csv_path = base / item["csv"]
            if csv_path not in csv_cache:
                if not csv_path.exists():
                    raise RenderError(f"missing CSV {csv_path}")
                csv_cache[csv_path] = read_csv_columns(csv_path)
            columns = csv_cache[csv_path]
            for axis in ("x", "y"):
                column = item[axis]
                if column not in columns:
                    raise RenderError(
                        f"{csv_path.name} has no column {column!r} "
                        f"(available: {', '.join(columns)})"
                    )
            x = columns[item["x"]]
            y = columns[item["y"]]
            if item.get("sqrt", "false").lower() in ("true", "yes", "1"):
                y = [v**0.5 for v in y]
            kwargs = {}
            if "color" in item:
                kwargs["color"] = item["color"]
            axes[panel - 1].plot(
                x, y, item.get("style", "-"), label=item.get("label"), **kwargs
            )
        for idx in range(1, n_panels + 1):
            ax = axes[idx - 1]
            opts = panels.get(idx, {})
            ax.set_xscale(opts.get("xscale", "log"))
            ax.set_yscale(opts.get("yscale", "linear"))
            ax.set_xlabel(opts.get("xlabel", "frequency [Hz]"))
            ax.set_ylabel(opts.get("ylabel", ""))
            if "title" in opts:
                ax.set_title(opts["title"])
            ax.legend(loc=opts.get("legend", "best"))
        if "suptitle" in figure:
            fig.suptitle(figure["suptitle"])
        fig.tight_layout()
        outdir.mkdir(parents=True, exist_ok=True)
        outputs = []
        png = outdir / f"{name}.png"
        fig.savefig(png, metadata={"Software": None})
        outputs.append(png)
        pdf = outdir / f"{name}.pdf"
        fig.savefig(
            pdf,
            metadata={"CreationDate": None, "Producer": None, "Creator": None},
        )
        outputs.append(pdf)
        plt.close(fig)
    return outputs


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--spec", required=True)
    parser.add_argument("--outdir", required=True)
    parser.add_argument("--csv-dir", default=None)
    args = parser.parse_args(argv)
    try:
        outputs = render(
            Path(args.spec),
            Path(args.outdir),
            Path(args.csv_dir) if args.csv_dir else None,
        )
    except (RenderError, OSError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in outputs:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
