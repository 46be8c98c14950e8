#!/usr/bin/env python3
"""Render sweep and test-count CSVs as static figures.

Reads the experiment harness CSV schemas and draws one curve per
(setting, constraint) group: success rate versus pool count for
non-adaptive rows, cumulative fraction versus tests used for adaptive
rows.  Predicted boundaries come from a thresholds sidecar JSON (the
`pooltest thresholds` payload) and are drawn as dashed vertical lines;
a boundary outside the plotted range is drawn at the margin with an
annotation giving its true position.  No quantity is recomputed here.

Usage:
    python3 plots/render.py --sweep sweep.csv --thresholds t.json --out fig.svg

--sweep may repeat; all files must share one schema.  The output format
follows the file extension (.svg is the byte-stable default, raster
formats like .png are opt-in).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "pooltest-plots"
matplotlib.rcParams["svg.fonttype"] = "none"

import matplotlib.pyplot as plt

NONADAPTIVE_HEADER = ("setting", "n", "theta", "k", "constraint", "m", "trials",
                      "successes", "success_rate", "wall_ms", "master_seed")
ADAPTIVE_HEADER = ("setting", "n", "theta", "k", "constraint", "tests_used",
                   "count", "cumulative_fraction", "master_seed")

# sidecar keys that become vertical markers, in drawing order
MARKER_KEYS = ("m_inf_delta", "m_dd_delta", "m_ada_delta",
               "m_inf_gamma", "m_dd_gamma", "m_ada_gamma")


class RenderError(Exception):
    """Bad input: unreadable file, schema mismatch, or conflicting modes."""


@dataclass(frozen=True)
class FigureSpec:
    sweep_paths: tuple[str, ...]
    out_path: str
    thresholds_path: str | None = None
    title: str | None = None


@dataclass(frozen=True)
class CurvePoint:
    x: float
    y: float


@dataclass
class LoadedData:
    mode: str                                   # "nonadaptive" | "adaptive"
    curves: dict[tuple[str, int], list[CurvePoint]] = field(default_factory=dict)


def _detect_mode(header: tuple[str, ...], path: str) -> str:
    if header == NONADAPTIVE_HEADER:
        return "nonadaptive"
    if header == ADAPTIVE_HEADER:
        return "adaptive"
    # name the first column that breaks whichever schema fits better
    expected = max((NONADAPTIVE_HEADER, ADAPTIVE_HEADER),
                   key=lambda cols: len(set(cols) & set(header)))
    for col in expected:
        if col not in header:
            raise RenderError(f"{path}: schema mismatch: missing column {col!r}")
    for col in header:
        if col not in expected:
            raise RenderError(f"{path}: schema mismatch: unexpected column {col!r}")
    raise RenderError(f"{path}: schema mismatch: columns are out of order")


def load_sweeps(paths: tuple[str, ...]) -> LoadedData:
    """Parse one or more CSVs into per-(setting, constraint) curves."""
    data: LoadedData | None = None
    for path in paths:
        try:
            with open(path, "r", encoding="utf-8", newline="") as fh:
                rows = list(csv.reader(fh))
        except OSError as exc:
            raise RenderError(f"cannot read {path}: {exc}") from None
        if not rows:
            raise RenderError(f"{path}: schema mismatch: file has no header row")
        mode = _detect_mode(tuple(rows[0]), path)
        if data is None:
            data = LoadedData(mode=mode)
        elif data.mode != mode:
            raise RenderError(f"{path}: cannot mix adaptive and non-adaptive inputs")
        for lineno, row in enumerate(rows[1:], start=2):
            try:
                record = dict(zip(rows[0], row, strict=True))
                key = (record["setting"], int(record["constraint"]))
                if mode == "nonadaptive":
                    if int(record["trials"]) == 0:
                        continue        # infeasible grid point marker row
                    point = CurvePoint(float(record["m"]), float(record["success_rate"]))
                else:
                    point = CurvePoint(float(record["tests_used"]),
                                       float(record["cumulative_fraction"]))
            except ValueError as exc:
                raise RenderError(f"{path}:{lineno}: bad row: {exc}") from None
            if math.isnan(point.y):
                continue
            data.curves.setdefault(key, []).append(point)
    assert data is not None
    for points in data.curves.values():
        points.sort(key=lambda p: p.x)
    return data


def load_markers(path: str | None) -> dict[str, float]:
    """Non-null marker values from a thresholds sidecar, in fixed order."""
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise RenderError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise RenderError(f"{path}: not valid JSON: {exc}") from None
    if not isinstance(payload, dict):
        raise RenderError(f"{path}: expected a JSON object")
    return {key: float(payload[key]) for key in MARKER_KEYS
            if payload.get(key) is not None}


def _curve_label(setting: str, constraint: int) -> str:
    budget = "delta" if "Delta" in setting else "gamma"
    return f"{setting}, {budget}={constraint}"


def render(spec: FigureSpec) -> None:
    data = load_sweeps(spec.sweep_paths)
    markers = load_markers(spec.thresholds_path)

    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for (setting, constraint), points in sorted(data.curves.items()):
        line, = ax.plot([p.x for p in points], [p.y for p in points],
                        marker="o", markersize=4,
                        label=_curve_label(setting, constraint))
        line.set_gid(f"curve-{setting}-{constraint}")

    xs = [p.x for points in data.curves.values() for p in points]
    lo, hi = (min(xs), max(xs)) if xs else (None, None)
    for key, value in markers.items():
        drawn = value if lo is None else min(max(value, lo), hi)
        line = ax.axvline(drawn, linestyle="--", linewidth=1.0, color="0.35")
        line.set_gid(f"marker-{key}")
        text = key if drawn == value else f"{key} at m={value:.0f} (off range)"
        note = ax.annotate(text, xy=(drawn, 0.02), xycoords=("data", "axes fraction"),
                           rotation=90, fontsize=7, ha="right", va="bottom")
        note.set_gid(f"annotation-{key}")

    if data.mode == "nonadaptive":
        ax.set_xlabel("number of pools m")
        ax.set_ylabel("success rate")
    else:
        ax.set_xlabel("tests used")
        ax.set_ylabel("cumulative fraction of trials")
    ax.set_ylim(-0.02, 1.05)
    if spec.title:
        ax.set_title(spec.title)
    if data.curves:
        legend = ax.legend(loc="best", fontsize=8)
        legend.set_gid("legend")

    fig.tight_layout()
    metadata = {"Date": None} if spec.out_path.endswith(".svg") else None
    fig.savefig(spec.out_path, metadata=metadata)
    plt.close(fig)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sweep", action="append", required=True,
                        help="experiment CSV; may repeat, one schema across files")
    parser.add_argument("--thresholds", default=None,
                        help="sidecar JSON with predicted boundaries to mark")
    parser.add_argument("--out", required=True,
                        help="output image path (.svg default, .png opt-in)")
    parser.add_argument("--title", default=None)
    args = parser.parse_args(argv)

    spec = FigureSpec(sweep_paths=tuple(args.sweep), out_path=args.out,
                      thresholds_path=args.thresholds, title=args.title)
    try:
        render(spec)
    except RenderError as exc:
        print(f"render error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
