"""Plain-text outputs: CSV tables with metadata headers and polyline SVG plots."""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

FLOAT_FORMAT = "%.11e"


@dataclass(frozen=True)
class CsvTable:
    columns: tuple[str, ...]
    rows: np.ndarray  # shape (n_rows, n_columns)
    metadata: tuple[str, ...] = field(default=())

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim != 2 or rows.shape[1] != len(self.columns):
            raise ValueError(f"table has {len(self.columns)} columns but rows of shape {rows.shape}")
        object.__setattr__(self, "rows", rows)

    def column(self, name: str) -> np.ndarray:
        try:
            return self.rows[:, self.columns.index(name)]
        except ValueError:
            raise KeyError(f"no column {name!r}; have {', '.join(self.columns)}") from None

    def select(self, mask: np.ndarray) -> "CsvTable":
        return CsvTable(self.columns, self.rows[np.asarray(mask, dtype=bool)], self.metadata)


def _fmt(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return FLOAT_FORMAT % (x + 0.0)  # no negative zero


def format_csv(table: CsvTable) -> str:
    lines = [f"# {m}" for m in table.metadata]
    lines.append(",".join(table.columns))
    lines.extend(",".join(_fmt(x) for x in row) for row in table.rows)
    return "\n".join(lines) + "\n"


def read_csv(path) -> CsvTable:
    meta, header, rows = [], None, []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                meta.append(line[1:].strip())
            elif header is None:
                header = tuple(line.split(","))
            elif line:
                rows.append([float(v) for v in line.split(",")])
    if header is None:
        raise ValueError(f"{path}: no header row")
    return CsvTable(header, np.array(rows).reshape(-1, len(header)), tuple(meta))


def write_atomic(path, text: str) -> None:
    """Write via a temporary file in the target directory, then rename over ``path``."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


_PALETTE = ("#1f4e9c", "#c0392b", "#222222", "#2e8b57", "#8e44ad", "#d35400")


def emit_svg(
    table: CsvTable,
    x: str,
    ys: Sequence[str],
    log_y: bool = False,
    title: str = "",
    width: int = 640,
    height: int = 420,
) -> str:
    """Polyline plot of ``ys`` against ``x``; output depends only on the arguments.

    Non-finite points (and non-positive ones on a log axis) break the line.
    """
    xv = table.column(x)
    series = [(name, table.column(name)) for name in ys]
    if not series:
        raise ValueError("no y columns requested")

    def ytrans(v):
        v = np.asarray(v, dtype=float)
        if not log_y:
            return v
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(v > 0, np.log10(v), np.nan)

    ok_x = np.isfinite(xv)
    finite_y = np.concatenate([ytrans(v)[ok_x] for _, v in series])
    finite_y = finite_y[np.isfinite(finite_y)]
    if not ok_x.any() or finite_y.size == 0:
        raise ValueError("nothing finite to plot")
    x0, x1 = float(xv[ok_x].min()), float(xv[ok_x].max())
    y0, y1 = float(finite_y.min()), float(finite_y.max())
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    left, right, top, bottom = 70, 20, 30, 50
    pw, ph = width - left - right, height - top - bottom

    def px(v):
        return left + (v - x0) / (x1 - x0) * pw

    def py(v):
        return top + (1 - (v - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#000"/>',
    ]
    if title:
        out.append(f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" font-size="13">{title}</text>')
    ylabel = f"log10 {', '.join(ys)}" if log_y else ", ".join(ys)
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 12}" text-anchor="middle" font-size="12">{x}</text>')
    out.append(
        f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 16 {top + ph / 2:.1f})">{ylabel}</text>'
    )
    for frac in (0.0, 0.5, 1.0):
        xt, yt = x0 + frac * (x1 - x0), y0 + frac * (y1 - y0)
        out.append(f'<text x="{px(xt):.2f}" y="{top + ph + 16}" text-anchor="middle" font-size="10">{xt:.4g}</text>')
        out.append(f'<text x="{left - 6}" y="{py(yt) + 3:.2f}" text-anchor="end" font-size="10">{yt:.4g}</text>')
    for i, (name, values) in enumerate(series):
        colour = _PALETTE[i % len(_PALETTE)]
        yv = ytrans(values)
        good = ok_x & np.isfinite(yv)
        # split into runs of consecutive good points
        runs, current = [], []
        for xi, yi, g in zip(xv, yv, good):
            if g:
                current.append(f"{px(xi):.2f},{py(yi):.2f}")
            elif current:
                runs.append(current)
                current = []
        if current:
            runs.append(current)
        for run in runs:
            out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{" ".join(run)}"/>')
        out.append(
            f'<text x="{left + pw - 4}" y="{top + 14 + 14 * i}" text-anchor="end" '
            f'font-size="11" fill="{colour}">{name}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
