"""Result tables: CSV, JSON manifest and SVG line plots.

Files are written to a temporary name and renamed into place, so a failed
emission leaves no partial output behind.
"""

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

__all__ = [
    "ResultTable",
    "emit_results",
    "read_csv",
    "render_svg",
    "table_from_sweep",
]

FLOAT_FORMAT = "%.17e"


@dataclass(frozen=True)
class ResultTable:
    """Named columns of equal length plus plot and metadata hints.

    ``series`` lists ``(x_column, y_column, label)`` triples drawn in the
    SVG plot.
    """

    name: str
    columns: dict
    metadata: dict = field(default_factory=dict)
    series: tuple = ()
    xlabel: str = ""
    ylabel: str = ""

    def __post_init__(self):
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) > 1:
            raise ValueError(f"columns differ in length: {lengths}")

    def __len__(self):
        return len(next(iter(self.columns.values()))) if self.columns else 0


def table_from_sweep(result, name=None):
    label = "omega_d / h0" if result.axis == "omega_d" else "lambda / " + \
        result.metadata.get("noise", {}).get("lambda_unit", "J")
    return ResultTable(name or f"sweep_{result.axis}", result.columns(), result.metadata,
                       (("swept_value", "c_max", "C_max"),), label, "C_max")


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return FLOAT_FORMAT % v
    return str(v)


def _csv_text(table):
    names = list(table.columns)
    lines = [",".join(names)]
    cols = [table.columns[k] for k in names]
    for row in zip(*cols):
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def read_csv(path):
    """Parse a CSV written by :func:`emit_results` into float arrays."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    return {name: np.array([float(r[i]) for r in rows]) for i, name in enumerate(header)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _manifest_text(table, files):
    doc = {"name": table.name, "rows": len(table), "columns": list(table.columns),
           "files": files, "metadata": table.metadata}
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"


_W, _H, _PAD = 640, 420, 60
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _ticks(lo, hi, count=5):
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def render_svg(table):
    """SVG 1.1 line plot, one ``polyline`` per series."""
    if not table.series:
        raise ValueError("table declares no plot series")
    xs = np.concatenate([np.asarray(table.columns[x], float) for x, _, _ in table.series])
    ys = np.concatenate([np.asarray(table.columns[y], float) for _, y, _ in table.series])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = min(0.0, float(ys.min())), max(float(ys.max()), 1e-12)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y1 = y0 + 1.0

    def px(x):
        return _PAD + (x - x0) / (x1 - x0) * (_W - 2 * _PAD)

    def py(y):
        return _H - _PAD - (y - y0) / (y1 - y0) * (_H - 2 * _PAD)

    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_W}" '
           f'height="{_H}" viewBox="0 0 {_W} {_H}">',
           f'<title>{escape(table.name)}</title>',
           f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
           f'<g stroke="black" stroke-width="1">'
           f'<line x1="{_PAD}" y1="{_H - _PAD}" x2="{_W - _PAD}" y2="{_H - _PAD}"/>'
           f'<line x1="{_PAD}" y1="{_PAD}" x2="{_PAD}" y2="{_H - _PAD}"/></g>',
           '<g font-family="sans-serif" font-size="11" fill="black">']
    for v in _ticks(x0, x1):
        out.append(f'<text x="{px(v):.2f}" y="{_H - _PAD + 16}" text-anchor="middle">{v:.3g}</text>')
    for v in _ticks(y0, y1):
        out.append(f'<text x="{_PAD - 6}" y="{py(v) + 4:.2f}" text-anchor="end">{v:.3g}</text>')
    out.append(f'<text x="{_W / 2}" y="{_H - 14}" text-anchor="middle" font-size="13">'
               f'{escape(table.xlabel)}</text>')
    out.append(f'<text x="16" y="{_H / 2}" text-anchor="middle" font-size="13" '
               f'transform="rotate(-90 16 {_H / 2})">{escape(table.ylabel)}</text>')
    out.append('</g>')
    for i, (xc, yc, label) in enumerate(table.series):
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(f"{px(x):.3f},{py(y):.3f}" for x, y in
                       zip(np.asarray(table.columns[xc], float), np.asarray(table.columns[yc], float)))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}">'
                   f'<title>{escape(label)}</title></polyline>')
        out.append(f'<text x="{_W - _PAD}" y="{_PAD + 14 * i}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11" fill="{color}">{escape(label)}</text>')
    out.append('</svg>')
    return "\n".join(out) + "\n"


def _write_atomic(path, text):
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".partial-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_results(table, formats=("csv", "json", "svg"), out_dir="results"):
    """Write ``table`` in the requested formats and return the paths.

    Raises
    ------
    ValueError
        Empty table or unknown format.
    OSError
        Unwritable destination. Files written earlier in the same call are
        removed before the error propagates.
    """
    if hasattr(table, "axis"):
        table = table_from_sweep(table)
    if len(table) == 0:
        raise ValueError("refusing to emit an empty result")
    unknown = set(formats) - {"csv", "json", "svg"}
    if unknown:
        raise ValueError(f"unknown formats {sorted(unknown)}")
    os.makedirs(out_dir, exist_ok=True)
    paths = {f: os.path.join(out_dir, f"{table.name}.{f}") for f in ("csv", "json", "svg")
             if f in formats}
    written = []
    try:
        for fmt, path in paths.items():
            if fmt == "csv":
                text = _csv_text(table)
            elif fmt == "svg":
                text = render_svg(table)
            else:
                text = _manifest_text(table, sorted(os.path.basename(p) for p in paths.values()))
            _write_atomic(path, text)
            written.append(path)
    except BaseException:
        for path in written:
            os.unlink(path)
        raise
    return list(paths.values())
