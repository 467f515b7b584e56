"""Line plots from sweep CSVs, written as standalone SVG."""

from __future__ import annotations

import csv
import math
from html import escape
from pathlib import Path

from synclab import __version__
from synclab.errors import UsageError

WIDTH, HEIGHT = 800, 600
MARGIN = {"left": 90, "right": 160, "top": 40, "bottom": 70}
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


def _read(path: Path) -> list[dict]:
    if not path.exists():
        raise UsageError(f"no such file: {path}")
    with path.open(newline="") as fh:
        return list(csv.DictReader(fh))


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * k / (count - 1) for k in range(count)]


def emit_plot(
    csv_path: str | Path,
    out_path: str | Path,
    x: str,
    y: str,
    series: str | None = None,
    log_y: bool = False,
    err: str | None = None,
) -> Path:
    """One polyline per value of ``series``; error bars from ``err`` or a ``stderr``-like column."""
    csv_path, out_path = Path(csv_path), Path(out_path)
    rows = _read(csv_path)
    if not rows:
        raise UsageError(f"{csv_path} has no data rows")
    cols = rows[0].keys()
    for name in (x, y, series, err):
        if name is not None and name not in cols:
            raise UsageError(f"column {name!r} not found in {csv_path}")
    if err is None:
        for cand in (f"{y}_stderr", "stderr", y.replace("mean_", "") + "_stderr"):
            if cand in cols:
                err = cand
                break

    groups: dict[str, list[tuple[float, float, float]]] = {}
    for row in rows:
        key = row[series] if series else y
        e = float(row[err]) if err and row[err] else 0.0
        groups.setdefault(key, []).append((float(row[x]), float(row[y]), e))
    for pts in groups.values():
        pts.sort()

    def ty(v: float) -> float:
        if not log_y:
            return v
        if v <= 0:
            raise UsageError(f"log_y needs positive {y} values, got {v}")
        return math.log10(v)

    xs = [p[0] for pts in groups.values() for p in pts]
    ys = [ty(v) for pts in groups.values() for p in pts for v in (p[1] - p[2], p[1] + p[2]) if not log_y or v > 0]
    ys += [ty(p[1]) for pts in groups.values() for p in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(v):
        return MARGIN["left"] + (v - x0) / (x1 - x0) * pw

    def py(v):
        return MARGIN["top"] + (1 - (v - y0) / (y1 - y0)) * ph

    seeds = sorted({row.get("seed", "") for row in rows} - {""})
    versions = sorted({row.get("tool_version", "") for row in rows} - {""}) or [__version__]
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}">',
        f"<desc>source={escape(csv_path.name)} seed={escape(','.join(seeds))} "
        f"tool_version={escape(','.join(versions))}</desc>",
        '<rect width="100%" height="100%" fill="white"/>',
        f'<g stroke="black" fill="none"><rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}"/></g>',
        '<g font-family="sans-serif" font-size="12">',
    ]
    for v in _ticks(x0, x1):
        out.append(f'<line x1="{px(v):.2f}" y1="{MARGIN["top"] + ph}" x2="{px(v):.2f}" y2="{MARGIN["top"] + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px(v):.2f}" y="{MARGIN["top"] + ph + 20}" text-anchor="middle">{v:.4g}</text>')
    for v in _ticks(y0, y1):
        label = f"{10 ** v:.3g}" if log_y else f"{v:.4g}"
        out.append(f'<line x1="{MARGIN["left"] - 5}" y1="{py(v):.2f}" x2="{MARGIN["left"]}" y2="{py(v):.2f}" stroke="black"/>')
        out.append(f'<text x="{MARGIN["left"] - 8}" y="{py(v) + 4:.2f}" text-anchor="end">{label}</text>')
    out.append(f'<text x="{MARGIN["left"] + pw / 2}" y="{HEIGHT - 20}" text-anchor="middle" font-size="14">{escape(x)}</text>')
    ylab = f"{y} (log scale)" if log_y else y
    out.append(
        f'<text x="20" y="{MARGIN["top"] + ph / 2}" text-anchor="middle" font-size="14" '
        f'transform="rotate(-90 20 {MARGIN["top"] + ph / 2})">{escape(ylab)}</text>'
    )
    out.append("</g>")

    for k, (key, pts) in enumerate(groups.items()):
        color = COLORS[k % len(COLORS)]
        coords = " ".join(f"{px(a):.2f},{py(ty(b)):.2f}" for a, b, _ in pts)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{coords}"/>')
        for a, b, e in pts:
            if e > 0 and (not log_y or b - e > 0):
                out.append(
                    f'<line x1="{px(a):.2f}" y1="{py(ty(b - e)):.2f}" x2="{px(a):.2f}" y2="{py(ty(b + e)):.2f}" stroke="{color}"/>'
                )
        ly = MARGIN["top"] + 20 + 20 * k
        lx = WIDTH - MARGIN["right"] + 15
        label = f"{series}={key}" if series else key
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 25}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 30}" y="{ly + 4}" font-family="sans-serif" font-size="12">{escape(label)}</text>')
    out.append("</svg>")

    out_path.write_text("\n".join(out) + "\n")
    return out_path
