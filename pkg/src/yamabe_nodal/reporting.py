"""CSV, JSON and SVG writers.

Every artifact starts with the tool version and the resolved RunConfig
(which carries seed and quadrature resolutions). No timestamps are written,
so identical configurations produce byte-identical files.
"""

import csv
import io
import json
import logging
import math
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any

from yamabe_nodal import __version__
from yamabe_nodal.config import OutputFormat, RunConfig

logger = logging.getLogger(__name__)

Row = dict[str, Any]


def _config_echo(run: RunConfig) -> str:
    return json.dumps(run.model_dump(mode="json"), separators=(",", ":"))


def format_csv(rows: Sequence[Row], run: RunConfig) -> str:
    """Comment header with version and config, then a header row and the rows."""
    buffer = io.StringIO()
    buffer.write(f"# yamabe-nodal {__version__}\n")
    buffer.write(f"# config: {_config_echo(run)}\n")
    buffer.write(f"# seed: {run.quadrature.seed}\n")
    if rows:
        writer = csv.DictWriter(buffer, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _cell(v) for k, v in row.items()})
    return buffer.getvalue()


def _cell(value: Any) -> Any:
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return value


def format_json(rows: Sequence[Row], run: RunConfig, summary: Row | None = None) -> str:
    document: dict[str, Any] = {
        "tool": "yamabe-nodal",
        "version": __version__,
        "config": run.model_dump(mode="json"),
        "rows": [_jsonable(r) for r in rows],
    }
    if summary is not None:
        document["summary"] = _jsonable(summary)
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"


def _jsonable(row: Row) -> Row:
    out: Row = {}
    for key, value in row.items():
        if isinstance(value, float) and not math.isfinite(value):
            out[key] = repr(value)
        else:
            out[key] = value
    return out


def write_table(
    path: Path,
    rows: Sequence[Row],
    run: RunConfig,
    fmt: OutputFormat,
    summary: Row | None = None,
) -> Path:
    """Write rows as CSV or JSON; the suffix follows ``fmt``."""
    if fmt == OutputFormat.SVG:
        raise ValueError("Tables are written as csv or json")
    target = path.with_suffix(f".{fmt.value}")
    text = format_json(rows, run, summary) if fmt == OutputFormat.JSON else format_csv(rows, run)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8")
    logger.info(f"wrote {len(rows)} rows to {target}")
    return target


# ═══════════════════════════════════════════════════════════════════════
# SVG
# ═══════════════════════════════════════════════════════════════════════

SVG_WIDTH = 640
SVG_HEIGHT = 420
MARGIN = 56
CURVE_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _fmt(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".")


def render_svg_plot(
    series: Sequence[tuple[str, Sequence[float], Sequence[float]]],
    run: RunConfig,
    title: str,
    x_ticks: Sequence[float],
    guides: Sequence[tuple[float, str]] = (),
) -> str:
    """A self-contained SVG 1.1 line plot with ticks, guides and a legend."""
    xs = [x for _, sx, _ in series for x in sx]
    ys = [y for _, _, sy in series for y in sy]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(min(ys), 0.0), max(max(ys), 0.0)
    pad = 0.05 * (y_hi - y_lo or 1.0)
    y_lo, y_hi = y_lo - pad, y_hi + pad
    inner_w = SVG_WIDTH - 2 * MARGIN
    inner_h = SVG_HEIGHT - 2 * MARGIN

    def px(x: float) -> float:
        return MARGIN + (x - x_lo) / (x_hi - x_lo) * inner_w

    def py(y: float) -> float:
        return SVG_HEIGHT - MARGIN - (y - y_lo) / (y_hi - y_lo) * inner_h

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{SVG_WIDTH}" height="{SVG_HEIGHT}" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">',
        f"<!-- yamabe-nodal {__version__} config: {_config_echo(run)} -->",
        f'<title>{title}</title>',
        f'<rect x="0" y="0" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>',
        f'<line x1="{MARGIN}" y1="{py(0.0):.2f}" x2="{SVG_WIDTH - MARGIN}" '
        f'y2="{py(0.0):.2f}" stroke="black" stroke-width="1"/>',
        f'<line x1="{px(x_lo):.2f}" y1="{MARGIN}" x2="{px(x_lo):.2f}" '
        f'y2="{SVG_HEIGHT - MARGIN}" stroke="black" stroke-width="1"/>',
    ]
    for t in x_ticks:
        x = px(t)
        out.append(f'<line x1="{x:.2f}" y1="{py(0.0) - 4:.2f}" x2="{x:.2f}" '
                   f'y2="{py(0.0) + 4:.2f}" stroke="black"/>')
        out.append(f'<text x="{x:.2f}" y="{SVG_HEIGHT - MARGIN + 18}" font-size="11" '
                   f'text-anchor="middle">{_fmt(t)}</text>')
    for gx, label in guides:
        x = px(gx)
        out.append(f'<line x1="{x:.2f}" y1="{MARGIN}" x2="{x:.2f}" y2="{SVG_HEIGHT - MARGIN}" '
                   f'stroke="#888888" stroke-dasharray="4,3"/>')
        out.append(f'<text x="{x + 3:.2f}" y="{MARGIN + 12}" font-size="10" '
                   f'fill="#555555">{label}</text>')
    for k, (name, sx, sy) in enumerate(series):
        color = CURVE_COLORS[k % len(CURVE_COLORS)]
        points = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(sx, sy))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                   f'points="{points}"/>')
        ly = MARGIN + 16 * (k + 1)
        lx = SVG_WIDTH - MARGIN - 90
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" '
                   f'stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{ly + 4}" font-size="11">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def sample_curves(
    curves: Sequence[tuple[str, Callable[[float], float]]],
    x_max: float,
    points: int,
) -> list[tuple[str, list[float], list[float]]]:
    xs = [x_max * k / (points - 1) for k in range(points)]
    return [(name, xs, [f(x) for x in xs]) for name, f in curves]


def write_svg(path: Path, text: str) -> Path:
    target = path.with_suffix(".svg")
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8")
    logger.info(f"wrote {target}")
    return target
