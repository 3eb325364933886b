"""Minimal self-contained SVG line plots (no plotting library)."""
from __future__ import annotations

from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=70, right=20, top=30, bottom=55)
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b",
           "#e377c2", "#7f7f7f", "#bcbd22"]
N_TICKS = 5
MAX_LEGEND = 10


def _span(values):
    lo, hi = min(values), max(values)
    if hi == lo:
        # flat data: keep it on the lower axis when it is zero, centered otherwise
        pad = abs(hi) * 0.5 if hi != 0 else 1.0
        return (lo, lo + pad) if lo == 0 else (lo - pad, hi + pad)
    return lo, hi


def _tick(v):
    return format(v, ".3g")


def line_plot(series, title, xlabel, ylabel, dashed=()) -> str:
    """Render ``{label: [(x, y), ...]}`` as an SVG document.

    Labels listed in ``dashed`` are drawn with a dashed stroke.
    """
    if not series or any(len(pts) == 0 for pts in series.values()):
        raise ValueError("cannot plot empty data")
    xs = [x for pts in series.values() for x, _ in pts]
    ys = [y for pts in series.values() for _, y in pts]
    x0, x1 = _span(xs)
    y0, y1 = _span(ys)
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(x):
        return MARGIN["left"] + (x - x0) / (x1 - x0) * pw

    def py(y):
        return MARGIN["top"] + ph - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>',
    ]
    left, bottom = MARGIN["left"], MARGIN["top"] + ph
    out.append(f'<line class="axis" x1="{left}" y1="{bottom}" x2="{left + pw}" y2="{bottom}" stroke="black"/>')
    out.append(f'<line class="axis" x1="{left}" y1="{MARGIN["top"]}" x2="{left}" y2="{bottom}" stroke="black"/>')
    for k in range(N_TICKS + 1):
        xv = x0 + (x1 - x0) * k / N_TICKS
        yv = y0 + (y1 - y0) * k / N_TICKS
        out.append(f'<text x="{px(xv):.1f}" y="{bottom + 16}" text-anchor="middle">{_tick(xv)}</text>')
        out.append(f'<text x="{left - 6}" y="{py(yv) + 4:.1f}" text-anchor="end">{_tick(yv)}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{MARGIN["top"] + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {MARGIN["top"] + ph / 2:.1f})">{escape(ylabel)}</text>')

    for n, (label, pts) in enumerate(series.items()):
        color = PALETTE[n % len(PALETTE)]
        coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in pts)
        dash = ' stroke-dasharray="4 3"' if label in dashed else ""
        out.append(f'<polyline data-series="{escape(label)}" fill="none" stroke="{color}" '
                   f'stroke-width="1.5"{dash} points="{coords}"/>')
    if 1 < len(series) <= MAX_LEGEND:
        for n, label in enumerate(series):
            y = MARGIN["top"] + 12 + 14 * n
            out.append(f'<text x="{left + pw - 4}" y="{y}" text-anchor="end" '
                       f'fill="{PALETTE[n % len(PALETTE)]}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def sweep_svg(record) -> str:
    """Best fitness against filling fraction, one polyline."""
    if not record.sweep:
        raise ValueError("sweep record is empty")
    pts = [(K / record.n_sites, f) for K, f in record.sweep]
    return line_plot({"best": pts}, "Optimized NN concurrence", "filling fraction K/N",
                     "mean NN concurrence")


def generations_svg(record) -> str:
    """Best and average fitness per generation, two polylines per filling.

    Fillings are laid end to end along the x axis in sweep order.
    """
    if not record.generations:
        raise ValueError("generation record is empty")
    per_K: dict[int, list] = {}
    for K, g, avg, best in record.generations:
        per_K.setdefault(K, []).append((g, avg, best))
    series, dashed, offset = {}, set(), 0
    for K, rows in per_K.items():
        series[f"K={K} best"] = [(offset + g, b) for g, _, b in rows]
        series[f"K={K} avg"] = [(offset + g, a) for g, a, _ in rows]
        dashed.add(f"K={K} avg")
        offset += max(g for g, _, _ in rows) + 1
    return line_plot(series, "Fitness per generation", "generation", "fitness", dashed)


def emit_svg(record, kind) -> str:
    if kind == "sweep":
        return sweep_svg(record)
    if kind == "generations":
        return generations_svg(record)
    raise ValueError(f"unknown plot kind {kind!r}")
