"""Self-contained SVG line charts of training traces.

No plotting dependency: the chart is assembled as an SVG string with a
fixed 800 x 500 viewBox. Dependence series (hsic_xz, hsic_zy) are drawn
on a fixed [0, 1] axis so charts from different runs are comparable at a
glance; the loss series autoscales. Epochs whose value is degenerate
(None) break the polyline instead of being interpolated over.
"""

from __future__ import annotations

from .errors import EmptyTrace, MissingSeries
from .trace import TrainingTrace

VIEW_W, VIEW_H = 800, 500
PLOT_LEFT, PLOT_RIGHT = 60.0, 780.0
PLOT_TOP, PLOT_BOTTOM = 20.0, 460.0
Y_GRIDLINES = 10

DEPENDENCE_SERIES = ("hsic_xz", "hsic_zy")
SERIES = (*DEPENDENCE_SERIES, "loss")

# Color-blind friendly cycle (Okabe-Ito, minus black).
PALETTE = ("#0072b2", "#d55e00", "#009e73", "#cc79a7",
           "#e69f00", "#56b4e9", "#f0e442")


def _escape(text):
    return (str(text).replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def _fmt(v):
    return f"{v:.2f}"


def _x_pos(epoch, last_epoch):
    if last_epoch <= 1:
        return 0.5 * (PLOT_LEFT + PLOT_RIGHT)
    frac = (epoch - 1) / (last_epoch - 1)
    return PLOT_LEFT + frac * (PLOT_RIGHT - PLOT_LEFT)


def _y_pos(value, y_max):
    frac = value / y_max
    return PLOT_BOTTOM - frac * (PLOT_BOTTOM - PLOT_TOP)


def _segments(records, series):
    """Consecutive runs of numeric values as (epoch, value) lists."""
    runs, current = [], []
    field = "train_loss" if series == "loss" else series
    for record in records:
        value = getattr(record, field)
        if value is None:
            if current:
                runs.append(current)
                current = []
        else:
            current.append((record.epoch, value))
    if current:
        runs.append(current)
    return runs


def render_plane_svg(traces, series: str) -> str:
    """Render one series of one or more traces as an SVG document string.

    series is "hsic_xz", "hsic_zy", or "loss" (the training loss).
    Raises EmptyTrace for a trace with no records and MissingSeries when
    a trace has no numeric value anywhere in the requested series.
    """
    if isinstance(traces, TrainingTrace):
        traces = [traces]
    traces = list(traces)
    if not traces:
        raise EmptyTrace("nothing to plot")
    if series not in SERIES:
        raise MissingSeries(f"unknown series {series!r}; expected one of {SERIES}")

    per_trace = []
    for trace in traces:
        if not trace.records:
            raise EmptyTrace(f"trace {trace.fingerprint!r} has no records")
        runs = _segments(trace.records, series)
        if not runs:
            raise MissingSeries(
                f"trace {trace.fingerprint!r} has no numeric values for {series!r}"
            )
        per_trace.append(runs)

    last_epoch = max(trace.records[-1].epoch for trace in traces)
    if series in DEPENDENCE_SERIES:
        y_max = 1.0
    else:
        peak = max(v for runs in per_trace for run in runs for _, v in run)
        y_max = peak if peak > 0 else 1.0

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {VIEW_W} {VIEW_H}" '
        f'font-family="sans-serif" font-size="12">',
        f'<rect width="{VIEW_W}" height="{VIEW_H}" fill="white"/>',
        f'<text x="{_fmt((PLOT_LEFT + PLOT_RIGHT) / 2)}" y="14" '
        f'text-anchor="middle" font-size="14">{_escape(series)} per epoch</text>',
    ]

    for i in range(1, Y_GRIDLINES + 1):
        y = PLOT_BOTTOM - i / Y_GRIDLINES * (PLOT_BOTTOM - PLOT_TOP)
        parts.append(
            f'<line x1="{_fmt(PLOT_LEFT)}" y1="{_fmt(y)}" x2="{_fmt(PLOT_RIGHT)}" '
            f'y2="{_fmt(y)}" stroke="#dddddd" stroke-width="1"/>'
        )
        label = y_max * i / Y_GRIDLINES
        parts.append(
            f'<text x="{_fmt(PLOT_LEFT - 6)}" y="{_fmt(y + 4)}" '
            f'text-anchor="end" fill="#555555">{label:.3g}</text>'
        )
    parts.append(
        f'<text x="{_fmt(PLOT_LEFT - 6)}" y="{_fmt(PLOT_BOTTOM + 4)}" '
        f'text-anchor="end" fill="#555555">0</text>'
    )

    shown = min(last_epoch, 6)
    ticks = sorted({round(1 + i * (last_epoch - 1) / max(shown - 1, 1))
                    for i in range(shown)})
    for epoch in ticks:
        x = _x_pos(epoch, last_epoch)
        parts.append(
            f'<line x1="{_fmt(x)}" y1="{_fmt(PLOT_BOTTOM)}" x2="{_fmt(x)}" '
            f'y2="{_fmt(PLOT_BOTTOM + 5)}" stroke="#333333" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(x)}" y="{_fmt(PLOT_BOTTOM + 18)}" '
            f'text-anchor="middle" fill="#555555">{epoch}</text>'
        )

    parts.append(
        f'<line x1="{_fmt(PLOT_LEFT)}" y1="{_fmt(PLOT_TOP)}" x2="{_fmt(PLOT_LEFT)}" '
        f'y2="{_fmt(PLOT_BOTTOM)}" stroke="#333333" stroke-width="1.5"/>'
    )
    parts.append(
        f'<line x1="{_fmt(PLOT_LEFT)}" y1="{_fmt(PLOT_BOTTOM)}" '
        f'x2="{_fmt(PLOT_RIGHT)}" y2="{_fmt(PLOT_BOTTOM)}" '
        f'stroke="#333333" stroke-width="1.5"/>'
    )
    parts.append(
        f'<text x="{_fmt((PLOT_LEFT + PLOT_RIGHT) / 2)}" y="{_fmt(VIEW_H - 8)}" '
        f'text-anchor="middle">epoch</text>'
    )
    parts.append(
        f'<text x="14" y="{_fmt((PLOT_TOP + PLOT_BOTTOM) / 2)}" text-anchor="middle" '
        f'transform="rotate(-90 14 {_fmt((PLOT_TOP + PLOT_BOTTOM) / 2)})">'
        f'{_escape(series)}</text>'
    )

    for t, (trace, runs) in enumerate(zip(traces, per_trace)):
        color = PALETTE[t % len(PALETTE)]
        for run in runs:
            if len(run) == 1:
                epoch, value = run[0]
                parts.append(
                    f'<circle cx="{_fmt(_x_pos(epoch, last_epoch))}" '
                    f'cy="{_fmt(_y_pos(value, y_max))}" r="3" fill="{color}"/>'
                )
            else:
                points = " ".join(
                    f"{_fmt(_x_pos(e, last_epoch))},{_fmt(_y_pos(v, y_max))}"
                    for e, v in run
                )
                parts.append(
                    f'<polyline points="{points}" fill="none" stroke="{color}" '
                    f'stroke-width="2"/>'
                )
        legend_y = PLOT_TOP + 16 + 18 * t
        parts.append(
            f'<line x1="{_fmt(PLOT_LEFT + 10)}" y1="{_fmt(legend_y - 4)}" '
            f'x2="{_fmt(PLOT_LEFT + 34)}" y2="{_fmt(legend_y - 4)}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{_fmt(PLOT_LEFT + 40)}" y="{_fmt(legend_y)}" '
            f'fill="#333333">{_escape(trace.fingerprint)}</text>'
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
