"""Rendering of run documents to JSON, CSV and SVG.

Rendering returns strings; the CLI writes every file once the run is over.
"""

import csv
import io
import logging
import math
import os
from typing import Dict, List, Optional, Sequence, Tuple

from jinja2 import Environment, FileSystemLoader

from bbops.report_models import ModulusFit, RateReport, Report, RunDocument

logger = logging.getLogger(__name__)

template_loader = FileSystemLoader(os.path.join(os.path.dirname(__file__), "templates"))
jinja_env = Environment(loader=template_loader, autoescape=True)

SVG_WIDTH = 640
SVG_HEIGHT = 420
MARGINS = {"left": 72, "right": 24, "top": 40, "bottom": 52}
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")

SUMMARY_COLUMNS = ["kind", "anchor", "name", "passed", "value"]

Series = Tuple[str, Sequence[Tuple[float, float]]]


def render_json(document: RunDocument) -> str:
    return document.model_dump_json(indent=2) + "\n"


def load_document(text: str) -> RunDocument:
    return RunDocument.model_validate_json(text)


def summary_row(report: Report) -> List[str]:
    kind = report.kind
    name = getattr(report, "name", None) or getattr(report, "lemma", None) or ""
    name = getattr(name, "value", name)
    if hasattr(report, "f") and not name:
        name = report.f.label
    if kind == "moment":
        name = f"t^{report.j} at x={report.x:g} ({report.config.variant.value})"
    elif kind == "lemma3":
        name = f"n={report.n}, x={report.x:g}"
    value = ""
    for attr in ("max_ratio", "max_violation", "gap", "slope", "gamma_hat", "abs_gap"):
        v = getattr(report, attr, None)
        if v is not None:
            value = repr(float(v))
            break
    passed = getattr(report, "passed", None)
    return [kind, report.anchor, str(name), "" if passed is None else str(passed).lower(), value]


def csv_table(reports: Sequence[Report]) -> Tuple[List[str], List[List[str]]]:
    """Header and rows for the CSV of a run.

    A single rate report gives ``n,sup_error``, a single modulus fit
    ``t,omega``; anything else gets one summary row per report.
    """
    if len(reports) == 1 and isinstance(reports[0], RateReport):
        return ["n", "sup_error"], [[str(r.n), repr(r.sup_error)] for r in reports[0].rows]
    if len(reports) == 1 and isinstance(reports[0], ModulusFit):
        return ["t", "omega"], [[repr(r.t), repr(r.omega)] for r in reports[0].rows]
    return SUMMARY_COLUMNS, [summary_row(r) for r in reports]


def render_csv(reports: Sequence[Report]) -> str:
    header, rows = csv_table(reports)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _log_ticks(lo: float, hi: float) -> List[float]:
    first, last = math.floor(lo), math.ceil(hi)
    ticks = [float(p) for p in range(first, last + 1) if lo - 1e-9 <= p <= hi + 1e-9]
    return ticks or [lo, hi]


def _tick_label(exponent: float) -> str:
    if float(exponent).is_integer():
        return f"1e{int(exponent)}"
    return f"{10.0 ** exponent:.3g}"


def render_svg(
    series: Sequence[Series],
    title: str,
    x_label: str,
    y_label: str,
) -> str:
    """Standalone SVG 1.1 log-log polyline plot; non-positive samples are dropped."""
    logged: List[Tuple[str, List[Tuple[float, float]]]] = []
    for name, points in series:
        kept = [
            (math.log10(x), math.log10(y))
            for x, y in points
            if x > 0.0 and y > 0.0 and math.isfinite(x) and math.isfinite(y)
        ]
        if len(kept) < len(points):
            logger.debug("Dropped %d non-positive samples from %s", len(points) - len(kept), name)
        if kept:
            logged.append((name, kept))

    all_x = [p[0] for _, pts in logged for p in pts] or [0.0, 1.0]
    all_y = [p[1] for _, pts in logged for p in pts] or [0.0, 1.0]
    x_lo, x_hi = min(all_x), max(all_x)
    y_lo, y_hi = min(all_y), max(all_y)
    if x_hi - x_lo < 1e-12:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi - y_lo < 1e-12:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5

    left, top = MARGINS["left"], MARGINS["top"]
    plot_width = SVG_WIDTH - left - MARGINS["right"]
    plot_height = SVG_HEIGHT - top - MARGINS["bottom"]

    def px(u: float) -> float:
        return round(left + (u - x_lo) / (x_hi - x_lo) * plot_width, 2)

    def py(v: float) -> float:
        return round(top + (y_hi - v) / (y_hi - y_lo) * plot_height, 2)

    series_list: List[Dict] = []
    for i, (name, pts) in enumerate(logged):
        markers = [(px(u), py(v)) for u, v in pts]
        series_list.append(
            {
                "name": name,
                "color": COLORS[i % len(COLORS)],
                "points": " ".join(f"{a},{b}" for a, b in markers),
                "markers": markers,
            }
        )

    template = jinja_env.get_template("plot.svg.j2")
    return template.render(
        title=title,
        x_label=x_label,
        y_label=y_label,
        width=SVG_WIDTH,
        height=SVG_HEIGHT,
        left=left,
        top=top,
        plot_width=plot_width,
        plot_height=plot_height,
        x_ticks=[{"pos": px(t), "label": _tick_label(t)} for t in _log_ticks(x_lo, x_hi)],
        y_ticks=[{"pos": py(t), "label": _tick_label(t)} for t in _log_ticks(y_lo, y_hi)],
        series_list=series_list,
    ) + "\n"


def plot_series(reports: Sequence[Report]) -> Optional[Tuple[List[Series], str, str, str]]:
    """Plottable series of a run: (series, title, x label, y label), or None."""
    rates = [r for r in reports if isinstance(r, RateReport)]
    if rates:
        series = [
            (r.f.label, [(float(row.n), row.sup_error) for row in r.rows]) for r in rates
        ]
        family = rates[0].config_family
        title = f"{family.variant.value} (alpha={family.alpha:g}, beta={family.beta:g})"
        return series, title, "n", "sup |L f - f|"
    moduli = [r for r in reports if isinstance(r, ModulusFit)]
    if moduli:
        series = [
            (f"{m.f.label}, lambda={m.lam:g}", [(row.t, row.omega) for row in m.rows])
            for m in moduli
        ]
        return series, "Weighted modulus of smoothness", "t", "omega(f; t)"
    curves = [r for r in reports if getattr(r, "curve", None)]
    if curves:
        series = [(f"{r.lemma.value} {r.anchor}", list(r.curve)) for r in curves]
        return series, "Direct-estimate ratio", "n", "R(n)"
    return None
