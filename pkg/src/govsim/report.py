"""Deterministic file outputs: runs.csv, aggregate tables, heatmap SVG, manifest.

CSV files are the contract (fixed columns, six-decimal floats, LF endings);
the text and Markdown tables are convenience renderings of the same numbers.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape

from . import __version__
from .engine import RunRecord
from .experiments import (
    SUMMARY_METRICS,
    Comparison,
    GridEntry,
    GridResult,
    LevelSummary,
    ScenarioMatrix,
)
from .metrics import MetricsBundle
from .model import MaturityLevel
from .scenarios import SCENARIO_IDS

RUNS_COLUMNS = (
    "scenario_id", "level", "replicate", "seed",
    "agents_total", "agents_shadow", "agents_orphaned", "agents_duplicate",
    "agents_creeped", "agents_unsafe_delegators",
    "tasks_total", "tasks_completed", "tasks_effective",
    "actions_total", "incidents_total", "hops_total", "hops_safe",
    "si", "rir", "etcr", "dsr", "gcr", "nbv",
)
_INT_COLUMNS = RUNS_COLUMNS[2:17]
_FLOAT_COLUMNS = RUNS_COLUMNS[17:]


class SchemaError(ValueError):
    """A runs.csv file does not match the expected layout."""


def fmt(x: float) -> str:
    s = f"{x:.6f}"
    return "0.000000" if s == "-0.000000" else s


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# -- runs.csv -------------------------------------------------------------
def runs_csv(grid: GridResult) -> str:
    rows = []
    for e in grid:
        r, m = e.record, e.metrics
        rows.append(
            [r.scenario_id, MaturityLevel(r.level).name]
            + [getattr(r, c) for c in _INT_COLUMNS]
            + [fmt(getattr(m, c)) for c in _FLOAT_COLUMNS]
        )
    return _csv_text(RUNS_COLUMNS, rows)


def parse_runs_csv(text: str, source: str = "runs.csv") -> GridResult:
    """Rebuild a grid from runs.csv; metrics are taken as written, not recomputed."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError(f"{source}: file is empty") from None
    missing = [c for c in RUNS_COLUMNS if c not in header]
    if missing:
        raise SchemaError(f"{source}: missing column {missing[0]!r}")
    extra = [c for c in header if c not in RUNS_COLUMNS]
    if extra:
        raise SchemaError(f"{source}: unexpected column {extra[0]!r}")
    if tuple(header) != RUNS_COLUMNS:
        raise SchemaError(f"{source}: columns out of order; expected {','.join(RUNS_COLUMNS)}")

    entries = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(RUNS_COLUMNS):
            raise SchemaError(f"{source}: row {lineno} has {len(row)} fields, expected {len(RUNS_COLUMNS)}")
        cell = dict(zip(RUNS_COLUMNS, row))
        try:
            level = MaturityLevel.parse(cell["level"])
        except ValueError:
            raise SchemaError(f"{source}: row {lineno}, column 'level': bad value {cell['level']!r}") from None
        ints = {}
        for c in _INT_COLUMNS:
            try:
                ints[c] = int(cell[c])
            except ValueError:
                raise SchemaError(f"{source}: row {lineno}, column {c!r}: not an integer: {cell[c]!r}") from None
        floats = {}
        for c in _FLOAT_COLUMNS:
            try:
                floats[c] = float(cell[c])
            except ValueError:
                raise SchemaError(f"{source}: row {lineno}, column {c!r}: not a number: {cell[c]!r}") from None
        record = RunRecord(scenario_id=cell["scenario_id"], level=level, **ints)
        metrics = MetricsBundle(**floats)
        entries.append(GridEntry(record, metrics))
    if not entries:
        raise SchemaError(f"{source}: no data rows")
    try:
        return GridResult(entries)
    except ValueError as exc:
        raise SchemaError(f"{source}: {exc}") from None


# -- aggregate tables ------------------------------------------------------
def summary_csv(summaries: Sequence[LevelSummary]) -> str:
    header = ["level", "name", "n"]
    for m in SUMMARY_METRICS:
        header += [f"{m}_mean", f"{m}_sd", f"{m}_ci95"]
    header.append("gcr")
    rows = []
    for s in summaries:
        row: list[object] = [s.level.name, s.level.label, s.n]
        for m in SUMMARY_METRICS:
            ss = getattr(s, m)
            row += [fmt(ss.mean), fmt(ss.sd), fmt(ss.ci95_half)]
        row.append(fmt(s.gcr))
        rows.append(row)
    return _csv_text(header, rows)


def pairwise_csv(comparisons: Sequence[Comparison]) -> str:
    header = ["comparison", "level_a", "level_b", "delta_nbv", "t", "df", "p", "d", "effect", "stars", "published"]
    rows = []
    for c in comparisons:
        r = c.result
        rows.append([
            c.name, c.level_a.name, c.level_b.name, fmt(c.delta_nbv), fmt(r.t), fmt(r.df),
            f"{r.p:.6e}", fmt(r.d), r.label, r.stars, "yes" if c.published else "no",
        ])
    return _csv_text(header, rows)


def matrix_csv(matrix: ScenarioMatrix) -> str:
    header = ["scenario"] + [lv.name for lv in matrix.levels]
    rows = [[s] + [fmt(v) for v in row] for s, row in zip(matrix.scenarios, matrix.values)]
    return _csv_text(header, rows)


# The four panels of the metrics-by-level figure.
PANEL_METRICS = ("si", "rir", "etcr", "nbv")


def panels_csv(summaries: Sequence[LevelSummary]) -> str:
    rows = []
    for m in PANEL_METRICS:
        for s in summaries:
            ss = getattr(s, m)
            rows.append([m, s.level.name, fmt(ss.mean), fmt(ss.ci95_half)])
    return _csv_text(["metric", "level", "mean", "ci95_half"], rows)


def _fixed_width(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
    line = lambda cells: "  ".join(str(c).ljust(w) for c, w in zip(cells, widths)).rstrip()
    out = [line(header), "  ".join("-" * w for w in widths)]
    out += [line(r) for r in rows]
    return "\n".join(out) + "\n"


def _markdown(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    out = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    out += ["| " + " | ".join(str(c) for c in r) + " |" for r in rows]
    return "\n".join(out) + "\n"


def _summary_rows(summaries: Sequence[LevelSummary]) -> tuple[list[str], list[list[str]]]:
    header = ["Level", "SI", "RIR", "ETCR", "DSR", "GCR", "NBV"]
    rows = []
    for s in summaries:
        rows.append([
            f"{s.level.name} {s.level.label}",
            f"{s.si.mean:.3f} ± {s.si.ci95_half:.3f}",
            f"{s.rir.mean:.2f} ± {s.rir.ci95_half:.2f}",
            f"{s.etcr.mean:.3f} ± {s.etcr.ci95_half:.3f}",
            f"{s.dsr.mean:.3f} ± {s.dsr.ci95_half:.3f}",
            f"{s.gcr:.3f}",
            f"{s.nbv.mean:.3f} ± {s.nbv.ci95_half:.3f}",
        ])
    return header, rows


def _pairwise_rows(comparisons: Sequence[Comparison]) -> tuple[list[str], list[list[str]]]:
    header = ["Comparison", "dNBV", "t", "p", "d", "Effect", "Sig."]
    rows = []
    for c in comparisons:
        r = c.result
        p = "<0.001" if r.p < 0.001 else f"{r.p:.3f}"
        rows.append([c.name, f"{c.delta_nbv:+.3f}", f"{r.t:.2f}", p, f"{r.d:.2f}", r.label,
                     r.stars if c.published else r.stars + " (extra)"])
    return header, rows


def _matrix_rows(matrix: ScenarioMatrix) -> tuple[list[str], list[list[str]]]:
    header = ["Scenario"] + [lv.name for lv in matrix.levels]
    rows = [[s] + [f"{v:.3f}" for v in row] for s, row in zip(matrix.scenarios, matrix.values)]
    return header, rows


def text_tables(summaries, comparisons, matrix, markdown: bool = False) -> str:
    render = _markdown if markdown else _fixed_width
    parts = []
    for title, (header, rows) in (
        ("Business outcomes by governance level", _summary_rows(summaries)),
        ("Pairwise comparisons: Net Business Value", _pairwise_rows(comparisons)),
        ("Mean NBV by scenario and level", _matrix_rows(matrix)),
    ):
        parts.append(("## " if markdown else "") + title + "\n\n" + render(header, rows))
    return "\n".join(parts)


# -- heatmap -----------------------------------------------------------------
_LOW = (215, 48, 39)
_HIGH = (26, 152, 80)


def heat_color(value: float, lo: float, hi: float) -> str:
    """Linear red-to-green fill; a degenerate range maps to the midpoint colour."""
    t = 0.5 if hi <= lo else min(1.0, max(0.0, (value - lo) / (hi - lo)))
    r, g, b = (round(a + (z - a) * t) for a, z in zip(_LOW, _HIGH))
    return f"#{r:02x}{g:02x}{b:02x}"


def render_heatmap(matrix: ScenarioMatrix, title: str = "Mean NBV by scenario and level") -> str:
    n_rows, n_cols = len(matrix.scenarios), len(matrix.levels)
    if n_rows == 0 or n_cols == 0 or len(matrix.values) != n_rows or any(len(r) != n_cols for r in matrix.values):
        raise ValueError("heatmap needs a complete scenario x level matrix")
    cell_w, cell_h, left, top = 90, 44, 70, 56
    width, height = left + n_cols * cell_w + 10, top + n_rows * cell_h + 10
    flat = [v for row in matrix.values for v in row]
    lo, hi = min(flat), max(flat)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="13">',
        f'<text x="{width // 2}" y="20" text-anchor="middle" font-size="15">{escape(title)}</text>',
    ]
    for j, lv in enumerate(matrix.levels):
        x = left + j * cell_w + cell_w // 2
        out.append(f'<text x="{x}" y="{top - 8}" text-anchor="middle">{lv.name}</text>')
    for i, sid in enumerate(matrix.scenarios):
        y = top + i * cell_h
        out.append(f'<text x="{left - 8}" y="{y + cell_h // 2 + 5}" text-anchor="end">{escape(sid)}</text>')
        for j, v in enumerate(matrix.values[i]):
            x = left + j * cell_w
            out.append(
                f'<rect x="{x}" y="{y}" width="{cell_w}" height="{cell_h}" '
                f'fill="{heat_color(v, lo, hi)}" stroke="#ffffff"/>'
            )
            out.append(
                f'<text x="{x + cell_w // 2}" y="{y + cell_h // 2 + 5}" text-anchor="middle" '
                f'fill="#ffffff">{v:.3f}</text>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"


# -- manifest ------------------------------------------------------------------
def run_digest(params_digest: str, seed: int) -> str:
    return hashlib.sha256(f"{params_digest}:{seed}".encode()).hexdigest()


def manifest(seed: int, replicates: int, params_digest: str, params_source: str, n_runs: int) -> str:
    doc = {
        "artifact": "govsim",
        "version": __version__,
        "seed": seed,
        "replicates": replicates,
        "runs": n_runs,
        "parameters": {"source": params_source, "sha256": params_digest},
        "digest": run_digest(params_digest, seed),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# -- writing -------------------------------------------------------------------
@dataclass(frozen=True)
class ReportBundle:
    summary: str
    pairwise: str
    matrix: str
    panels: str
    heatmap: str
    tables_txt: str
    tables_md: str

    def files(self) -> dict[str, str]:
        return {
            "summary.csv": self.summary,
            "pairwise.csv": self.pairwise,
            "scenario_matrix.csv": self.matrix,
            "panels.csv": self.panels,
            "heatmap.svg": self.heatmap,
            "tables.txt": self.tables_txt,
            "tables.md": self.tables_md,
        }


def build_report(grid: GridResult) -> ReportBundle:
    from .experiments import aggregate_levels, pairwise_nbv, scenario_matrix

    summaries = aggregate_levels(grid)
    comparisons = pairwise_nbv(grid)
    scenarios = [s for s in SCENARIO_IDS if s in grid.scenarios] + [
        s for s in grid.scenarios if s not in SCENARIO_IDS
    ]
    matrix = scenario_matrix(grid, scenarios, grid.levels)
    return ReportBundle(
        summary=summary_csv(summaries),
        pairwise=pairwise_csv(comparisons),
        matrix=matrix_csv(matrix),
        panels=panels_csv(summaries),
        heatmap=render_heatmap(matrix),
        tables_txt=text_tables(summaries, comparisons, matrix),
        tables_md=text_tables(summaries, comparisons, matrix, markdown=True),
    )


def write_text(path: Path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
