"""Rendering of entpart results CSVs into figures.

Strictly read-only over its inputs: every figure kind consumes one of the
documented results-CSV schemas and draws it with matplotlib. No statistics
or re-embedding happens here. Rendering is deterministic: an identical CSV
yields identical image bytes.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

FIGURE_KINDS = ("score-vs-t", "score-vs-k", "embedding-scatter", "transition-serpentine")

REQUIRED_COLUMNS = {
    "score-vs-t": ["t", "score"],
    "score-vs-k": ["n_qubits", "k", "mode", "score"],
    "embedding-scatter": ["state_id", "partition", "shape", "role", "y1", "y2"],
    "transition-serpentine": ["lambda", "purity", "part_logneg", "is_npt", "is_max_mixed", "y1", "y2"],
}

COLOR_KEYS = {
    "embedding-scatter": ("partition", "shape", "role"),
    "transition-serpentine": ("purity", "part_logneg"),
}

DEFAULT_COLOR_KEY = {"embedding-scatter": "partition", "transition-serpentine": "purity"}

PPT_COLOR = "black"
MAX_MIXED_COLOR = "red"


class RenderError(ValueError):
    """Schema or specification problem; message carries column diagnostics."""


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: input CSV path(s), figure kind, output path, color key."""

    kind: str
    csv_paths: tuple[str, ...]
    out_path: str
    color_key: str = ""

    @classmethod
    def from_dict(cls, payload: dict) -> "FigureSpec":
        kind = payload.get("kind")
        if kind not in FIGURE_KINDS:
            raise RenderError(f"kind must be one of {FIGURE_KINDS}, got {kind!r}")
        raw = payload.get("csv")
        if raw is None:
            raise RenderError("spec needs a 'csv' path (or list of paths)")
        paths = (raw,) if isinstance(raw, str) else tuple(raw)
        if not paths:
            raise RenderError("'csv' list is empty")
        if len(paths) > 1 and kind != "score-vs-k":
            raise RenderError(f"kind {kind} takes exactly one csv, got {len(paths)}")
        out = payload.get("out")
        if not out:
            raise RenderError("spec needs an 'out' image path")
        color_key = payload.get("color_key", DEFAULT_COLOR_KEY.get(kind, ""))
        if kind in COLOR_KEYS and color_key not in COLOR_KEYS[kind]:
            raise RenderError(
                f"color_key for {kind} must be one of {COLOR_KEYS[kind]}, got {color_key!r}"
            )
        return cls(kind=kind, csv_paths=paths, out_path=out, color_key=color_key)

    @classmethod
    def from_json(cls, text: str) -> "FigureSpec":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise RenderError(f"spec is not valid JSON: {exc}") from exc


@dataclass
class ResultsTable:
    columns: list[str]
    rows: list[list[str]]

    def column(self, name: str) -> list[str]:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]

    def floats(self, name: str) -> np.ndarray:
        return np.array([float(v) for v in self.column(name)])

    def ints(self, name: str) -> np.ndarray:
        return np.array([int(v) for v in self.column(name)])


def read_results_csv(path, kind: str) -> ResultsTable:
    """Read a results CSV, skipping header comments, and validate columns."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"csv not found: {path}")
    with path.open() as handle:
        lines = [line for line in handle if not line.startswith("#")]
    rows = list(csv.reader(lines))
    if not rows:
        raise RenderError(f"{path}: no column header found")
    columns = rows[0]
    required = REQUIRED_COLUMNS[kind]
    missing = [c for c in required if c not in columns]
    if missing:
        raise RenderError(
            f"{path}: columns {missing} required for {kind} are missing (found {columns})"
        )
    body = [r for r in rows[1:] if r]
    for i, row in enumerate(body, start=1):
        if len(row) != len(columns):
            raise RenderError(f"{path}: row {i} has {len(row)} fields, expected {len(columns)}")
    return ResultsTable(columns=columns, rows=body)


def _categorical_palette(values: list[str]) -> dict[str, tuple]:
    """Stable color per category: sorted labels walk the hsv wheel."""
    unique = sorted(set(values))
    cmap = plt.get_cmap("hsv")
    n = max(len(unique), 1)
    return {v: cmap(0.85 * i / n) for i, v in enumerate(unique)}


@dataclass
class BuiltFigure:
    """A drawn figure plus the row-level drawing decisions, for inspection."""

    figure: object
    legend_labels: list[str] = field(default_factory=list)
    row_colors: list[str] = field(default_factory=list)


def _build_score_vs_t(table: ResultsTable) -> BuiltFigure:
    t = table.floats("t")
    score = table.floats("score")
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(t, score, marker="o", color="tab:blue")
    ax.set_xlabel("statistical moment order t")
    ax.set_ylabel("accuracy score")
    ax.set_ylim(0.0, 1.05)
    ax.grid(alpha=0.3)
    return BuiltFigure(figure=fig)


def _build_score_vs_k(tables: list[ResultsTable]) -> BuiltFigure:
    fig, ax = plt.subplots(figsize=(5.5, 4))
    labels = []
    all_n = sorted({int(v) for tab in tables for v in tab.column("n_qubits")})
    palette = {n: plt.get_cmap("viridis")(i / max(len(all_n) - 1, 1)) for i, n in enumerate(all_n)}
    for tab in tables:
        n_arr = tab.ints("n_qubits")
        k_arr = tab.ints("k")
        modes = tab.column("mode")
        scores = tab.floats("score")
        for n in sorted(set(n_arr)):
            for mode, style in (("cumulative", "-"), ("exclusive", "--")):
                sel = [i for i in range(len(k_arr)) if n_arr[i] == n and modes[i] == mode]
                if not sel:
                    continue
                sel.sort(key=lambda i: k_arr[i])
                label = f"N={n} {mode}"
                ax.plot(k_arr[sel], scores[sel], style, marker="o", color=palette[n], label=label)
                labels.append(label)
    ax.set_xlabel("correlation order k")
    ax.set_ylabel("accuracy score")
    ax.set_ylim(0.0, 1.05)
    ax.grid(alpha=0.3)
    ax.legend(fontsize=7)
    return BuiltFigure(figure=fig, legend_labels=labels)


def _build_embedding_scatter(table: ResultsTable, color_key: str) -> BuiltFigure:
    y1 = table.floats("y1")
    y2 = table.floats("y2")
    keys = table.column(color_key)
    palette = _categorical_palette(keys)
    fig, ax = plt.subplots(figsize=(6, 5))
    legend_labels = []
    for value in sorted(palette):
        sel = [i for i, v in enumerate(keys) if v == value]
        ax.scatter(y1[sel], y2[sel], s=8, color=palette[value], label=value)
        legend_labels.append(value)
    ax.set_xlabel("embedding axis 1")
    ax.set_ylabel("embedding axis 2")
    ax.legend(fontsize=6, markerscale=1.5, ncol=max(1, len(legend_labels) // 24))
    row_colors = [matplotlib.colors.to_hex(palette[v]) for v in keys]
    return BuiltFigure(figure=fig, legend_labels=legend_labels, row_colors=row_colors)


def _build_transition(table: ResultsTable, color_key: str) -> BuiltFigure:
    y1 = table.floats("y1")
    y2 = table.floats("y2")
    values = table.floats(color_key)
    logneg = table.floats("part_logneg")
    max_mixed = table.ints("is_max_mixed").astype(bool)
    fig, ax = plt.subplots(figsize=(6, 5))

    # PPT rows (zero partition-log-negativity) are exactly black; the flagged
    # maximally mixed row is a red cross on top.
    sweep = ~max_mixed
    ppt = sweep & (logneg == 0.0)
    npt = sweep & ~ppt
    cmap = plt.get_cmap("viridis")
    vmin, vmax = float(values[sweep].min()), float(values[sweep].max())
    span = (vmax - vmin) or 1.0
    npt_colors = cmap((values[npt] - vmin) / span)
    ax.scatter(y1[npt], y2[npt], s=10, c=npt_colors)
    ax.scatter(y1[ppt], y2[ppt], s=10, color=PPT_COLOR)
    if max_mixed.any():
        ax.scatter(
            y1[max_mixed], y2[max_mixed], s=120, marker="x", color=MAX_MIXED_COLOR, linewidths=2.5
        )
    sm = plt.cm.ScalarMappable(cmap=cmap, norm=matplotlib.colors.Normalize(vmin, vmax))
    fig.colorbar(sm, ax=ax, label=color_key)
    ax.set_xlabel("embedding axis 1")
    ax.set_ylabel("embedding axis 2")

    row_colors = []
    for i in range(len(y1)):
        if max_mixed[i]:
            row_colors.append(MAX_MIXED_COLOR)
        elif logneg[i] == 0.0:
            row_colors.append(PPT_COLOR)
        else:
            row_colors.append(matplotlib.colors.to_hex(cmap((values[i] - vmin) / span)))
    return BuiltFigure(figure=fig, row_colors=row_colors)


def build_figure(spec: FigureSpec) -> BuiltFigure:
    """Parse the input CSV(s) and draw the figure without saving it."""
    if spec.kind == "score-vs-t":
        return _build_score_vs_t(read_results_csv(spec.csv_paths[0], spec.kind))
    if spec.kind == "score-vs-k":
        return _build_score_vs_k([read_results_csv(p, spec.kind) for p in spec.csv_paths])
    if spec.kind == "embedding-scatter":
        return _build_embedding_scatter(read_results_csv(spec.csv_paths[0], spec.kind), spec.color_key)
    return _build_transition(read_results_csv(spec.csv_paths[0], spec.kind), spec.color_key)


def render(spec: FigureSpec) -> str:
    """Render the figure to spec.out_path; returns the written path."""
    built = build_figure(spec)
    out = Path(spec.out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    try:
        # Fixed metadata keeps identical inputs producing identical bytes.
        built.figure.savefig(out, dpi=150, metadata={"Software": "entpart-figures"})
    finally:
        plt.close(built.figure)
    return str(out)
