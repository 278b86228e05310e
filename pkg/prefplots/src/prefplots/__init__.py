"""Line-chart rendering for the preference-completion experiment CSVs.

This package knows nothing about how the CSVs were produced; it consumes
only the fixed-name CSV contract (fig3_rmse.csv, fig4_bias.csv,
fig5_pre.csv, fig6_bias_real.csv, fig7_pre_real.csv) with columns
(method, k, <metric>), and draws one line per method over ascending k.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

__all__ = ["PlotSpec", "PlotError", "render", "render_all", "BUILTIN_SPECS"]


class PlotError(RuntimeError):
    """A plot could not be rendered; the message names the offender."""


@dataclass(frozen=True)
class PlotSpec:
    input_csv: str
    x_column: str
    y_column: str
    series_column: str
    title: str
    output_image: str


# The five fixed-name harness outputs and their metric columns.
_FIGURES = (
    ("fig3_rmse.csv", "rmse", "Neighbor RMSE vs k (synthetic)"),
    ("fig4_bias.csv", "bias", "Completion bias vs k (synthetic)"),
    ("fig5_pre.csv", "pre", "Completion Pre vs k (synthetic)"),
    ("fig6_bias_real.csv", "bias", "Completion bias vs k (election data)"),
    ("fig7_pre_real.csv", "pre", "Completion Pre vs k (election data)"),
)


def BUILTIN_SPECS(results_dir: str | Path, image_format: str = "png") -> list[PlotSpec]:
    """One spec per fixed-name CSV, images written next to the inputs."""
    results_dir = Path(results_dir)
    return [
        PlotSpec(
            input_csv=str(results_dir / name),
            x_column="k",
            y_column=metric,
            series_column="method",
            title=title,
            output_image=str(results_dir / (Path(name).stem + "." + image_format)),
        )
        for name, metric, title in _FIGURES
    ]


def _read_rows(path: Path, spec: PlotSpec) -> list[dict]:
    if not path.exists():
        raise PlotError(f"missing input CSV: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in (spec.x_column, spec.y_column, spec.series_column):
            if col not in header:
                raise PlotError(f"missing column {col!r} in {path}")
        rows = list(reader)
    if not rows:
        raise PlotError(f"empty CSV body: {path}")
    return rows


def render(spec: PlotSpec) -> Path:
    """Draw one line per distinct series value, x ascending, and write the
    image. Never mutates the input CSV."""
    path = Path(spec.input_csv)
    rows = _read_rows(path, spec)
    series: dict[str, list[tuple[float, float]]] = {}
    for row in rows:
        try:
            x = float(row[spec.x_column])
            y = float(row[spec.y_column])
        except (TypeError, ValueError) as exc:
            raise PlotError(f"non-numeric data in {path}: {row!r}") from exc
        series.setdefault(row[spec.series_column], []).append((x, y))

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for name in sorted(series):
        pts = sorted(series[name])
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=name)
    ax.set_xlabel(spec.x_column)
    ax.set_ylabel(spec.y_column)
    ax.set_title(spec.title)
    ax.legend()
    fig.tight_layout()
    out = Path(spec.output_image)
    fig.savefig(out)
    plt.close(fig)
    return out


def render_all(results_dir: str | Path, image_format: str = "png") -> list[Path]:
    """Render every present fixed-name CSV in results_dir; skip absent files
    with a notice. Raises PlotError if the directory is unreadable, if no
    known CSV is present (the notice names each missing file), or if any
    present CSV is malformed."""
    results_dir = Path(results_dir)
    if not results_dir.is_dir():
        raise PlotError(f"unreadable results directory: {results_dir}")
    written: list[Path] = []
    missing: list[str] = []
    for spec in BUILTIN_SPECS(results_dir, image_format):
        if not Path(spec.input_csv).exists():
            missing.append(Path(spec.input_csv).name)
            print(f"notice: missing {Path(spec.input_csv).name}, skipped")
            continue
        written.append(render(spec))
    if not written:
        raise PlotError(
            f"no results CSVs found in {results_dir}: missing " + ", ".join(missing)
        )
    return written
