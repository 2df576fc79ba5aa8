"""Figure rendering from the delimited artifacts.

Consumes only the documented CSV schemas (summary.csv and ccdf_*.csv),
never internal state, and writes one image per call:

* rho sweep: mean and standard deviation of the pooled E2E delay versus rho;
* ccdf: overlaid exceedance step curves on a logarithmic axis covering at
  least [1e-2, 1];
* density sweep: mean and standard deviation versus the VUE count, one line
  per scheme.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .sweep import CCDF_COLUMNS, SUMMARY_COLUMNS, ccdf_filename  # noqa: E402


class SchemaMismatchError(ValueError):
    """Input CSV columns differ from the documented schema."""

    def __init__(self, path, expected, actual):
        missing = [c for c in expected if c not in actual]
        extra = [c for c in actual if c not in expected]
        super().__init__(
            f"{path}: column mismatch (missing: {missing or 'none'}, unexpected: {extra or 'none'})"
        )


class EmptyInputError(ValueError):
    """Input CSV carries no data rows; refusing to render an empty figure."""


def read_rows(path: str | Path, expected_columns: list[str]) -> list[dict]:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        actual = reader.fieldnames or []
        if list(actual) != list(expected_columns):
            raise SchemaMismatchError(path, expected_columns, actual)
        rows = list(reader)
    if not rows:
        raise EmptyInputError(f"{path}: no data rows")
    return rows


def render_rho_sweep(summary_csv: str | Path, out_path: str | Path, schemes: list[str] | None = None) -> Path:
    """Mean/std versus rho, one line per scheme, from summary.csv."""
    rows = read_rows(summary_csv, SUMMARY_COLUMNS)
    if schemes:
        rows = [r for r in rows if r["scheme"] in schemes]
        if not rows:
            raise EmptyInputError(f"{summary_csv}: no rows left after scheme filter {schemes}")
    by_scheme: dict[str, list[dict]] = {}
    for r in rows:
        by_scheme.setdefault(r["scheme"], []).append(r)

    fig, (ax_mean, ax_std) = plt.subplots(1, 2, figsize=(9, 3.6))
    for scheme, entries in sorted(by_scheme.items()):
        entries.sort(key=lambda r: float(r["rho"]))
        rho = [float(r["rho"]) for r in entries]
        ax_mean.plot(rho, [float(r["mean_s"]) for r in entries], marker="o", label=scheme)
        ax_std.plot(rho, [float(r["std_s"]) for r in entries], marker="s", label=scheme)
    ax_mean.set_xlabel(r"risk sensitivity $\rho$")
    ax_mean.set_ylabel("mean E2E delay (s)")
    ax_std.set_xlabel(r"risk sensitivity $\rho$")
    ax_std.set_ylabel("std of E2E delay (s)")
    ax_mean.grid(True, alpha=0.4)
    ax_std.grid(True, alpha=0.4)
    ax_mean.legend()
    fig.tight_layout()
    out_path = Path(out_path)
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def build_ccdf_figure(ccdf_csvs: list[str | Path], labels: list[str] | None = None):
    """Assemble the CCDF figure; the exceedance axis always covers at least
    [1e-2, 1]. Caller owns (and must close) the returned figure."""
    if not ccdf_csvs:
        raise EmptyInputError("no CCDF inputs given")
    labels = labels or [Path(p).stem for p in ccdf_csvs]
    fig, ax = plt.subplots(figsize=(6, 4))
    for path, label in zip(ccdf_csvs, labels):
        rows = read_rows(path, CCDF_COLUMNS)
        x = [float(r["threshold_s"]) for r in rows]
        y = [float(r["exceedance"]) for r in rows]
        ax.step(x, y, where="post", label=label)
    ax.set_yscale("log")
    lo, _ = ax.get_ylim()
    ax.set_ylim(min(lo, 1e-2), 1.0)
    ax.set_xlabel("E2E delay (s)")
    ax.set_ylabel("CCDF  P(T > x)")
    ax.grid(True, which="both", alpha=0.4)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig, ax


def render_ccdf(ccdf_csvs: list[str | Path], out_path: str | Path, labels: list[str] | None = None) -> Path:
    """Overlaid CCDF step curves, log exceedance axis spanning >= [1e-2, 1]."""
    fig, _ = build_ccdf_figure(ccdf_csvs, labels)
    out_path = Path(out_path)
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def render_density_sweep(summary_csv: str | Path, out_path: str | Path) -> Path:
    """Mean/std versus VUE count, one line per scheme, from summary.csv."""
    rows = read_rows(summary_csv, SUMMARY_COLUMNS)
    by_scheme: dict[str, list[dict]] = {}
    for r in rows:
        by_scheme.setdefault(r["scheme"], []).append(r)

    fig, (ax_mean, ax_std) = plt.subplots(2, 1, figsize=(6, 6.6), sharex=True)
    for scheme, entries in sorted(by_scheme.items()):
        entries.sort(key=lambda r: int(r["V"]))
        v = [int(r["V"]) for r in entries]
        ax_mean.plot(v, [float(r["mean_s"]) for r in entries], marker="o", label=scheme)
        ax_std.plot(v, [float(r["std_s"]) for r in entries], marker="s", label=scheme)
    ax_mean.set_ylabel("mean E2E delay (s)")
    ax_std.set_ylabel("std of E2E delay (s)")
    ax_std.set_xlabel("network density (number of VUEs)")
    ax_mean.grid(True, alpha=0.4)
    ax_std.grid(True, alpha=0.4)
    ax_mean.legend(fontsize=8)
    fig.tight_layout()
    out_path = Path(out_path)
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def render_default_figures(out_dir: str | Path, cells: list[tuple[str, float, int]]) -> list[Path]:
    """Render whichever figures the sweep's axes support, next to the CSVs."""
    out_dir = Path(out_dir)
    summary = out_dir / "summary.csv"
    made: list[Path] = []
    rhos = sorted({c[1] for c in cells})
    counts = sorted({c[2] for c in cells})
    if len(rhos) > 1:
        made.append(render_rho_sweep(summary, out_dir / "fig_rho_sweep.png"))
    if len(counts) > 1:
        made.append(render_density_sweep(summary, out_dir / "fig_density_sweep.png"))
    ccdf_files = [
        out_dir / ccdf_filename(s, r, v)
        for (s, r, v) in cells
        if (out_dir / ccdf_filename(s, r, v)).exists()
    ]
    if ccdf_files:
        labels = [f"{s} rho={r:g} V={v}" for (s, r, v) in cells
                  if (out_dir / ccdf_filename(s, r, v)).exists()]
        made.append(render_ccdf(ccdf_files, out_dir / "fig_ccdf.png", labels))
    return made
