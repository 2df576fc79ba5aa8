"""Sweep execution and artifact emission.

A sweep is the Cartesian product of (scheme, rho, V) cells, all run under
common random numbers: every cell reuses the config's master seed, so
schemes and rho values at the same density see identical channel and
action-uniform draws. Outputs: one `summary.csv` row per cell (lexicographic
in (scheme, rho, V)), a `ccdf_<scheme>_<rho>_<V>.csv` per cell, and a
`manifest.json` echoing the resolved config and build identifiers.
"""

from __future__ import annotations

import json
import platform
import subprocess
import traceback
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .config import ExperimentConfig, to_dict
from .engine import RunResult, SchemeKind, run
from .metrics import CcdfCurve, RiskSummary, ccdf, summarize

SUMMARY_COLUMNS = [
    "scheme", "rho", "V", "mean_s", "std_s", "variance_s2",
    "skewness", "entropic_risk_s", "n_samples", "seed",
]
CCDF_COLUMNS = ["threshold_s", "exceedance"]


@dataclass
class CellResult:
    scheme: str
    rho: float
    num_vues: int
    summary: RiskSummary | None = None
    curve: CcdfCurve | None = None
    run_result: RunResult | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def fmt(x: float) -> str:
    """Shortest decimal that round-trips the binary double."""
    return repr(float(x))


def ccdf_filename(scheme: str, rho: float, num_vues: int) -> str:
    return f"ccdf_{scheme}_{rho:g}_{num_vues}.csv"


def run_cell(
    config: ExperimentConfig,
    scheme: str,
    rho: float,
    num_vues: int,
    keep_run: bool = False,
) -> CellResult:
    """Execute one (scheme, rho, V) cell and reduce it to statistics."""
    cell = CellResult(scheme=scheme, rho=rho, num_vues=num_vues)
    try:
        scenario = config.scenario.build_scenario(num_vues)
        result = run(
            scenario,
            SchemeKind(scheme),
            iterations=config.iterations,
            master_seed=config.master_seed,
            rho=rho,
            temperature=config.temperature,
            rates=config.learning_rates(),
            record_stride=config.record_stride,
        )
        tail = result.pooled_tail_delays(config.stats_window)
        cell.summary = summarize(tail, rho)
        cell.curve = ccdf(tail)
        if keep_run:
            cell.run_result = result
    except Exception:
        cell.error = traceback.format_exc()
    return cell


def run_sweep(config: ExperimentConfig, keep_runs: bool = False, log=None) -> list[CellResult]:
    """Run every cell sequentially in deterministic order; cell failures are
    recorded and the sweep continues."""
    cells = []
    for scheme, rho, num_vues in config.cells():
        if log:
            log(f"cell scheme={scheme} rho={rho:g} V={num_vues} ...")
        cell = run_cell(config, scheme, rho, num_vues, keep_run=keep_runs)
        if log:
            status = "ok" if cell.ok else "FAILED"
            log(f"  -> {status}")
        cells.append(cell)
    return cells


def preflight_output_dir(config: ExperimentConfig) -> Path:
    """Create the output directory and prove it is writable before any
    computation starts."""
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    probe = out / ".write_probe"
    probe.write_text("")
    probe.unlink()
    return out


def build_identifiers() -> dict:
    try:
        commit = subprocess.run(
            ["git", "rev-parse", "HEAD"], capture_output=True, text=True, timeout=10
        ).stdout.strip() or "unknown"
    except Exception:
        commit = "unknown"
    return {
        "vecsim_version": __version__,
        "git_commit": commit,
        "python": platform.python_version(),
        "numpy": np.__version__,
    }


def emit_outputs(cells: list[CellResult], config: ExperimentConfig, out_dir: Path) -> list[Path]:
    """Write summary.csv, per-cell CCDF files, and manifest.json."""
    written: list[Path] = []

    manifest_cells = []
    for cell in cells:
        entry = {"scheme": cell.scheme, "rho": cell.rho, "V": cell.num_vues}
        if cell.ok:
            entry["status"] = "ok"
            entry["ccdf_file"] = ccdf_filename(cell.scheme, cell.rho, cell.num_vues)
        else:
            entry["status"] = "error"
            entry["error"] = cell.error
        manifest_cells.append(entry)

    if not cells:
        # Empty sweep: manifest only.
        manifest_path = out_dir / "manifest.json"
        manifest = {"config": to_dict(config), "cells": [], "build": build_identifiers()}
        manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
        return [manifest_path]

    summary_path = out_dir / "summary.csv"
    lines = [",".join(SUMMARY_COLUMNS)]
    for cell in cells:
        if not cell.ok:
            continue
        s = cell.summary
        lines.append(
            ",".join(
                [
                    cell.scheme,
                    fmt(cell.rho),
                    str(cell.num_vues),
                    fmt(s.mean_s),
                    fmt(s.std_s),
                    fmt(s.variance_s2),
                    fmt(s.skewness),
                    fmt(s.entropic_risk_s),
                    str(s.n_samples),
                    str(config.master_seed),
                ]
            )
        )
    summary_path.write_text("\n".join(lines) + "\n")
    written.append(summary_path)

    for cell in cells:
        if not cell.ok:
            continue
        path = out_dir / ccdf_filename(cell.scheme, cell.rho, cell.num_vues)
        rows = [",".join(CCDF_COLUMNS)]
        for threshold, exceedance in zip(cell.curve.thresholds, cell.curve.exceedances):
            rows.append(f"{fmt(threshold)},{fmt(exceedance)}")
        path.write_text("\n".join(rows) + "\n")
        written.append(path)

    manifest_path = out_dir / "manifest.json"
    manifest = {
        "config": to_dict(config),
        "cells": manifest_cells,
        "build": build_identifiers(),
    }
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
    written.append(manifest_path)
    return written
