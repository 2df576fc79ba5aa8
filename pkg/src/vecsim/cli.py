"""Command-line front end.

Verbs:
  validate <config>          check a config file, print every violation
  run <config>               execute a single-cell config, write artifacts
  sweep <config>             execute the full (scheme x rho x V) product
  inspect-policy <ckpt>      print a checkpoint's per-state policy
  report <kind> ...          render figures from summary/ccdf CSVs

Exit status is 0 on success and nonzero on any failure. All randomness comes
from seeds in the config file; there are no environment inputs.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .checkpoint import format_policy, load_checkpoint, save_checkpoint
from .config import ConfigError, load, validate
from .report import render_ccdf, render_default_figures, render_density_sweep, render_rho_sweep
from .sweep import emit_outputs, preflight_output_dir, run_cell, run_sweep


def _load_validated(path: str):
    config = load(path)
    issues = validate(config)
    if issues:
        for issue in issues:
            print(f"invalid: {issue}", file=sys.stderr)
        raise ConfigError(issues)
    return config


def cmd_validate(args) -> int:
    try:
        config = _load_validated(args.config)
    except ConfigError:
        return 1
    print(f"{args.config}: valid ({len(config.cells())} cell(s))")
    return 0


def cmd_run(args) -> int:
    try:
        config = _load_validated(args.config)
    except ConfigError:
        return 1
    cells = config.cells()
    if len(cells) != 1:
        print(
            f"run expects exactly one (scheme, rho, V) cell, config has {len(cells)}; use sweep",
            file=sys.stderr,
        )
        return 1
    out_dir = preflight_output_dir(config)
    scheme, rho, num_vues = cells[0]
    print(f"running scheme={scheme} rho={rho:g} V={num_vues} iterations={config.iterations}")
    cell = run_cell(config, scheme, rho, num_vues, keep_run=True)
    if not cell.ok:
        print(cell.error, file=sys.stderr)
        return 1
    emit_outputs([cell], config, out_dir)
    if cell.run_result.population is not None:
        ckpt = out_dir / f"checkpoint_{scheme}_{rho:g}_{num_vues}.json"
        save_checkpoint(cell.run_result, ckpt)
        print(f"checkpoint: {ckpt}")
    s = cell.summary
    print(
        f"mean={s.mean_s:.6g}s std={s.std_s:.6g}s entropic_risk={s.entropic_risk_s:.6g}s "
        f"(n={s.n_samples}); outputs in {out_dir}"
    )
    return 0


def cmd_sweep(args) -> int:
    try:
        config = _load_validated(args.config)
    except ConfigError:
        return 1
    out_dir = preflight_output_dir(config)
    cells = run_sweep(config, log=lambda msg: print(msg, flush=True))
    emit_outputs(cells, config, out_dir)
    if args.figures:
        done = [(c.scheme, c.rho, c.num_vues) for c in cells if c.ok]
        for path in render_default_figures(out_dir, done):
            print(f"figure: {path}")
    failures = [c for c in cells if not c.ok]
    print(f"{len(cells) - len(failures)}/{len(cells)} cells ok; outputs in {out_dir}")
    for c in failures:
        print(f"FAILED scheme={c.scheme} rho={c.rho:g} V={c.num_vues}", file=sys.stderr)
    return 1 if failures else 0


def cmd_inspect_policy(args) -> int:
    cp = load_checkpoint(args.checkpoint)
    print(format_policy(cp, max_vues=args.max_vues))
    return 0


def cmd_report(args) -> int:
    out = Path(args.out)
    if args.kind == "rho-sweep":
        render_rho_sweep(args.inputs[0], out, schemes=args.scheme or None)
    elif args.kind == "density-sweep":
        render_density_sweep(args.inputs[0], out)
    else:
        render_ccdf(args.inputs, out, labels=args.label or None)
    print(f"figure: {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vecsim", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"vecsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a config file")
    p.add_argument("config")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="execute a single-cell config")
    p.add_argument("config")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="execute the full scheme x rho x V product")
    p.add_argument("config")
    p.add_argument("--figures", action="store_true", help="render figures next to the CSVs")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("inspect-policy", help="print a checkpoint's policy tables")
    p.add_argument("checkpoint")
    p.add_argument("--max-vues", type=int, default=8)
    p.set_defaults(func=cmd_inspect_policy)

    p = sub.add_parser("report", help="render a figure from CSV artifacts")
    p.add_argument("kind", choices=["rho-sweep", "ccdf", "density-sweep"])
    p.add_argument("inputs", nargs="+", help="summary.csv (sweeps) or ccdf_*.csv files (ccdf)")
    p.add_argument("--out", required=True)
    p.add_argument("--scheme", action="append", help="rho-sweep: restrict to scheme(s)")
    p.add_argument("--label", action="append", help="ccdf: legend label per input")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as e:  # surface one-line errors, not tracebacks
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
