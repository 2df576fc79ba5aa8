/**
 * The three figure kinds, mirroring the simulator's evaluation plots:
 *
 * - rho sweep: mean and standard deviation of the pooled E2E delay versus
 *   the risk-sensitivity parameter, one pair of panels;
 * - ccdf: overlaid exceedance step curves on a log axis that always covers
 *   at least [1e-2, 1];
 * - density sweep: mean and standard deviation versus the VUE count, one
 *   line per scheme.
 *
 * Each builder is pure (CSV rows in, SVG string out); `writeFigure` is the
 * only filesystem side effect.
 */

import { writeFileSync } from "fs";
import { basename } from "path";

import { CcdfPoint, EmptyInputError, SummaryRow, readCcdf, readSummary } from "./csv.js";
import { Chart, PALETTE, Series } from "./svg.js";

export interface BuiltFigure {
  svg: string;
  /** y-domain actually used, exposed so callers can assert axis coverage */
  yDomain: [number, number];
}

function groupBy<T>(rows: T[], key: (r: T) => string): Map<string, T[]> {
  const out = new Map<string, T[]>();
  for (const r of rows) {
    const k = key(r);
    const bucket = out.get(k);
    if (bucket) {
      bucket.push(r);
    } else {
      out.set(k, [r]);
    }
  }
  return out;
}

function twoPanel(top: string, bottom: string, width: number, height: number): string {
  // stack two rendered SVGs into one document
  const inner = (svg: string, y: number) =>
    `<g transform="translate(0 ${y})">` + svg.replace(/<\/?svg[^>]*>/g, "") + "</g>";
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${2 * height}" ` +
    `viewBox="0 0 ${width} ${2 * height}" font-family="Helvetica, Arial, sans-serif" font-size="11">\n` +
    inner(top, 0) +
    "\n" +
    inner(bottom, height) +
    "\n</svg>"
  );
}

export function buildRhoSweep(rows: SummaryRow[], schemes?: string[]): BuiltFigure {
  let data = rows;
  if (schemes && schemes.length > 0) {
    data = rows.filter((r) => schemes.includes(r.scheme));
  }
  if (data.length === 0) {
    throw new EmptyInputError("rho-sweep input (after scheme filter)");
  }
  const bySchemes = [...groupBy(data, (r) => r.scheme).entries()].sort();
  const meanSeries: Series[] = [];
  const stdSeries: Series[] = [];
  bySchemes.forEach(([scheme, entries], i) => {
    entries.sort((a, b) => a.rho - b.rho);
    const color = PALETTE[i % PALETTE.length];
    meanSeries.push({
      label: scheme, color, marker: true,
      x: entries.map((r) => r.rho), y: entries.map((r) => r.mean_s),
    });
    stdSeries.push({
      label: scheme, color, marker: true,
      x: entries.map((r) => r.rho), y: entries.map((r) => r.std_s),
    });
  });
  const w = 640, h = 330;
  const top = new Chart(meanSeries, {
    xLabel: "risk sensitivity rho", yLabel: "mean E2E delay (s)",
    title: "Mean E2E delay vs rho", width: w, height: h,
  });
  const bottom = new Chart(stdSeries, {
    xLabel: "risk sensitivity rho", yLabel: "std of E2E delay (s)",
    title: "Std of E2E delay vs rho", width: w, height: h,
  });
  return { svg: twoPanel(top.render(), bottom.render(), w, h), yDomain: top.yDomain };
}

export function buildDensitySweep(rows: SummaryRow[]): BuiltFigure {
  const bySchemes = [...groupBy(rows, (r) => r.scheme).entries()].sort();
  const meanSeries: Series[] = [];
  const stdSeries: Series[] = [];
  bySchemes.forEach(([scheme, entries], i) => {
    entries.sort((a, b) => a.V - b.V);
    const color = PALETTE[i % PALETTE.length];
    meanSeries.push({
      label: scheme, color, marker: true,
      x: entries.map((r) => r.V), y: entries.map((r) => r.mean_s),
    });
    stdSeries.push({
      label: scheme, color, marker: true,
      x: entries.map((r) => r.V), y: entries.map((r) => r.std_s),
    });
  });
  const w = 640, h = 330;
  const top = new Chart(meanSeries, {
    xLabel: "network density (number of VUEs)", yLabel: "mean E2E delay (s)",
    title: "Mean E2E delay vs density", width: w, height: h,
  });
  const bottom = new Chart(stdSeries, {
    xLabel: "network density (number of VUEs)", yLabel: "std of E2E delay (s)",
    title: "Std of E2E delay vs density", width: w, height: h,
  });
  return { svg: twoPanel(top.render(), bottom.render(), w, h), yDomain: top.yDomain };
}

export function buildCcdf(curves: { label: string; points: CcdfPoint[] }[]): BuiltFigure {
  if (curves.length === 0) {
    throw new EmptyInputError("ccdf inputs");
  }
  let floor = 1e-2;
  for (const c of curves) {
    for (const p of c.points) {
      if (p.exceedance > 0) {
        floor = Math.min(floor, p.exceedance);
      }
    }
  }
  // the exceedance axis must span at least [1e-2, 1]
  const yDomain: [number, number] = [Math.min(floor, 1e-2), 1.0];
  const series: Series[] = curves.map((c, i) => ({
    label: c.label,
    color: PALETTE[i % PALETTE.length],
    step: true,
    x: c.points.map((p) => p.threshold_s),
    y: c.points.map((p) => p.exceedance),
  }));
  const chart = new Chart(series, {
    xLabel: "E2E delay (s)", yLabel: "CCDF  P(T > x)",
    title: "E2E delay CCDF", yScale: "log", yDomain,
  });
  return { svg: chart.render(), yDomain };
}

export type FigureKind = "rho-sweep" | "ccdf" | "density-sweep";

export interface FigureSpec {
  kind: FigureKind;
  inputs: string[];
  output: string;
  schemes?: string[];
  labels?: string[];
}

export function buildFigure(spec: FigureSpec): BuiltFigure {
  if (spec.kind === "rho-sweep") {
    return buildRhoSweep(readSummary(spec.inputs[0]), spec.schemes);
  }
  if (spec.kind === "density-sweep") {
    return buildDensitySweep(readSummary(spec.inputs[0]));
  }
  const curves = spec.inputs.map((path, i) => ({
    label: spec.labels?.[i] ?? basename(path, ".csv"),
    points: readCcdf(path),
  }));
  return buildCcdf(curves);
}

export function writeFigure(spec: FigureSpec): string {
  const built = buildFigure(spec);
  writeFileSync(spec.output, built.svg);
  return spec.output;
}
