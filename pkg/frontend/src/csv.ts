/**
 * Strict readers for the simulator's delimited artifacts.
 *
 * The column sets are normative: summary.csv carries one row per sweep cell,
 * ccdf_*.csv one row per distinct delay threshold. Any deviation is reported
 * as an explicit column diff rather than silently reinterpreted.
 */

import { readFileSync } from "fs";

export const SUMMARY_COLUMNS = [
  "scheme",
  "rho",
  "V",
  "mean_s",
  "std_s",
  "variance_s2",
  "skewness",
  "entropic_risk_s",
  "n_samples",
  "seed",
] as const;

export const CCDF_COLUMNS = ["threshold_s", "exceedance"] as const;

export class SchemaMismatchError extends Error {
  constructor(path: string, expected: readonly string[], actual: readonly string[]) {
    const missing = expected.filter((c) => !actual.includes(c));
    const unexpected = actual.filter((c) => !expected.includes(c));
    super(
      `${path}: column mismatch (missing: ${missing.length ? missing.join("/") : "none"}, ` +
        `unexpected: ${unexpected.length ? unexpected.join("/") : "none"})`
    );
    this.name = "SchemaMismatchError";
  }
}

export class EmptyInputError extends Error {
  constructor(path: string) {
    super(`${path}: no data rows`);
    this.name = "EmptyInputError";
  }
}

export interface SummaryRow {
  scheme: string;
  rho: number;
  V: number;
  mean_s: number;
  std_s: number;
  variance_s2: number;
  skewness: number;
  entropic_risk_s: number;
  n_samples: number;
  seed: number;
}

export interface CcdfPoint {
  threshold_s: number;
  exceedance: number;
}

function readTable(path: string, expected: readonly string[]): string[][] {
  const text = readFileSync(path, "utf8");
  const lines = text.split("\n").filter((l) => l.trim().length > 0);
  if (lines.length === 0) {
    throw new EmptyInputError(path);
  }
  const header = lines[0].split(",").map((c) => c.trim());
  if (header.length !== expected.length || header.some((c, i) => c !== expected[i])) {
    throw new SchemaMismatchError(path, expected, header);
  }
  const rows = lines.slice(1).map((l) => l.split(","));
  if (rows.length === 0) {
    throw new EmptyInputError(path);
  }
  for (const row of rows) {
    if (row.length !== expected.length) {
      throw new Error(`${path}: row has ${row.length} fields, expected ${expected.length}`);
    }
  }
  return rows;
}

function num(path: string, field: string, value: string): number {
  const x = Number(value);
  if (!Number.isFinite(x)) {
    throw new Error(`${path}: field ${field} is not a finite number: ${value}`);
  }
  return x;
}

export function readSummary(path: string): SummaryRow[] {
  return readTable(path, SUMMARY_COLUMNS).map((r) => ({
    scheme: r[0],
    rho: num(path, "rho", r[1]),
    V: num(path, "V", r[2]),
    mean_s: num(path, "mean_s", r[3]),
    std_s: num(path, "std_s", r[4]),
    variance_s2: num(path, "variance_s2", r[5]),
    skewness: num(path, "skewness", r[6]),
    entropic_risk_s: num(path, "entropic_risk_s", r[7]),
    n_samples: num(path, "n_samples", r[8]),
    seed: num(path, "seed", r[9]),
  }));
}

export function readCcdf(path: string): CcdfPoint[] {
  return readTable(path, CCDF_COLUMNS).map((r) => ({
    threshold_s: num(path, "threshold_s", r[0]),
    exceedance: num(path, "exceedance", r[1]),
  }));
}
