#!/usr/bin/env node
/**
 * Render SVG figures from vecsim CSV artifacts.
 *
 * Usage:
 *   vecsim-figures rho-sweep <summary.csv> --out fig.svg [--scheme name ...]
 *   vecsim-figures density-sweep <summary.csv> --out fig.svg
 *   vecsim-figures ccdf <ccdf_*.csv ...> --out fig.svg [--label text ...]
 */

import { FigureKind, FigureSpec, writeFigure } from "./figures.js";

function usage(): never {
  console.error(
    "usage: vecsim-figures <rho-sweep|ccdf|density-sweep> <inputs...> --out <file.svg> " +
      "[--scheme name ...] [--label text ...]"
  );
  process.exit(2);
}

export function parseArgs(argv: string[]): FigureSpec {
  if (argv.length < 2) {
    usage();
  }
  const kind = argv[0] as FigureKind;
  if (!["rho-sweep", "ccdf", "density-sweep"].includes(kind)) {
    usage();
  }
  const inputs: string[] = [];
  const schemes: string[] = [];
  const labels: string[] = [];
  let output = "";
  for (let i = 1; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "--out") {
      output = argv[++i] ?? "";
    } else if (arg === "--scheme") {
      schemes.push(argv[++i] ?? "");
    } else if (arg === "--label") {
      labels.push(argv[++i] ?? "");
    } else if (arg.startsWith("--")) {
      usage();
    } else {
      inputs.push(arg);
    }
  }
  if (!output || inputs.length === 0) {
    usage();
  }
  return { kind, inputs, output, schemes, labels };
}

export function main(argv: string[]): number {
  try {
    const spec = parseArgs(argv);
    const path = writeFigure(spec);
    console.log(`figure: ${path}`);
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : String(err)}`);
    return 1;
  }
}

const invokedDirectly = process.argv[1]?.endsWith("cli.js") || process.argv[1]?.endsWith("cli.ts");
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
