/**
 * Dependency-free SVG chart builder: linear or base-10 log axes, tick
 * labels, light gridlines, polyline/step series, and a legend. Output is a
 * standalone SVG document string.
 */

export type ScaleKind = "linear" | "log";

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color: string;
  /** draw as a right-continuous step (exceedance curves) */
  step?: boolean;
  marker?: boolean;
}

export interface ChartOptions {
  title?: string;
  xLabel: string;
  yLabel: string;
  yScale?: ScaleKind;
  /** forced y-domain, e.g. a CCDF axis pinned to cover [1e-2, 1] */
  yDomain?: [number, number];
  width?: number;
  height?: number;
}

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

const MARGIN = { left: 64, right: 16, top: 28, bottom: 46 };

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function niceTicks(lo: number, hi: number, count = 6): number[] {
  if (!(hi > lo)) {
    return [lo];
  }
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const candidates = [step, 2 * step, 2.5 * step, 5 * step, 10 * step];
  const chosen = candidates.find((s) => span / s <= count) ?? 10 * step;
  const start = Math.ceil(lo / chosen) * chosen;
  const ticks: number[] = [];
  for (let v = start; v <= hi + 1e-12 * span; v += chosen) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); Math.pow(10, e) <= hi * (1 + 1e-9); e++) {
    ticks.push(Math.pow(10, e));
  }
  return ticks;
}

function fmtTick(v: number): string {
  if (v === 0) return "0";
  const abs = Math.abs(v);
  if (abs >= 0.01 && abs < 10000) {
    return Number(v.toPrecision(4)).toString();
  }
  return v.toExponential(0).replace("e+0", "e").replace("e-0", "e-");
}

export class Chart {
  readonly xDomain: [number, number];
  readonly yDomain: [number, number];
  private readonly yScale: ScaleKind;
  private readonly w: number;
  private readonly h: number;

  constructor(private readonly series: Series[], private readonly opts: ChartOptions) {
    if (series.length === 0 || series.every((s) => s.x.length === 0)) {
      throw new Error("nothing to plot");
    }
    this.yScale = opts.yScale ?? "linear";
    this.w = opts.width ?? 640;
    this.h = opts.height ?? 420;

    const xs = series.flatMap((s) => s.x);
    this.xDomain = [Math.min(...xs), Math.max(...xs)];
    if (this.xDomain[0] === this.xDomain[1]) {
      this.xDomain = [this.xDomain[0] - 1, this.xDomain[1] + 1];
    }
    if (opts.yDomain) {
      this.yDomain = opts.yDomain;
    } else {
      const ys = series.flatMap((s) => s.y).filter((y) => this.yScale === "linear" || y > 0);
      let lo = Math.min(...ys);
      let hi = Math.max(...ys);
      if (this.yScale === "linear") {
        const pad = 0.06 * (hi - lo || Math.abs(hi) || 1);
        lo -= pad;
        hi += pad;
      }
      this.yDomain = [lo, hi];
    }
  }

  private sx(x: number): number {
    const [lo, hi] = this.xDomain;
    return MARGIN.left + ((x - lo) / (hi - lo)) * (this.w - MARGIN.left - MARGIN.right);
  }

  private sy(y: number): number {
    const [lo, hi] = this.yDomain;
    let t: number;
    if (this.yScale === "log") {
      const clamped = Math.max(y, lo); // zeros sit on the axis floor
      t = (Math.log10(clamped) - Math.log10(lo)) / (Math.log10(hi) - Math.log10(lo));
    } else {
      t = (y - lo) / (hi - lo);
    }
    return this.h - MARGIN.bottom - t * (this.h - MARGIN.top - MARGIN.bottom);
  }

  private seriesPath(s: Series): string {
    const pts: string[] = [];
    for (let i = 0; i < s.x.length; i++) {
      const px = this.sx(s.x[i]).toFixed(2);
      const py = this.sy(s.y[i]).toFixed(2);
      if (i === 0) {
        pts.push(`M${px},${py}`);
      } else if (s.step) {
        pts.push(`H${px}`, `V${py}`);
      } else {
        pts.push(`L${px},${py}`);
      }
    }
    return pts.join(" ");
  }

  render(): string {
    const xTicks = niceTicks(this.xDomain[0], this.xDomain[1]);
    const yTicks =
      this.yScale === "log"
        ? logTicks(this.yDomain[0], this.yDomain[1])
        : niceTicks(this.yDomain[0], this.yDomain[1]);
    const plotLeft = MARGIN.left;
    const plotRight = this.w - MARGIN.right;
    const plotTop = MARGIN.top;
    const plotBottom = this.h - MARGIN.bottom;

    const parts: string[] = [];
    parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.w}" height="${this.h}" ` +
        `viewBox="0 0 ${this.w} ${this.h}" font-family="Helvetica, Arial, sans-serif" font-size="11">`
    );
    parts.push(`<rect width="${this.w}" height="${this.h}" fill="white"/>`);
    if (this.opts.title) {
      parts.push(
        `<text x="${(plotLeft + plotRight) / 2}" y="16" text-anchor="middle" font-size="13">` +
          `${esc(this.opts.title)}</text>`
      );
    }

    for (const t of xTicks) {
      const px = this.sx(t).toFixed(2);
      parts.push(`<line x1="${px}" y1="${plotTop}" x2="${px}" y2="${plotBottom}" stroke="#ddd"/>`);
      parts.push(
        `<text x="${px}" y="${plotBottom + 16}" text-anchor="middle">${esc(fmtTick(t))}</text>`
      );
    }
    for (const t of yTicks) {
      const py = this.sy(t).toFixed(2);
      parts.push(`<line x1="${plotLeft}" y1="${py}" x2="${plotRight}" y2="${py}" stroke="#ddd"/>`);
      parts.push(
        `<text x="${plotLeft - 6}" y="${Number(py) + 4}" text-anchor="end">${esc(fmtTick(t))}</text>`
      );
    }
    parts.push(
      `<rect x="${plotLeft}" y="${plotTop}" width="${plotRight - plotLeft}" ` +
        `height="${plotBottom - plotTop}" fill="none" stroke="#444"/>`
    );

    for (const s of this.series) {
      parts.push(
        `<path d="${this.seriesPath(s)}" fill="none" stroke="${s.color}" stroke-width="1.6"/>`
      );
      if (s.marker) {
        for (let i = 0; i < s.x.length; i++) {
          parts.push(
            `<circle cx="${this.sx(s.x[i]).toFixed(2)}" cy="${this.sy(s.y[i]).toFixed(2)}" ` +
              `r="2.6" fill="${s.color}"/>`
          );
        }
      }
    }

    // legend, top-right inside the plot
    this.series.forEach((s, i) => {
      const ly = plotTop + 14 + 15 * i;
      parts.push(
        `<line x1="${plotRight - 130}" y1="${ly - 4}" x2="${plotRight - 108}" y2="${ly - 4}" ` +
          `stroke="${s.color}" stroke-width="2"/>`
      );
      parts.push(`<text x="${plotRight - 102}" y="${ly}">${esc(s.label)}</text>`);
    });

    parts.push(
      `<text x="${(plotLeft + plotRight) / 2}" y="${this.h - 10}" text-anchor="middle">` +
        `${esc(this.opts.xLabel)}</text>`
    );
    parts.push(
      `<text x="16" y="${(plotTop + plotBottom) / 2}" text-anchor="middle" ` +
        `transform="rotate(-90 16 ${(plotTop + plotBottom) / 2})">${esc(this.opts.yLabel)}</text>`
    );
    parts.push("</svg>");
    return parts.join("\n");
  }
}
