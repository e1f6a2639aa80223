import { writeFileSync } from "node:fs";

import { column, hasColumn, readCsv } from "./csv.js";
import { fitRate } from "./fit.js";
import { Figure, Scale, colormap } from "./svg.js";

function extent(values: number[], padFrac = 0.04): [number, number] {
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const pad = (hi - lo || Math.abs(hi) || 1) * padFrac;
  return [lo - pad, hi + pad];
}

function sortedBy(xs: number[], ys: number[]): [number[], number[]] {
  const order = xs.map((_, i) => i).sort((a, b) => xs[a] - xs[b]);
  return [order.map((i) => xs[i]), order.map((i) => ys[i])];
}

/** 1D density profile: reference curve plus solution-point markers. */
export function plotProfile(solutionCsv: string, referenceCsv: string, outPath: string): void {
  const sol = readCsv(solutionCsv);
  const ref = readCsv(referenceCsv);
  if (hasColumn(sol, "y")) {
    throw new Error(`${solutionCsv}: profile plots need the 1D schema (x,rho,vx,P)`);
  }
  const xs = column(sol, "x");
  const rs = column(sol, "rho");
  const [xr, rr] = sortedBy(column(ref, "x"), column(ref, "rho"));

  const fig = new Figure();
  const m = fig.margins;
  const sx = new Scale("linear", ...extent([...xs, ...xr]), m.left, fig.width - m.right);
  const sy = new Scale("linear", ...extent([...rs, ...rr]), fig.height - m.bottom, m.top);
  fig.axes(sx, sy, "x", "rho");
  fig.polyline(xr.map((v) => sx.map(v)), rr.map((v) => sy.map(v)));
  fig.markers(xs.map((v) => sx.map(v)), rs.map((v) => sy.map(v)));
  fig.legend([
    { label: "reference", stroke: "black" },
    { label: "solution", marker: true },
  ]);
  writeFileSync(outPath, fig.toString());
}

/** Log-log convergence curves with least-squares rates in the legend. */
export function plotConvergence(convergenceCsv: string, outPath: string): void {
  const tab = readCsv(convergenceCsv);
  const ns = column(tab, "N");
  const series: { name: string; errs: number[]; stroke: string }[] = [];
  for (const [name, stroke] of [
    ["eps_l1", "#444444"],
    ["eps_l2", "#1f5fa8"],
  ] as const) {
    if (hasColumn(tab, name)) {
      series.push({ name, errs: column(tab, name), stroke });
    }
  }
  if (series.length === 0) {
    throw new Error(`missing column 'eps_l1' or 'eps_l2' in ${convergenceCsv}`);
  }

  const all = series.flatMap((s) => s.errs);
  const fig = new Figure();
  const m = fig.margins;
  const sx = new Scale("log", Math.min(...ns) / 1.1, Math.max(...ns) * 1.1, m.left, fig.width - m.right);
  const sy = new Scale("log", Math.min(...all) / 1.6, Math.max(...all) * 1.6, fig.height - m.bottom, m.top);
  fig.axes(sx, sy, "N", "density error");
  const legend = [];
  for (const s of series) {
    const px = ns.map((v) => sx.map(v));
    const py = s.errs.map((v) => sy.map(v));
    fig.polyline(px, py, s.stroke);
    fig.markers(px, py, s.stroke);
    legend.push({ label: `${s.name}: rate=${fitRate(ns, s.errs).toFixed(4)}`, stroke: s.stroke });
  }
  fig.legend(legend);
  writeFileSync(outPath, fig.toString());
}

/** Pseudocolor density field binned onto a regular raster. */
export function plotField2d(solutionCsv: string, outPath: string, bins = 160): void {
  const tab = readCsv(solutionCsv);
  const xs = column(tab, "x");
  const ys = column(tab, "y");
  const rs = column(tab, "rho");
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  const [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  const aspect = (y1 - y0) / (x1 - x0 || 1);
  const nx = aspect > 1 ? Math.max(8, Math.round(bins / aspect)) : bins;
  const ny = aspect > 1 ? bins : Math.max(8, Math.round(bins * aspect));

  const sums = new Float64Array(nx * ny);
  const counts = new Float64Array(nx * ny);
  for (let i = 0; i < xs.length; i++) {
    const bx = Math.min(nx - 1, Math.floor(((xs[i] - x0) / (x1 - x0)) * nx));
    const by = Math.min(ny - 1, Math.floor(((ys[i] - y0) / (y1 - y0)) * ny));
    sums[by * nx + bx] += rs[i];
    counts[by * nx + bx] += 1;
  }
  let rmin = Infinity;
  let rmax = -Infinity;
  const vals = new Float64Array(nx * ny).fill(NaN);
  for (let k = 0; k < nx * ny; k++) {
    if (counts[k] > 0) {
      vals[k] = sums[k] / counts[k];
      rmin = Math.min(rmin, vals[k]);
      rmax = Math.max(rmax, vals[k]);
    }
  }

  const fig = new Figure(720, Math.round(720 * Math.max(0.4, Math.min(aspect, 2.0))) + 90);
  const m = fig.margins;
  const sx = new Scale("linear", x0, x1, m.left, fig.width - m.right);
  const sy = new Scale("linear", y0, y1, fig.height - m.bottom, m.top);
  const cw = (fig.width - m.left - m.right) / nx;
  const ch = (fig.height - m.top - m.bottom) / ny;
  for (let by = 0; by < ny; by++) {
    for (let bx = 0; bx < nx; bx++) {
      const v = vals[by * nx + bx];
      if (Number.isNaN(v)) continue;
      const t = rmax > rmin ? (v - rmin) / (rmax - rmin) : 0.5;
      fig.cell(m.left + bx * cw, fig.height - m.bottom - (by + 1) * ch, cw, ch, colormap(t));
    }
  }
  fig.axes(sx, sy, "x", "y", `density in [${rmin.toPrecision(3)}, ${rmax.toPrecision(3)}]`);
  writeFileSync(outPath, fig.toString());
}
