import { mkdtempSync, readFileSync, statSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { column, readCsv, textColumn } from "../src/csv.js";
import { fitRate, leastSquaresSlope } from "../src/fit.js";
import { plotConvergence, plotField2d, plotProfile } from "../src/plots.js";

function tmp(): string {
  return mkdtempSync(join(tmpdir(), "entrofilt-plots-"));
}

describe("csv", () => {
  it("parses header and numeric columns", () => {
    const dir = tmp();
    const p = join(dir, "t.csv");
    writeFileSync(p, "x,rho\n0.0,1.5\n1.0,2.5\n");
    const tab = readCsv(p);
    expect(tab.header).toEqual(["x", "rho"]);
    expect(column(tab, "rho")).toEqual([1.5, 2.5]);
  });

  it("names the missing column in its error", () => {
    const dir = tmp();
    const p = join(dir, "t.csv");
    writeFileSync(p, "x,rho\n0.0,1.5\n");
    expect(() => column(readCsv(p), "vorticity")).toThrowError(/missing column 'vorticity'/);
  });

  it("reads text columns from summaries", () => {
    const dir = tmp();
    const p = join(dir, "summary.csv");
    writeFileSync(p, "case,order,rate_l1,rate_l2\nsod,3,9.5e-01,9.8e-01\n");
    const tab = readCsv(p);
    expect(textColumn(tab, "case")).toEqual(["sod"]);
    expect(column(tab, "rate_l2")[0]).toBeCloseTo(0.98, 12);
  });
});

describe("fit", () => {
  it("recovers an exact power-law exponent", () => {
    const ns = [8, 16, 32, 64];
    const errs = ns.map((n) => 5.0 * n ** -3.25);
    expect(fitRate(ns, errs)).toBeCloseTo(3.25, 12);
  });

  it("slope of a line is exact", () => {
    expect(leastSquaresSlope([0, 1, 2], [1, 3, 5])).toBeCloseTo(2, 14);
  });
});

describe("profile plot", () => {
  it("renders markers and a reference line", () => {
    const dir = tmp();
    const sol = join(dir, "solution.csv");
    const ref = join(dir, "reference.csv");
    writeFileSync(sol, "x,rho,vx,P\n0.1,1.0,0.0,1.0\n0.5,0.8,0.1,0.9\n0.9,0.2,0.0,0.2\n");
    const lines = ["x,rho,vx,P"];
    for (let i = 0; i <= 50; i++) {
      const x = i / 50;
      lines.push(`${x},${1 - 0.8 * x},0,1`);
    }
    writeFileSync(ref, lines.join("\n") + "\n");
    const out = join(dir, "profile.svg");
    plotProfile(sol, ref, out);
    expect(statSync(out).size).toBeGreaterThan(500);
    const svg = readFileSync(out, "utf8");
    expect(svg).toContain("<circle");
    expect(svg).toContain("<polyline");
  });

  it("rejects the 2D schema", () => {
    const dir = tmp();
    const sol = join(dir, "solution.csv");
    writeFileSync(sol, "x,y,rho,vx,vy,P\n0,0,1,0,0,1\n");
    expect(() => plotProfile(sol, sol, join(dir, "o.svg"))).toThrowError(/1D schema/);
  });
});

describe("convergence plot", () => {
  it("fits the slope in the legend from the table", () => {
    const dir = tmp();
    const conv = join(dir, "convergence.csv");
    const ns = [20, 40, 80];
    const rows = ns.map((n, i) => `${n},${3 * n ** -1.0},${2 * n ** -4.0},${i === 0 ? "nan" : "4.0"}`);
    writeFileSync(conv, "N,eps_l1,eps_l2,rate_running\n" + rows.join("\n") + "\n");
    const out = join(dir, "conv.svg");
    plotConvergence(conv, out);
    const svg = readFileSync(out, "utf8");
    const m2 = svg.match(/eps_l2: rate=([-\d.]+)/);
    expect(m2).not.toBeNull();
    expect(Number(m2![1])).toBeCloseTo(4.0, 3);
    const m1 = svg.match(/eps_l1: rate=([-\d.]+)/);
    expect(Number(m1![1])).toBeCloseTo(1.0, 3);
  });

  it("two-row table still renders with a finite slope", () => {
    const dir = tmp();
    const conv = join(dir, "convergence.csv");
    writeFileSync(conv, "N,eps_l1,eps_l2,rate_running\n10,1e-2,4e-3,nan\n20,5e-3,1e-3,2.0\n");
    const out = join(dir, "two.svg");
    plotConvergence(conv, out);
    const svg = readFileSync(out, "utf8");
    expect(svg).toMatch(/eps_l2: rate=2\.0000/);
  });
});

describe("field2d plot", () => {
  it("renders a raster from scattered points", () => {
    const dir = tmp();
    const sol = join(dir, "solution.csv");
    const lines = ["x,y,rho,vx,vy,P"];
    for (let i = 0; i < 20; i++) {
      for (let j = 0; j < 20; j++) {
        lines.push(`${i / 19},${j / 19},${1 + Math.sin(i / 3) * Math.cos(j / 3)},0,0,1`);
      }
    }
    writeFileSync(sol, lines.join("\n") + "\n");
    const out = join(dir, "field.svg");
    plotField2d(sol, out, 20);
    expect(statSync(out).size).toBeGreaterThan(1000);
    expect(readFileSync(out, "utf8")).toContain("<rect");
  });
});
