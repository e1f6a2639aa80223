/** Minimal SVG scene assembly: enough for line/marker/heatmap figures
 * without a DOM or canvas dependency. */

export type ScaleKind = "linear" | "log";

export class Scale {
  constructor(
    public kind: ScaleKind,
    public d0: number,
    public d1: number,
    public r0: number,
    public r1: number,
  ) {
    if (kind === "log" && (d0 <= 0 || d1 <= 0)) {
      throw new Error("log scale needs a positive domain");
    }
  }

  map(v: number): number {
    const t =
      this.kind === "log"
        ? (Math.log(v) - Math.log(this.d0)) / (Math.log(this.d1) - Math.log(this.d0))
        : (v - this.d0) / (this.d1 - this.d0);
    return this.r0 + t * (this.r1 - this.r0);
  }

  ticks(count = 6): number[] {
    if (this.kind === "log") {
      const lo = Math.ceil(Math.log10(this.d0) - 1e-9);
      const hi = Math.floor(Math.log10(this.d1) + 1e-9);
      const out: number[] = [];
      for (let e = lo; e <= hi; e++) out.push(10 ** e);
      if (out.length >= 2) return out;
      // fewer than two decades: fall back to a handful of linear ticks
    }
    const span = this.d1 - this.d0;
    const step = niceStep(span / Math.max(count - 1, 1));
    const start = Math.ceil(this.d0 / step - 1e-9) * step;
    const out: number[] = [];
    for (let v = start; v <= this.d1 + 1e-9 * Math.abs(span); v += step) out.push(v);
    return out;
  }
}

function niceStep(raw: number): number {
  const mag = 10 ** Math.floor(Math.log10(Math.abs(raw)));
  const r = raw / mag;
  const nice = r >= 5 ? 10 : r >= 2 ? 5 : r >= 1 ? 2 : 1;
  return nice * mag;
}

export function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(0);
  return String(Number(v.toPrecision(6)));
}

export interface Margins {
  left: number;
  right: number;
  top: number;
  bottom: number;
}

export class Figure {
  private parts: string[] = [];

  constructor(
    public width = 720,
    public height = 520,
    public margins: Margins = { left: 70, right: 20, top: 36, bottom: 52 },
  ) {}

  add(fragment: string): void {
    this.parts.push(fragment);
  }

  axes(xs: Scale, ys: Scale, xlabel: string, ylabel: string, title = ""): void {
    const m = this.margins;
    const { width: w, height: h } = this;
    this.add(
      `<rect x="${m.left}" y="${m.top}" width="${w - m.left - m.right}" height="${h - m.top - m.bottom}" fill="none" stroke="black"/>`,
    );
    for (const t of xs.ticks()) {
      const px = xs.map(t);
      this.add(`<line x1="${px.toFixed(2)}" y1="${h - m.bottom}" x2="${px.toFixed(2)}" y2="${h - m.bottom + 5}" stroke="black"/>`);
      this.add(
        `<text x="${px.toFixed(2)}" y="${h - m.bottom + 18}" text-anchor="middle" font-size="11">${fmtTick(t)}</text>`,
      );
    }
    for (const t of ys.ticks()) {
      const py = ys.map(t);
      this.add(`<line x1="${m.left - 5}" y1="${py.toFixed(2)}" x2="${m.left}" y2="${py.toFixed(2)}" stroke="black"/>`);
      this.add(
        `<text x="${m.left - 8}" y="${(py + 4).toFixed(2)}" text-anchor="end" font-size="11">${fmtTick(t)}</text>`,
      );
    }
    this.add(
      `<text x="${(m.left + w - m.right) / 2}" y="${h - 12}" text-anchor="middle" font-size="13">${escapeXml(xlabel)}</text>`,
    );
    this.add(
      `<text x="18" y="${(m.top + h - m.bottom) / 2}" text-anchor="middle" font-size="13" transform="rotate(-90 18 ${(m.top + h - m.bottom) / 2})">${escapeXml(ylabel)}</text>`,
    );
    if (title) {
      this.add(`<text x="${w / 2}" y="22" text-anchor="middle" font-size="14">${escapeXml(title)}</text>`);
    }
  }

  polyline(xs: number[], ys: number[], stroke = "black", widthPx = 1.4, dash = ""): void {
    const pts = xs.map((x, i) => `${x.toFixed(2)},${ys[i].toFixed(2)}`).join(" ");
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    this.add(`<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="${widthPx}"${dashAttr}/>`);
  }

  markers(xs: number[], ys: number[], stroke = "black", r = 2.4): void {
    for (let i = 0; i < xs.length; i++) {
      this.add(`<circle cx="${xs[i].toFixed(2)}" cy="${ys[i].toFixed(2)}" r="${r}" fill="none" stroke="${stroke}"/>`);
    }
  }

  cell(x: number, y: number, w: number, h: number, color: string): void {
    this.add(
      `<rect x="${x.toFixed(2)}" y="${y.toFixed(2)}" width="${(w + 0.5).toFixed(2)}" height="${(h + 0.5).toFixed(2)}" fill="${color}"/>`,
    );
  }

  legend(lines: { label: string; stroke?: string; marker?: boolean }[]): void {
    const m = this.margins;
    const x0 = m.left + 12;
    let y = m.top + 18;
    const boxH = lines.length * 18 + 10;
    const boxW = Math.max(...lines.map((l) => l.label.length)) * 7.2 + 44;
    this.add(
      `<rect x="${x0 - 6}" y="${m.top + 4}" width="${boxW}" height="${boxH}" fill="white" stroke="black" opacity="0.9"/>`,
    );
    for (const line of lines) {
      if (line.marker) {
        this.add(`<circle cx="${x0 + 9}" cy="${y - 4}" r="3" fill="none" stroke="${line.stroke ?? "black"}"/>`);
      } else {
        this.add(`<line x1="${x0}" y1="${y - 4}" x2="${x0 + 18}" y2="${y - 4}" stroke="${line.stroke ?? "black"}" stroke-width="1.6"/>`);
      }
      this.add(`<text x="${x0 + 26}" y="${y}" font-size="12" class="legend">${escapeXml(line.label)}</text>`);
      y += 18;
    }
  }

  toString(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" ` +
      `viewBox="0 0 ${this.width} ${this.height}" font-family="Helvetica, Arial, sans-serif">\n` +
      `<rect width="100%" height="100%" fill="white"/>\n` +
      this.parts.join("\n") +
      `\n</svg>\n`
    );
  }
}

export function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Blue-white-red diverging map on [0, 1]. */
export function colormap(t: number): string {
  const clamp = (v: number) => Math.max(0, Math.min(1, v));
  t = clamp(t);
  // piecewise-linear viridis-like anchors
  const anchors: [number, number, number][] = [
    [68, 1, 84],
    [59, 82, 139],
    [33, 145, 140],
    [94, 201, 98],
    [253, 231, 37],
  ];
  const s = t * (anchors.length - 1);
  const i = Math.min(Math.floor(s), anchors.length - 2);
  const f = s - i;
  const mix = (a: number, b: number) => Math.round(a + (b - a) * f);
  const [r, g, b] = [0, 1, 2].map((k) => mix(anchors[i][k], anchors[i + 1][k]));
  return `rgb(${r},${g},${b})`;
}
