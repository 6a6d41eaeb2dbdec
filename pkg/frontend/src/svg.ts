/**
 * Minimal deterministic SVG assembly: scales, axes, polylines, rects.
 * Numbers are formatted with a fixed precision so identical inputs give
 * byte-identical output.
 */

export function fmt(v: number): string {
  if (!Number.isFinite(v)) return "0";
  return Number(v.toPrecision(8)).toString();
}

export interface Scale {
  (v: number): number;
  ticks: number[];
}

export function linearScale(lo: number, hi: number, out0: number,
                            out1: number): Scale {
  const span = hi - lo || 1;
  const f = ((v: number) => out0 + ((v - lo) / span) * (out1 - out0)) as Scale;
  const step = niceStep(span / 5);
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + 1e-12 * span;
       t += step) {
    ticks.push(Math.abs(t) < step * 1e-9 ? 0 : t);
  }
  f.ticks = ticks;
  return f;
}

export function logScale(lo: number, hi: number, out0: number,
                         out1: number): Scale {
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const span = lhi - llo || 1;
  const f = ((v: number) =>
    out0 + ((Math.log10(v) - llo) / span) * (out1 - out0)) as Scale;
  const ticks: number[] = [];
  for (let d = Math.ceil(llo); d <= Math.floor(lhi); d += 1) {
    ticks.push(10 ** d);
  }
  f.ticks = ticks;
  return f;
}

function niceStep(raw: number): number {
  const mag = 10 ** Math.floor(Math.log10(Math.abs(raw) || 1));
  const r = raw / mag;
  if (r < 1.5) return mag;
  if (r < 3.5) return 2 * mag;
  if (r < 7.5) return 5 * mag;
  return 10 * mag;
}

export const PALETTE = ["#1f6fb2", "#d1495b", "#3e885b", "#8c5fa8",
                        "#c07b28", "#4a4a4a", "#7aa6c2"];

export class Svg {
  private parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
      `height="${height}" viewBox="0 0 ${width} ${height}" ` +
      `font-family="Helvetica, Arial, sans-serif">`);
    this.parts.push(
      `<rect width="${width}" height="${height}" fill="white"/>`);
  }

  raw(s: string): void {
    this.parts.push(s);
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string,
       width = 1, dash = ""): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" ` +
      `y2="${fmt(y2)}" stroke="${stroke}" stroke-width="${width}"${d}/>`);
  }

  polyline(xs: number[], ys: number[], stroke: string, width = 1.5,
           dash = ""): void {
    const pts = xs.map((x, i) => `${fmt(x)},${fmt(ys[i])}`).join(" ");
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<polyline points="${pts}" fill="none" stroke="${stroke}" ` +
      `stroke-width="${width}"${d}/>`);
  }

  rect(x: number, y: number, w: number, h: number, fill: string): void {
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" ` +
      `height="${fmt(h)}" fill="${fill}"/>`);
  }

  text(x: number, y: number, s: string, size = 11, anchor = "middle",
       rotate = 0): void {
    const r = rotate ? ` transform="rotate(${rotate} ${fmt(x)} ${fmt(y)})"`
      : "";
    this.parts.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" font-size="${size}" ` +
      `text-anchor="${anchor}"${r}>${escapeXml(s)}</text>`);
  }

  toString(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

export interface Frame {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

export function drawAxes(svg: Svg, frame: Frame, xscale: Scale,
                         yscale: Scale, xlabel: string, ylabel: string,
                         xLog = false): void {
  svg.line(frame.x0, frame.y1, frame.x1, frame.y1, "#222");
  svg.line(frame.x0, frame.y0, frame.x0, frame.y1, "#222");
  for (const t of xscale.ticks) {
    const x = xscale(t);
    svg.line(x, frame.y1, x, frame.y1 + 4, "#222");
    svg.text(x, frame.y1 + 16, xLog ? `1e${Math.round(Math.log10(t))}`
      : tickLabel(t), 10);
  }
  for (const t of yscale.ticks) {
    const y = yscale(t);
    svg.line(frame.x0 - 4, y, frame.x0, y, "#222");
    svg.text(frame.x0 - 7, y + 3.5, tickLabel(t), 10, "end");
  }
  svg.text((frame.x0 + frame.x1) / 2, frame.y1 + 32, xlabel, 12);
  svg.text(frame.x0 - 52, (frame.y0 + frame.y1) / 2, ylabel, 12,
           "middle", -90);
}

export function tickLabel(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-2) return v.toExponential(0).replace("+", "");
  return Number(v.toPrecision(3)).toString();
}
