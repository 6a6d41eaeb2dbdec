/**
 * Figure assembly for the four supported kinds.
 *
 * slice      - force-map CSV restricted to one surface distance: force
 *              and decay line panels versus emitter separation
 * heatmap    - force-map CSV on a full rectangular grid: colored cells
 * dynamics   - one or more boost time-series CSVs: traces plus an inset
 *              of peak |boost| versus emitter number
 * subradiant - J = 0 force spread versus separation with product-state
 *              reference lines
 *
 * Every plotted value is taken verbatim from the parsed CSV.
 */

import { basename } from "path";

import { column, Kind, SchemaError, Table, validateSchema } from "./csv.js";
import { drawAxes, Frame, linearScale, logScale, PALETTE, Svg,
         tickLabel } from "./svg.js";

export interface RenderJob {
  kind: Kind;
  inputs: Table[];
  /** heatmap quantity, one of the map columns */
  quantity?: string;
}

export function render(job: RenderJob): string {
  if (job.inputs.length === 0) {
    throw new SchemaError("no input tables");
  }
  for (const t of job.inputs) validateSchema(t, job.kind);
  switch (job.kind) {
    case "slice":
      return renderSlice(job.inputs[0]);
    case "heatmap":
      return renderHeatmap(job.inputs[0], job.quantity ?? "F_sup");
    case "dynamics":
      return renderDynamics(job.inputs);
    case "subradiant":
      return renderSubradiant(job.inputs[0]);
  }
}

function uniqueSorted(vals: number[]): number[] {
  return [...new Set(vals)].sort((a, b) => a - b);
}

function finite(vals: number[]): number[] {
  return vals.filter((v) => Number.isFinite(v));
}

function renderSlice(table: Table): string {
  const z = uniqueSorted(column(table, "z0_k0"));
  if (z.length !== 1) {
    throw new SchemaError(
      `slice needs a single surface distance, file has ${z.length}`);
  }
  const x = column(table, "x0_k0");
  const svg = new Svg(640, 540);
  svg.text(320, 20, `two-emitter forces and decay at k0 z0 = ${z[0]}`, 13);

  const panels: Array<{ frame: Frame; series: string[]; ylab: string }> = [
    { frame: { x0: 70, y0: 40, x1: 610, y1: 265 },
      series: ["F_sup", "F_sub", "F_inf"],
      ylab: "force (hbar G0 k0)" },
    { frame: { x0: 70, y0: 305, x1: 610, y1: 500 },
      series: ["Gam_sup", "Gam_sub"],
      ylab: "decay (G0)" },
  ];
  for (const panel of panels) {
    const ys = panel.series.map((s) => column(table, s));
    const all = finite(ys.flat());
    const lo = Math.min(...all);
    const hi = Math.max(...all);
    const pad = 0.05 * (hi - lo || 1);
    const xs = logScale(Math.min(...x), Math.max(...x), panel.frame.x0,
                        panel.frame.x1);
    const yscale = linearScale(lo - pad, hi + pad, panel.frame.y1,
                               panel.frame.y0);
    drawAxes(svg, panel.frame, xs, yscale, "k0 x0", panel.ylab, true);
    panel.series.forEach((name, i) => {
      const dash = name === "F_inf" ? "5,4" : "";
      svg.polyline(x.map(xs), ys[i].map(yscale), PALETTE[i], 1.6, dash);
      svg.text(panel.frame.x1 - 8,
               panel.frame.y0 + 14 + 14 * i, name, 11, "end");
      svg.line(panel.frame.x1 - 64, panel.frame.y0 + 10 + 14 * i,
               panel.frame.x1 - 48, panel.frame.y0 + 10 + 14 * i,
               PALETTE[i], 2, dash);
    });
  }
  return svg.toString();
}

function colorFor(v: number, lo: number, hi: number): string {
  if (!Number.isFinite(v)) return "#bbbbbb";
  const t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
  // blue -> white -> red
  const r = Math.round(t < 0.5 ? 60 + 380 * t : 250);
  const g = Math.round(t < 0.5 ? 90 + 320 * t : 250 - 320 * (t - 0.5));
  const b = Math.round(t < 0.5 ? 250 : 250 - 380 * (t - 0.5));
  return `rgb(${Math.min(r, 255)},${Math.max(g, 0)},${Math.max(b, 0)})`;
}

function renderHeatmap(table: Table, quantity: string): string {
  const xs = uniqueSorted(column(table, "x0_k0"));
  const zs = uniqueSorted(column(table, "z0_k0"));
  const xcol = column(table, "x0_k0");
  const zcol = column(table, "z0_k0");
  const vcol = column(table, quantity);
  if (xcol.length !== xs.length * zs.length) {
    throw new SchemaError("heatmap needs a full rectangular grid");
  }
  const frame: Frame = { x0: 80, y0: 50, x1: 560, y1: 470 };
  const svg = new Svg(680, 540);
  svg.text(320, 24, `${quantity} over separation and surface distance`, 13);
  const vals = finite(vcol);
  const lo = Math.min(...vals);
  const hi = Math.max(...vals);
  const cw = (frame.x1 - frame.x0) / xs.length;
  const ch = (frame.y1 - frame.y0) / zs.length;
  for (let k = 0; k < vcol.length; k += 1) {
    const i = xs.indexOf(xcol[k]);
    const j = zs.indexOf(zcol[k]);
    svg.rect(frame.x0 + i * cw, frame.y1 - (j + 1) * ch, cw + 0.5,
             ch + 0.5, colorFor(vcol[k], lo, hi));
  }
  const xMarks: Array<[number, string]> = [
    [0, tickLabel(xs[0])], [xs.length - 1, tickLabel(xs[xs.length - 1])]];
  for (const [idx, label] of xMarks) {
    svg.text(frame.x0 + (idx + 0.5) * cw, frame.y1 + 16, label, 10);
  }
  const zMarks: Array<[number, string]> = [
    [0, tickLabel(zs[0])], [zs.length - 1, tickLabel(zs[zs.length - 1])]];
  for (const [idx, label] of zMarks) {
    svg.text(frame.x0 - 8, frame.y1 - (idx + 0.5) * ch + 3, label, 10,
             "end");
  }
  svg.text((frame.x0 + frame.x1) / 2, frame.y1 + 34, "k0 x0", 12);
  svg.text(frame.x0 - 56, (frame.y0 + frame.y1) / 2, "k0 z0", 12,
           "middle", -90);
  // color bar
  for (let s = 0; s < 120; s += 1) {
    svg.rect(600, 430 - 3 * s, 18, 3.2,
             colorFor(lo + (s / 119) * (hi - lo), lo, hi));
  }
  svg.text(610, 446 + 14, tickLabel(lo), 10);
  svg.text(610, 64, tickLabel(hi), 10);
  return svg.toString();
}

/** Emitter number from a file name like dynamics_n10.csv or boost_n4.csv. */
export function emittersFromName(path: string): number | null {
  const m = basename(path).match(/_n(\d+)\b/);
  return m ? Number(m[1]) : null;
}

function renderDynamics(tables: Table[]): string {
  const svg = new Svg(680, 520);
  svg.text(340, 22, "transient force boost of an inverted chain", 13);
  const frame: Frame = { x0: 80, y0: 45, x1: 650, y1: 470 };
  const allT = finite(tables.flatMap((t) => column(t, "t_s")));
  const allB = finite(tables.flatMap((t) => column(t, "boost_N")));
  const tHi = Math.max(...allT);
  const bLo = Math.min(...allB);
  const bHi = Math.max(...allB);
  const pad = 0.05 * (bHi - bLo || 1);
  const xs = linearScale(0, tHi * 1e9, frame.x0, frame.x1);
  const ys = linearScale(bLo - pad, bHi + pad, frame.y1, frame.y0);
  drawAxes(svg, frame, xs, ys, "time (ns)", "boost (N)");
  const peaks: Array<[number, number]> = [];
  tables.forEach((t, i) => {
    const tt = column(t, "t_s").map((v) => v * 1e9);
    const bb = column(t, "boost_N");
    svg.polyline(tt.map(xs), bb.map(ys), PALETTE[i % PALETTE.length]);
    const n = emittersFromName(t.path);
    const peak = Math.max(...bb.map(Math.abs));
    if (n !== null) peaks.push([n, peak]);
    svg.text(frame.x1 - 8, frame.y0 + 14 + 14 * i,
             n !== null ? `N = ${n}` : basename(t.path), 11, "end");
    svg.line(frame.x1 - 70, frame.y0 + 10 + 14 * i, frame.x1 - 52,
             frame.y0 + 10 + 14 * i, PALETTE[i % PALETTE.length], 2);
  });
  if (peaks.length > 1) {
    peaks.sort((a, b) => a[0] - b[0]);
    const inset: Frame = { x0: 450, y0: 330, x1: 630, y1: 450 };
    svg.rect(inset.x0 - 34, inset.y0 - 14, inset.x1 - inset.x0 + 46,
             inset.y1 - inset.y0 + 44, "white");
    const ns = peaks.map((p) => p[0]);
    const ps = peaks.map((p) => p[1]);
    const ix = linearScale(Math.min(...ns) - 0.5, Math.max(...ns) + 0.5,
                           inset.x0, inset.x1);
    const iy = linearScale(0, Math.max(...ps) * 1.1, inset.y1, inset.y0);
    svg.line(inset.x0, inset.y1, inset.x1, inset.y1, "#222");
    svg.line(inset.x0, inset.y0, inset.x0, inset.y1, "#222");
    svg.polyline(ns.map(ix), ps.map(iy), "#222", 1.2);
    ns.forEach((n, i) => {
      svg.raw(`<circle cx="${ix(n)}" cy="${iy(ps[i])}" r="2.6" ` +
              `fill="${PALETTE[0]}"/>`);
      svg.text(ix(n), inset.y1 + 12, String(n), 9);
    });
    svg.text((inset.x0 + inset.x1) / 2, inset.y1 + 24,
             "peak |boost| vs N", 10);
  }
  return svg.toString();
}

function renderSubradiant(table: Table): string {
  const x = column(table, "x0_k0");
  const states = table.columns.filter((c) => c.startsWith("F_state_"));
  const svg = new Svg(640, 480);
  svg.text(320, 22,
           `forces on the ${states.length} degenerate subradiant states`,
           13);
  const frame: Frame = { x0: 80, y0: 45, x1: 610, y1: 420 };
  const series = [...states, "F_g", "F_e"].map((c) => column(table, c));
  const all = finite(series.flat());
  const lo = Math.min(...all);
  const hi = Math.max(...all);
  const pad = 0.06 * (hi - lo || 1);
  const xs = logScale(Math.min(...x), Math.max(...x), frame.x0, frame.x1);
  const ys = linearScale(lo - pad, hi + pad, frame.y1, frame.y0);
  drawAxes(svg, frame, xs, ys, "k0 x0", "force (hbar G0 k0)", true);
  states.forEach((name, i) => {
    svg.polyline(x.map(xs), column(table, name).map(ys),
                 PALETTE[i % PALETTE.length]);
  });
  for (const [name, dash] of [["F_g", "6,4"], ["F_e", "2,3"]] as
       Array<[string, string]>) {
    svg.polyline(x.map(xs), column(table, name).map(ys), "#222", 1.2, dash);
    svg.text(frame.x1 - 8,
             ys(column(table, name)[x.length - 1]) - 4, name, 10, "end");
  }
  return svg.toString();
}
