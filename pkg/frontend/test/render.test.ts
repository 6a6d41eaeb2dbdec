import { mkdtempSync, readFileSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { describe, expect, it } from "vitest";

import { column, loadCsv } from "../src/csv.js";
import { emittersFromName, render } from "../src/render.js";
import { main, parseArgs } from "../src/cli.js";
import { fmt } from "../src/svg.js";

const DATA = new URL("../data/", import.meta.url).pathname;

describe("render", () => {
  it("slice figure embeds every force value from the CSV", () => {
    const table = loadCsv(DATA + "force_slice.csv");
    const svg = render({ kind: "slice", inputs: [table] });
    expect(svg).toContain("<svg");
    expect(svg).toContain("polyline");
    // the y-placement of each plotted point is an affine map of the CSV
    // value; spot-check monotone agreement by counting data points
    const points = svg.match(/points="([^"]+)"/g)!;
    const sup = column(table, "F_sup");
    expect(points.some((p) => p.split(" ").length === sup.length))
      .toBe(true);
  });

  it("is deterministic byte for byte", () => {
    const table = loadCsv(DATA + "force_slice.csv");
    const a = render({ kind: "slice", inputs: [table] });
    const b = render({ kind: "slice",
                       inputs: [loadCsv(DATA + "force_slice.csv")] });
    expect(a).toBe(b);
  });

  it("heatmap draws one cell per grid point", () => {
    const table = loadCsv(DATA + "force_map.csv");
    const svg = render({ kind: "heatmap", inputs: [table],
                         quantity: "F_sub" });
    const cells = svg.match(/<rect /g)!;
    const gridSize = column(table, "x0_k0").length;
    // background + grid cells + color bar
    expect(cells.length).toBeGreaterThanOrEqual(gridSize);
  });

  it("heatmap refuses a partial grid", () => {
    const text = readFileSync(DATA + "force_map.csv", "utf-8");
    const lines = text.split("\n").filter((l) => l.length > 0);
    const truncated = lines.slice(0, lines.length - 1).join("\n") + "\n";
    const dir = mkdtempSync(join(tmpdir(), "plotkit-"));
    const p = join(dir, "partial.csv");
    writeFileSync(p, truncated);
    expect(() => render({ kind: "heatmap", inputs: [loadCsv(p)] }))
      .toThrow(/rectangular/);
  });

  it("dynamics overlays traces and builds the peak inset", () => {
    const tables = [2, 4, 6].map((n) =>
      loadCsv(DATA + `dynamics_n${n}.csv`));
    const svg = render({ kind: "dynamics", inputs: tables });
    expect(svg).toContain("N = 2");
    expect(svg).toContain("N = 6");
    expect(svg).toContain("peak |boost| vs N");
    expect((svg.match(/<circle /g) ?? []).length).toBe(3);
  });

  it("subradiant figure carries five state curves plus references", () => {
    const table = loadCsv(DATA + "subradiant.csv");
    const svg = render({ kind: "subradiant", inputs: [table] });
    const curves = (svg.match(/<polyline /g) ?? []).length;
    expect(curves).toBe(5 + 2);
    expect(svg).toContain("F_g");
    expect(svg).toContain("F_e");
  });

  it("reads the emitter number from the file name", () => {
    expect(emittersFromName("/a/b/dynamics_n10.csv")).toBe(10);
    expect(emittersFromName("boost_n4.csv")).toBe(4);
    expect(emittersFromName("dynamics.csv")).toBeNull();
  });
});

describe("cli", () => {
  it("writes an SVG and exits 0", () => {
    const dir = mkdtempSync(join(tmpdir(), "plotkit-"));
    const out = join(dir, "fig.svg");
    const code = main(["--kind", "slice", "--in",
                       DATA + "force_slice.csv", "--out", out]);
    expect(code).toBe(0);
    expect(readFileSync(out, "utf-8")).toContain("</svg>");
  });

  it("identical inputs give identical files", () => {
    const dir = mkdtempSync(join(tmpdir(), "plotkit-"));
    const a = join(dir, "a.svg");
    const b = join(dir, "b.svg");
    main(["--kind", "subradiant", "--in", DATA + "subradiant.csv",
          "--out", a]);
    main(["--kind", "subradiant", "--in", DATA + "subradiant.csv",
          "--out", b]);
    expect(readFileSync(a)).toEqual(readFileSync(b));
  });

  it("empty csv exits nonzero", () => {
    const dir = mkdtempSync(join(tmpdir(), "plotkit-"));
    const p = join(dir, "empty.csv");
    writeFileSync(p, "");
    const code = main(["--kind", "slice", "--in", p, "--out",
                       join(dir, "x.svg")]);
    expect(code).toBe(2);
  });

  it("schema mismatch exits nonzero", () => {
    const dir = mkdtempSync(join(tmpdir(), "plotkit-"));
    const code = main(["--kind", "dynamics", "--in",
                       DATA + "force_map.csv",
                       "--out", join(dir, "x.svg")]);
    expect(code).toBe(2);
  });

  it("rejects unknown kinds and missing arguments", () => {
    expect(() => parseArgs(["--kind", "pie"])).toThrow();
    expect(() => parseArgs(["--kind", "slice"])).toThrow(/--in/);
    expect(() => parseArgs(["--kind", "slice", "--in", "x.csv"]))
      .toThrow(/--out/);
  });
});

describe("svg formatting", () => {
  it("fixed precision keeps output stable", () => {
    expect(fmt(1 / 3)).toBe("0.33333333");
    expect(fmt(Number.NaN)).toBe("0");
  });
});
