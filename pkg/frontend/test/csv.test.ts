import { readFileSync } from "fs";
import { describe, expect, it } from "vitest";

import { column, loadCsv, parseCsv, SchemaError,
         validateSchema } from "../src/csv.js";

const DATA = new URL("../data/", import.meta.url).pathname;

/** Independent minimal parse: split lines and apply Number(). */
function naiveColumns(path: string): Map<string, number[]> {
  const lines = readFileSync(path, "utf-8").split("\n")
    .filter((l) => l.length > 0 && !l.startsWith("#"));
  const header = lines[0].split(",");
  const out = new Map<string, number[]>(header.map((h) => [h, []]));
  for (const line of lines.slice(1)) {
    line.split(",").forEach((v, i) => {
      out.get(header[i])!.push(Number(v));
    });
  }
  return out;
}

describe("csv parsing", () => {
  it("keeps the data arrays bit-identical to the file contents", () => {
    for (const name of ["force_slice.csv", "force_map.csv",
                        "dynamics_n4.csv", "subradiant.csv"]) {
      const table = loadCsv(DATA + name);
      const reference = naiveColumns(DATA + name);
      expect(table.columns).toEqual([...reference.keys()]);
      for (const col of table.columns) {
        const parsed = column(table, col);
        const ref = reference.get(col)!;
        expect(parsed.length).toBe(ref.length);
        for (let i = 0; i < ref.length; i += 1) {
          // bit-identical, not approximately equal
          expect(Object.is(parsed[i], ref[i])).toBe(true);
        }
      }
    }
  });

  it("extracts the config hash comment", () => {
    const table = loadCsv(DATA + "force_slice.csv");
    expect(table.configHash).toMatch(/^[0-9a-f]{16}$/);
  });

  it("rejects empty input", () => {
    expect(() => parseCsv("", "empty.csv")).toThrow(SchemaError);
    expect(() => parseCsv("# config_hash: abc\n", "empty.csv"))
      .toThrow(SchemaError);
    expect(() => parseCsv("a,b\n", "headeronly.csv")).toThrow(/no data/);
  });

  it("rejects ragged rows", () => {
    expect(() => parseCsv("a,b\n1,2\n3\n")).toThrow(/fields/);
  });

  it("validates schemas per kind", () => {
    const map = loadCsv(DATA + "force_map.csv");
    const dyn = loadCsv(DATA + "dynamics_n2.csv");
    const sub = loadCsv(DATA + "subradiant.csv");
    validateSchema(map, "heatmap");
    validateSchema(map, "slice");
    validateSchema(dyn, "dynamics");
    validateSchema(sub, "subradiant");
    expect(() => validateSchema(dyn, "heatmap")).toThrow(SchemaError);
    expect(() => validateSchema(map, "dynamics")).toThrow(SchemaError);
    expect(() => validateSchema(dyn, "subradiant")).toThrow(SchemaError);
  });
});
