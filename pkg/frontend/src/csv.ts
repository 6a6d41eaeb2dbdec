/**
 * CSV loading and schema validation for cpchain output files.
 *
 * The renderer never recomputes physics: the numeric arrays returned
 * here are the parsed file contents, handed verbatim to the plotting
 * layer.  Unknown headers are rejected rather than guessed at.
 */

import { readFileSync } from "fs";

export type Kind = "slice" | "heatmap" | "dynamics" | "subradiant";

export interface Table {
  /** column names in file order */
  columns: string[];
  /** column-major numeric data; data[i] belongs to columns[i] */
  data: number[][];
  /** config hash from the leading comment, when present */
  configHash: string | null;
  path: string;
}

export const MAP_COLUMNS = [
  "x0_k0", "z0_k0", "F_g", "F_e", "F_sup", "F_sub", "F_inf",
  "Gam_sup", "Gam_sub", "Gam_nn", "quad_err_flag",
];

export const DYNAMICS_COLUMNS = [
  "t_s", "t_gamma0", "F_total_natural", "F_total_N", "boost_N",
  "excitation", "trace_err",
];

export class SchemaError extends Error {}

export function parseCsv(text: string, path = "<memory>"): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  let configHash: string | null = null;
  let start = 0;
  while (start < lines.length && lines[start].startsWith("#")) {
    const m = lines[start].match(/#\s*config_hash:\s*(\S+)/);
    if (m) configHash = m[1];
    start += 1;
  }
  if (start >= lines.length) {
    throw new SchemaError(`${path}: empty CSV (no header)`);
  }
  const columns = lines[start].split(",").map((c) => c.trim());
  const rows = lines.slice(start + 1);
  if (rows.length === 0) {
    throw new SchemaError(`${path}: no data rows`);
  }
  const data: number[][] = columns.map(() => []);
  rows.forEach((line, k) => {
    const parts = line.split(",");
    if (parts.length !== columns.length) {
      throw new SchemaError(
        `${path}: row ${k + 1} has ${parts.length} fields, ` +
        `expected ${columns.length}`);
    }
    parts.forEach((p, i) => {
      const v = Number(p);
      if (!Number.isFinite(v) && p.trim() !== "nan") {
        throw new SchemaError(`${path}: non-numeric value '${p}'`);
      }
      data[i].push(v);
    });
  });
  return { columns, data, configHash, path };
}

export function loadCsv(path: string): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch (err) {
    throw new SchemaError(`cannot read ${path}: ${(err as Error).message}`);
  }
  return parseCsv(text, path);
}

function sameColumns(a: string[], b: string[]): boolean {
  return a.length === b.length && a.every((c, i) => c === b[i]);
}

/** Columns of a subradiant spread file: x0_k0, F_state_1..d, F_g, F_e. */
function isSubradiantHeader(columns: string[]): boolean {
  if (columns.length < 4) return false;
  if (columns[0] !== "x0_k0") return false;
  if (columns[columns.length - 2] !== "F_g") return false;
  if (columns[columns.length - 1] !== "F_e") return false;
  return columns.slice(1, -2).every((c, i) => c === `F_state_${i + 1}`);
}

export function validateSchema(table: Table, kind: Kind): void {
  const cols = table.columns;
  switch (kind) {
    case "slice":
    case "heatmap":
      if (!sameColumns(cols, MAP_COLUMNS)) {
        throw new SchemaError(
          `${table.path}: not a force-map CSV (columns ${cols.join(",")})`);
      }
      return;
    case "dynamics":
      if (!sameColumns(cols, DYNAMICS_COLUMNS)) {
        throw new SchemaError(
          `${table.path}: not a dynamics CSV (columns ${cols.join(",")})`);
      }
      return;
    case "subradiant":
      if (!isSubradiantHeader(cols)) {
        throw new SchemaError(
          `${table.path}: not a subradiant CSV (columns ${cols.join(",")})`);
      }
      return;
  }
}

export function column(table: Table, name: string): number[] {
  const i = table.columns.indexOf(name);
  if (i < 0) {
    throw new SchemaError(`${table.path}: missing column '${name}'`);
  }
  return table.data[i];
}
