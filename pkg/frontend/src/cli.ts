/**
 * cpchain-render: turn cpchain CSV output into SVG figures.
 *
 * Usage:
 *   cpchain-render --kind slice      --in force_map.csv      --out fig.svg
 *   cpchain-render --kind heatmap    --in force_map.csv      --out map.svg
 *                  [--quantity F_sub]
 *   cpchain-render --kind dynamics   --in boost_n2.csv --in boost_n4.csv
 *                  --out boost.svg
 *   cpchain-render --kind subradiant --in subradiant.csv     --out sub.svg
 *
 * Dynamics inputs carry their emitter number in the file name
 * (..._n<N>.csv); the peak-scaling inset uses it.  Rendering is a pure
 * function of the input bytes, so identical inputs give identical SVG.
 */

import { writeFileSync } from "fs";

import { Kind, loadCsv, SchemaError } from "./csv.js";
import { render } from "./render.js";

interface Args {
  kind: Kind;
  inputs: string[];
  out: string;
  quantity?: string;
}

export function parseArgs(argv: string[]): Args {
  const inputs: string[] = [];
  let kind: string | null = null;
  let out: string | null = null;
  let quantity: string | undefined;
  for (let i = 0; i < argv.length; i += 1) {
    const a = argv[i];
    const next = () => {
      i += 1;
      if (i >= argv.length) throw new SchemaError(`missing value for ${a}`);
      return argv[i];
    };
    if (a === "--kind") kind = next();
    else if (a === "--in") inputs.push(next());
    else if (a === "--out") out = next();
    else if (a === "--quantity") quantity = next();
    else throw new SchemaError(`unknown argument '${a}'`);
  }
  if (!kind || !["slice", "heatmap", "dynamics", "subradiant"]
      .includes(kind)) {
    throw new SchemaError(
      "need --kind slice|heatmap|dynamics|subradiant");
  }
  if (inputs.length === 0) throw new SchemaError("need at least one --in");
  if (!out) throw new SchemaError("need --out");
  return { kind: kind as Kind, inputs, out, quantity };
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`usage error: ${(err as Error).message}`);
    return 2;
  }
  try {
    const tables = args.inputs.map(loadCsv);
    const svg = render({ kind: args.kind, inputs: tables,
                         quantity: args.quantity });
    writeFileSync(args.out, svg);
    console.error(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`input error: ${err.message}`);
      return 2;
    }
    console.error(`render failed: ${(err as Error).message}`);
    return 1;
  }
}

const invokedDirectly = process.argv[1] !== undefined
  && import.meta.url.endsWith(process.argv[1].split("/").pop() as string);
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
