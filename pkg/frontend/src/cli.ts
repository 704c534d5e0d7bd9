/** freqlab-plot <figure-kind> <input> [-o out.svg] [--scenario ID]
 *
 * Figure kinds and the artifact each consumes:
 *   frequency_trace        traces.csv
 *   phi_monotonicity       traces.csv
 *   zeta_trace             traces.csv
 *   interpolation_scatter  records.json
 *   margin_bars            checks.csv
 */

import { readFileSync, writeFileSync } from "node:fs";

import { parseCsv, SchemaError } from "./csv.js";
import {
  frequencyTrace,
  interpolationScatter,
  marginBars,
  phiMonotonicity,
  zetaTrace,
} from "./figures.js";
import { parseRecords } from "./records.js";

export const KINDS = [
  "frequency_trace",
  "phi_monotonicity",
  "zeta_trace",
  "interpolation_scatter",
  "margin_bars",
] as const;

export type Kind = (typeof KINDS)[number];

interface Args {
  kind: Kind;
  input: string;
  output: string;
  scenario?: string;
}

function usage(): string {
  return `usage: freqlab-plot <kind> <input> [-o out.svg] [--scenario ID]\nkinds: ${KINDS.join(", ")}`;
}

export function parseArgs(argv: string[]): Args {
  const positional: string[] = [];
  let output = "out.svg";
  let scenario: string | undefined;
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "-o" || arg === "--output") {
      output = argv[++i];
      if (output === undefined) throw new Error("missing value for -o");
    } else if (arg === "--scenario") {
      scenario = argv[++i];
      if (scenario === undefined) {
        throw new Error("missing value for --scenario");
      }
    } else if (arg === "-h" || arg === "--help") {
      throw new Error("help");
    } else if (arg.startsWith("-")) {
      throw new Error(`unknown option ${arg}`);
    } else {
      positional.push(arg);
    }
  }
  if (positional.length !== 2) {
    throw new Error("expected exactly <kind> and <input>");
  }
  const [kind, input] = positional;
  if (!(KINDS as readonly string[]).includes(kind)) {
    throw new Error(`unknown figure kind "${kind}"`);
  }
  return { kind: kind as Kind, input, output, scenario };
}

export function render(args: Args): string {
  const text = readFileSync(args.input, "utf8");
  switch (args.kind) {
    case "frequency_trace":
      return frequencyTrace(parseCsv(text));
    case "phi_monotonicity":
      return phiMonotonicity(parseCsv(text));
    case "zeta_trace":
      return zetaTrace(parseCsv(text));
    case "interpolation_scatter":
      return interpolationScatter(parseRecords(text));
    case "margin_bars":
      return marginBars(parseCsv(text), args.scenario);
  }
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error((err as Error).message);
    console.error(usage());
    return 2;
  }
  try {
    writeFileSync(args.output, render(args));
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
    } else {
      console.error((err as Error).message);
    }
    return 1;
  }
  console.log(`wrote ${args.output}`);
  return 0;
}
