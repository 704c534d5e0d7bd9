export { num, parseCsv, requireColumns, SchemaError } from "./csv.js";
export type { Row, Table } from "./csv.js";
export { findCheck, parseRecords } from "./records.js";
export type { CheckEntry, ResultsFile, RunRecord } from "./records.js";
export { extent, linear, tickLabel, ticks } from "./scale.js";
export {
  frequencyTrace,
  interpolationScatter,
  marginBars,
  PALETTE,
  phiMonotonicity,
  zetaTrace,
} from "./figures.js";
export { KINDS, main, parseArgs, render } from "./cli.js";
