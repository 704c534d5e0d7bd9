/** Minimal CSV reader for the result artifacts.
 *
 * The producer never emits commas or quotes inside cells, but quoted
 * cells are handled anyway so hand-edited files do not silently break.
 */

export class SchemaError extends Error {}

export type Row = Record<string, string>;

export interface Table {
  header: string[];
  rows: Row[];
}

function splitLine(line: string): string[] {
  const out: string[] = [];
  let cell = "";
  let quoted = false;
  for (let i = 0; i < line.length; i++) {
    const ch = line[i];
    if (quoted) {
      if (ch === '"' && line[i + 1] === '"') {
        cell += '"';
        i++;
      } else if (ch === '"') {
        quoted = false;
      } else {
        cell += ch;
      }
    } else if (ch === '"') {
      quoted = true;
    } else if (ch === ",") {
      out.push(cell);
      cell = "";
    } else {
      cell += ch;
    }
  }
  out.push(cell);
  return out;
}

export function parseCsv(text: string): Table {
  const lines = text.split("\n").map((l) => l.replace(/\r$/, ""));
  while (lines.length && lines[lines.length - 1] === "") lines.pop();
  if (!lines.length) throw new SchemaError("empty CSV input");
  const header = splitLine(lines[0]);
  const rows: Row[] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = splitLine(lines[i]);
    if (cells.length !== header.length) {
      throw new SchemaError(
        `row ${i + 1} has ${cells.length} cells, header has ${header.length}`,
      );
    }
    const row: Row = {};
    header.forEach((name, j) => (row[name] = cells[j]));
    rows.push(row);
  }
  return { header, rows };
}

/** Throw a SchemaError naming the first missing column. */
export function requireColumns(
  table: Table,
  needed: string[],
  what: string,
): void {
  for (const col of needed) {
    if (!table.header.includes(col)) {
      throw new SchemaError(`${what} is missing column "${col}"`);
    }
  }
}

/** Empty cell means undefined or non-finite on the producer side. */
export function num(row: Row, col: string): number | null {
  const cell = row[col];
  if (cell === undefined || cell === "") return null;
  const v = Number(cell);
  return Number.isFinite(v) ? v : null;
}
