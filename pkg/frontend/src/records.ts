/** Typed access to records.json. */

import { SchemaError } from "./csv.js";

export interface CheckEntry {
  name: string;
  status: string;
  margin: number | null;
  fitted_constant: number | null;
  note?: string;
  extras?: Record<string, number | null>;
}

export interface RunRecord {
  scenario_id: string;
  label: string;
  tag: string;
  config_digest: string;
  params: Record<string, number | string>;
  checks: CheckEntry[];
  wall_time?: number;
}

export interface ResultsFile {
  records: RunRecord[];
  summary?: unknown;
}

export function parseRecords(text: string): ResultsFile {
  let data: unknown;
  try {
    data = JSON.parse(text);
  } catch (err) {
    throw new SchemaError(`records input is not valid JSON: ${err}`);
  }
  const obj = data as Record<string, unknown>;
  if (!obj || !Array.isArray(obj.records)) {
    throw new SchemaError('records input is missing key "records"');
  }
  for (const rec of obj.records as RunRecord[]) {
    for (const key of ["scenario_id", "checks"]) {
      if (!(key in rec)) {
        throw new SchemaError(`record is missing key "${key}"`);
      }
    }
  }
  return obj as unknown as ResultsFile;
}

export function findCheck(rec: RunRecord, name: string): CheckEntry | null {
  return rec.checks.find((c) => c.name === name) ?? null;
}
