import { readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { num, parseCsv, requireColumns, SchemaError } from "../src/csv.js";
import { parseRecords } from "../src/records.js";

const FIX = join(__dirname, "fixtures");
const read = (name: string) => readFileSync(join(FIX, name), "utf8");

describe("parseCsv", () => {
  it("reads the checks artifact with the full schema", () => {
    const table = parseCsv(read("checks.csv"));
    expect(table.header).toEqual([
      "scenario_id",
      "check",
      "status",
      "margin",
      "fitted_constant",
      "grid",
      "dt",
      "M",
      "T",
      "lambda",
      "gamma",
    ]);
    // every scenario reports the complete registry
    const byScenario = new Map<string, number>();
    for (const row of table.rows) {
      byScenario.set(
        row.scenario_id,
        (byScenario.get(row.scenario_id) ?? 0) + 1,
      );
    }
    expect(byScenario.size).toBe(5);
    for (const count of byScenario.values()) expect(count).toBe(18);
  });

  it("reads the traces artifact", () => {
    const table = parseCsv(read("traces.csv"));
    expect(table.header).toContain("Phi");
    expect(table.rows.length).toBeGreaterThan(100);
    const t = num(table.rows[0], "time");
    expect(t).toBe(0);
  });

  it("handles quoted cells and embedded quotes", () => {
    const table = parseCsv('a,b\n"x,1","say ""hi"""\n');
    expect(table.rows[0]).toEqual({ a: "x,1", b: 'say "hi"' });
  });

  it("treats empty cells as null numbers", () => {
    const table = parseCsv("a,b\n1.5,\n");
    expect(num(table.rows[0], "a")).toBe(1.5);
    expect(num(table.rows[0], "b")).toBeNull();
  });

  it("rejects ragged rows", () => {
    expect(() => parseCsv("a,b\n1\n")).toThrow(SchemaError);
  });

  it("names the missing column", () => {
    const table = parseCsv("scenario_id,time\nx,0\n");
    expect(() => requireColumns(table, ["scenario_id", "N"], "traces input"))
      .toThrow('traces input is missing column "N"');
  });
});

describe("parseRecords", () => {
  it("reads the records artifact", () => {
    const results = parseRecords(read("records.json"));
    expect(results.records.length).toBe(5);
    const tags = new Set(results.records.map((r) => r.tag));
    expect(tags).toEqual(new Set(["single", "calibration", "holdout"]));
    for (const rec of results.records) {
      expect(rec.checks.length).toBe(18);
    }
  });

  it("rejects payloads without a records key", () => {
    expect(() => parseRecords("{}"))
      .toThrow('records input is missing key "records"');
    expect(() => parseRecords("not json")).toThrow(SchemaError);
  });
});
