/** The five figure builders. Each takes parsed artifact data and returns
 * a complete SVG document string. */

import { num, requireColumns, SchemaError, Table } from "./csv.js";
import { findCheck, ResultsFile } from "./records.js";
import { extent, linear } from "./scale.js";
import * as svg from "./svg.js";

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#e377c2",
  "#7f7f7f",
];

const STATUS_COLOR: Record<string, string> = {
  pass: "#2ca02c",
  fail: "#d62728",
  "not-applicable": "#9e9e9e",
  error: "#ff7f0e",
};

function area() {
  return {
    x0: svg.MARGIN.left,
    x1: svg.WIDTH - svg.MARGIN.right,
    y0: svg.HEIGHT - svg.MARGIN.bottom,
    y1: svg.MARGIN.top + 8,
  };
}

interface Series {
  id: string;
  t: number[];
  y: number[];
}

function traceSeries(table: Table, ycol: string): Series[] {
  requireColumns(table, ["scenario_id", "time", ycol], "traces input");
  const order: string[] = [];
  const byId = new Map<string, Series>();
  for (const row of table.rows) {
    const id = row.scenario_id;
    const t = num(row, "time");
    const y = num(row, ycol);
    if (t === null || y === null) continue;
    let s = byId.get(id);
    if (!s) {
      s = { id, t: [], y: [] };
      byId.set(id, s);
      order.push(id);
    }
    s.t.push(t);
    s.y.push(y);
  }
  if (!order.length) {
    throw new SchemaError(`traces input has no finite "${ycol}" values`);
  }
  return order.map((id) => byId.get(id)!);
}

function traceFigure(
  table: Table,
  ycol: string,
  title: string,
  ylabel: string,
): string {
  const series = traceSeries(table, ycol);
  const a = area();
  const [tlo, thi] = extent(series.flatMap((s) => s.t));
  const [ylo, yhi] = extent(series.flatMap((s) => s.y));
  const pad = (yhi - ylo || Math.abs(ylo) || 1) * 0.05;
  const sx = linear(tlo, thi, a.x0, a.x1);
  const sy = linear(ylo - pad, yhi + pad, a.y0, a.y1);

  const parts = svg.open(title);
  parts.push(...svg.axes(sx, sy, "t", ylabel));
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    parts.push(
      svg.polyline(s.t.map(sx.map), s.y.map(sy.map), color),
    );
  });
  parts.push(
    ...svg.legend(
      series.map((s, i) => ({
        label: s.id.slice(0, 34),
        color: PALETTE[i % PALETTE.length],
      })),
      a.x0 + 8,
      a.y1 + 14,
    ),
  );
  return svg.close(parts);
}

export function frequencyTrace(table: Table): string {
  return traceFigure(table, "N", "Weighted frequency N(t)", "N");
}

export function phiMonotonicity(table: Table): string {
  return traceFigure(table, "Phi", "Damped frequency Phi(t)", "Phi");
}

export function zetaTrace(table: Table): string {
  return traceFigure(table, "zeta", "Spectral ratio zeta(t)", "zeta");
}

const TAG_COLOR: Record<string, string> = {
  single: "#1f77b4",
  calibration: "#2ca02c",
  holdout: "#d62728",
};

export function interpolationScatter(results: ResultsFile): string {
  const pts: { x: number; y: number; tag: string }[] = [];
  for (const rec of results.records) {
    const c = findCheck(rec, "theorem_1_1");
    const lhs = c?.extras?.lhs;
    const obs = c?.extras?.obs;
    if (
      typeof lhs !== "number" || typeof obs !== "number" ||
      !(lhs > 0) || !(obs > 0)
    ) continue;
    pts.push({ x: Math.log10(obs), y: Math.log10(lhs), tag: rec.tag });
  }
  if (!pts.length) {
    throw new SchemaError(
      "records input has no interpolation data (theorem_1_1 extras)",
    );
  }
  const a = area();
  const [xlo, xhi] = extent(pts.map((p) => p.x));
  const [ylo, yhi] = extent(pts.map((p) => p.y));
  const px = (xhi - xlo || 1) * 0.08;
  const py = (yhi - ylo || 1) * 0.08;
  const sx = linear(xlo - px, xhi + px, a.x0, a.x1);
  const sy = linear(ylo - py, yhi + py, a.y0, a.y1);

  const parts = svg.open("Interpolation: target vs observation mass");
  parts.push(
    ...svg.axes(sx, sy, "log10 observation-ball mass", "log10 target mass"),
  );
  // equality guide over the shared extent
  const glo = Math.max(sx.lo, sy.lo);
  const ghi = Math.min(sx.hi, sy.hi);
  if (ghi > glo) {
    parts.push(
      `<line x1="${svg.fmt(sx.map(glo))}" y1="${svg.fmt(sy.map(glo))}" x2="${svg.fmt(sx.map(ghi))}" y2="${svg.fmt(sy.map(ghi))}" stroke="#bbb" stroke-dasharray="4 3"/>`,
    );
  }
  const tags: string[] = [];
  for (const p of pts) {
    if (!tags.includes(p.tag)) tags.push(p.tag);
    parts.push(
      svg.circle(sx.map(p.x), sy.map(p.y), 4, TAG_COLOR[p.tag] ?? "#7f7f7f"),
    );
  }
  parts.push(
    ...svg.legend(
      tags.map((t) => ({ label: t, color: TAG_COLOR[t] ?? "#7f7f7f" })),
      a.x0 + 8,
      a.y1 + 14,
    ),
  );
  return svg.close(parts);
}

/** Signed symlog width so machine-epsilon and log-space margins share
 * one picture. */
function symlog(m: number): number {
  return Math.sign(m) * Math.log10(1 + Math.abs(m) * 1e9);
}

export function marginBars(table: Table, scenario?: string): string {
  requireColumns(
    table,
    ["scenario_id", "check", "status", "margin"],
    "checks input",
  );
  const id = scenario ?? table.rows[0]?.scenario_id;
  const rows = table.rows.filter((r) => r.scenario_id === id);
  if (!rows.length) {
    throw new SchemaError(`checks input has no rows for scenario "${id}"`);
  }
  const a = area();
  const bars = rows.map((r) => ({
    check: r.check,
    status: r.status,
    raw: r.margin,
    w: (() => {
      const m = num(r, "margin");
      return m === null ? 0 : symlog(m);
    })(),
  }));
  const wmax = Math.max(...bars.map((b) => Math.abs(b.w)), 1e-9);
  const cx = (a.x0 + a.x1 + 150) / 2;
  const half = (a.x1 - a.x0 - 150) / 2;
  const rowH = (a.y0 - a.y1) / bars.length;

  const parts = svg.open(`Check margins: ${id}`);
  parts.push(
    `<line x1="${svg.fmt(cx)}" y1="${svg.fmt(a.y1)}" x2="${svg.fmt(cx)}" y2="${svg.fmt(a.y0)}" stroke="#999"/>`,
  );
  bars.forEach((b, i) => {
    const y = a.y1 + i * rowH;
    const w = (b.w / wmax) * half;
    const color = STATUS_COLOR[b.status] ?? "#7f7f7f";
    if (w >= 0) {
      parts.push(svg.rect(cx, y + 3, Math.max(w, 0.5), rowH - 6, color));
    } else {
      parts.push(svg.rect(cx + w, y + 3, -w, rowH - 6, color));
    }
    parts.push(
      svg.text(a.x0, y + rowH / 2 + 3, b.check, { size: 10 }),
    );
    const label = b.raw === "" ? b.status : Number(b.raw).toPrecision(3);
    parts.push(
      svg.text(a.x1 + 2, y + rowH / 2 + 3, label, {
        size: 9,
        anchor: "end",
        color: "#666",
      }),
    );
  });
  parts.push(
    svg.text(cx, svg.HEIGHT - 8, "signed symlog margin", {
      anchor: "middle",
      size: 12,
    }),
  );
  return svg.close(parts);
}
