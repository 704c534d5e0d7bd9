/** Linear axis scales with 1-2-5 tick placement. */

export interface Scale {
  lo: number;
  hi: number;
  r0: number;
  r1: number;
  map(v: number): number;
}

export function linear(lo: number, hi: number, r0: number, r1: number): Scale {
  if (hi === lo) {
    // degenerate data extent: pad so the single value sits mid-range
    hi = lo + (Math.abs(lo) || 1) * 1e-6;
  }
  const k = (r1 - r0) / (hi - lo);
  return { lo, hi, r0, r1, map: (v) => r0 + (v - lo) * k };
}

export function ticks(lo: number, hi: number, count = 5): number[] {
  if (hi === lo) return [lo];
  const span = hi - lo;
  const raw = span / Math.max(count, 1);
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  const step = (norm >= 5 ? 10 : norm >= 2 ? 5 : norm >= 1 ? 2 : 1) * mag;
  const first = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = first; v <= hi + step * 1e-9; v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo)) return [0, 1];
  return [lo, hi];
}

/** Fixed-precision tick label, trimming trailing zeros. */
export function tickLabel(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1).replace("e+", "e");
  return String(parseFloat(v.toPrecision(6)));
}
