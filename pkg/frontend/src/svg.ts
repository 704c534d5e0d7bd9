/** Deterministic SVG assembly: fixed canvas, fixed-precision coordinates,
 * no timestamps, so identical inputs yield identical bytes. */

import { Scale, ticks, tickLabel } from "./scale.js";

export const WIDTH = 720;
export const HEIGHT = 432;
export const MARGIN = { left: 64, right: 16, top: 28, bottom: 44 };

export const fmt = (v: number): string => {
  const s = v.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
};

const esc = (s: string): string =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

export function open(title: string): string[] {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
    `<text x="${WIDTH / 2}" y="18" text-anchor="middle" font-size="14">${esc(title)}</text>`,
  ];
}

export function close(parts: string[]): string {
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

export function polyline(
  xs: number[],
  ys: number[],
  color: string,
  width = 1.5,
): string {
  const pts = xs.map((x, i) => `${fmt(x)},${fmt(ys[i])}`).join(" ");
  return `<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="${width}"/>`;
}

export function circle(x: number, y: number, r: number, color: string): string {
  return `<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${r}" fill="${color}"/>`;
}

export function rect(
  x: number,
  y: number,
  w: number,
  h: number,
  color: string,
): string {
  return `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${color}"/>`;
}

export function text(
  x: number,
  y: number,
  s: string,
  opts: { anchor?: string; size?: number; color?: string } = {},
): string {
  const anchor = opts.anchor ?? "start";
  const size = opts.size ?? 11;
  const color = opts.color ?? "#333";
  return `<text x="${fmt(x)}" y="${fmt(y)}" text-anchor="${anchor}" font-size="${size}" fill="${color}">${esc(s)}</text>`;
}

/** Axes with ticks, labels, and a plot frame. */
export function axes(
  sx: Scale,
  sy: Scale,
  xlabel: string,
  ylabel: string,
): string[] {
  const parts: string[] = [];
  const x0 = sx.r0, x1 = sx.r1, y0 = sy.r0, y1 = sy.r1;
  parts.push(
    `<rect x="${fmt(x0)}" y="${fmt(y1)}" width="${fmt(x1 - x0)}" height="${fmt(y0 - y1)}" fill="none" stroke="#999"/>`,
  );
  for (const v of ticks(sx.lo, sx.hi)) {
    const x = sx.map(v);
    parts.push(`<line x1="${fmt(x)}" y1="${fmt(y0)}" x2="${fmt(x)}" y2="${fmt(y0 + 4)}" stroke="#999"/>`);
    parts.push(text(x, y0 + 16, tickLabel(v), { anchor: "middle", size: 10 }));
  }
  for (const v of ticks(sy.lo, sy.hi)) {
    const y = sy.map(v);
    parts.push(`<line x1="${fmt(x0 - 4)}" y1="${fmt(y)}" x2="${fmt(x0)}" y2="${fmt(y)}" stroke="#999"/>`);
    parts.push(text(x0 - 6, y + 3, tickLabel(v), { anchor: "end", size: 10 }));
  }
  parts.push(
    text((x0 + x1) / 2, HEIGHT - 8, xlabel, { anchor: "middle", size: 12 }),
  );
  parts.push(
    `<text x="14" y="${fmt((y0 + y1) / 2)}" text-anchor="middle" font-size="12" fill="#333" transform="rotate(-90 14 ${fmt((y0 + y1) / 2)})">${ylabel}</text>`,
  );
  return parts;
}

export function legend(
  entries: { label: string; color: string }[],
  x: number,
  y: number,
): string[] {
  const parts: string[] = [];
  entries.forEach((e, i) => {
    const yy = y + i * 16;
    parts.push(rect(x, yy - 8, 10, 10, e.color));
    parts.push(text(x + 14, yy + 1, e.label, { size: 10 }));
  });
  return parts;
}
