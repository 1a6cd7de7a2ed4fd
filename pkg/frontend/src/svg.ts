/**
 * Minimal deterministic SVG plotting primitives: linear/log scales, axes,
 * polylines with gap support, scatter markers, and error bars. String
 * templating only, so identical inputs give byte-identical files.
 */

export interface Extent {
  min: number;
  max: number;
}

export interface Scale {
  (value: number): number;
  domain: Extent;
  range: Extent;
  log: boolean;
}

export function makeScale(domain: Extent, range: Extent, log = false): Scale {
  const lo = log ? Math.log10(domain.min) : domain.min;
  const hi = log ? Math.log10(domain.max) : domain.max;
  const span = hi - lo || 1;
  const fn = ((value: number) => {
    const v = log ? Math.log10(value) : value;
    return range.min + ((v - lo) / span) * (range.max - range.min);
  }) as Scale;
  fn.domain = domain;
  fn.range = range;
  fn.log = log;
  return fn;
}

export function extent(values: number[], padFraction = 0.06): Extent {
  const finite = values.filter((v) => Number.isFinite(v));
  if (finite.length === 0) return { min: 0, max: 1 };
  let min = Math.min(...finite);
  let max = Math.max(...finite);
  if (min === max) {
    min -= 0.5;
    max += 0.5;
  }
  const pad = (max - min) * padFraction;
  return { min: min - pad, max: max + pad };
}

const fmt = (v: number) => Number(v.toPrecision(6)).toString();

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
];

export interface Point {
  x: number;
  y: number | null; // null renders as a gap
  err?: number;
}

/** Polyline path with gaps wherever y is null. */
export function linePath(points: Point[], sx: Scale, sy: Scale): string {
  let d = "";
  let pen = false;
  for (const p of points) {
    if (p.y === null || !Number.isFinite(p.y)) {
      pen = false;
      continue;
    }
    d += `${pen ? "L" : "M"}${fmt(sx(p.x))},${fmt(sy(p.y))}`;
    pen = true;
  }
  return d;
}

export function seriesElement(
  points: Point[],
  sx: Scale,
  sy: Scale,
  color: string,
  opts: { markers?: boolean; errorBars?: boolean; cls?: string } = {}
): string {
  const parts: string[] = [];
  const path = linePath(points, sx, sy);
  if (path) {
    parts.push(
      `<path class="series ${opts.cls ?? ""}" d="${path}" fill="none" stroke="${color}" stroke-width="1.5"/>`
    );
  }
  for (const p of points) {
    if (p.y === null || !Number.isFinite(p.y)) continue;
    if (opts.errorBars && p.err && p.err > 0) {
      const x = fmt(sx(p.x));
      parts.push(
        `<line class="errbar" x1="${x}" x2="${x}" y1="${fmt(sy(p.y - p.err))}" y2="${fmt(sy(p.y + p.err))}" stroke="${color}" stroke-width="1"/>`
      );
    }
    if (opts.markers) {
      parts.push(
        `<circle class="marker ${opts.cls ?? ""}" cx="${fmt(sx(p.x))}" cy="${fmt(sy(p.y))}" r="2.5" fill="${color}"/>`
      );
    }
  }
  return parts.join("");
}

export interface PanelSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  xLog?: boolean;
  content: (sx: Scale, sy: Scale) => string;
  xExtent: Extent;
  yExtent: Extent;
}

const PANEL_W = 360;
const PANEL_H = 280;
const MARGIN = { left: 56, right: 14, top: 28, bottom: 42 };

function ticks(e: Extent, log: boolean): number[] {
  if (log) {
    const out: number[] = [];
    for (
      let p = Math.ceil(Math.log10(e.min));
      p <= Math.floor(Math.log10(e.max));
      p++
    ) {
      out.push(10 ** p);
    }
    return out.length >= 2 ? out : [e.min, e.max];
  }
  const span = e.max - e.min;
  const step = 10 ** Math.floor(Math.log10(span / 4));
  const mult = span / step > 8 ? 2 : 1;
  const out: number[] = [];
  for (
    let v = Math.ceil(e.min / (step * mult)) * step * mult;
    v <= e.max + 1e-12;
    v += step * mult
  ) {
    out.push(Number(v.toPrecision(10)));
  }
  return out;
}

function panel(spec: PanelSpec, ox: number, oy: number): string {
  const sx = makeScale(
    spec.xExtent,
    { min: ox + MARGIN.left, max: ox + PANEL_W - MARGIN.right },
    spec.xLog ?? false
  );
  const sy = makeScale(spec.yExtent, {
    min: oy + PANEL_H - MARGIN.bottom,
    max: oy + MARGIN.top,
  });
  const parts: string[] = [];
  parts.push(
    `<rect x="${ox + MARGIN.left}" y="${oy + MARGIN.top}" width="${PANEL_W - MARGIN.left - MARGIN.right}" height="${PANEL_H - MARGIN.top - MARGIN.bottom}" fill="none" stroke="#333" stroke-width="1"/>`
  );
  for (const t of ticks(spec.xExtent, spec.xLog ?? false)) {
    const x = fmt(sx(t));
    parts.push(
      `<line x1="${x}" x2="${x}" y1="${oy + PANEL_H - MARGIN.bottom}" y2="${oy + PANEL_H - MARGIN.bottom + 4}" stroke="#333"/>`,
      `<text x="${x}" y="${oy + PANEL_H - MARGIN.bottom + 16}" font-size="10" text-anchor="middle">${fmt(t)}</text>`
    );
  }
  for (const t of ticks(spec.yExtent, false)) {
    const y = fmt(sy(t));
    parts.push(
      `<line x1="${ox + MARGIN.left - 4}" x2="${ox + MARGIN.left}" y1="${y}" y2="${y}" stroke="#333"/>`,
      `<text x="${ox + MARGIN.left - 7}" y="${y}" font-size="10" text-anchor="end" dominant-baseline="middle">${fmt(t)}</text>`
    );
  }
  parts.push(
    `<text x="${ox + PANEL_W / 2}" y="${oy + 16}" font-size="12" text-anchor="middle" font-weight="bold">${spec.title}</text>`,
    `<text x="${ox + PANEL_W / 2}" y="${oy + PANEL_H - 8}" font-size="11" text-anchor="middle">${spec.xLabel}</text>`,
    `<text x="${ox + 14}" y="${oy + PANEL_H / 2}" font-size="11" text-anchor="middle" transform="rotate(-90 ${ox + 14} ${oy + PANEL_H / 2})">${spec.yLabel}</text>`,
    spec.content(sx, sy)
  );
  return parts.join("\n");
}

/** Assemble panels in a rows x cols grid into a complete SVG document. */
export function figure(panels: PanelSpec[], cols: number): string {
  const rows = Math.ceil(panels.length / cols);
  const width = cols * PANEL_W;
  const height = rows * PANEL_H;
  const body = panels
    .map((p, i) => panel(p, (i % cols) * PANEL_W, Math.floor(i / cols) * PANEL_H))
    .join("\n");
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">\n` +
    `<rect width="${width}" height="${height}" fill="white"/>\n${body}\n</svg>\n`
  );
}
