/**
 * Preset figure builders: sweep CSV rows in, one SVG document out.
 *
 * Layouts mirror the simulation presets (photon-number sweeps, scaling
 * panels, cooperativities, spectral ladders, correlation structure).
 * Undefined rows (flagged in the CSV) become gaps; trajectory rows carry
 * error bars from their standard_error column; bright-state markers come
 * from the is_bright column, never recomputed here.
 */

import {
  EmptyInputError,
  SweepRecord,
  filterRows,
} from "./schema.js";
import {
  extent,
  figure,
  makeScale,
  PALETTE,
  PanelSpec,
  Point,
  Scale,
  seriesElement,
} from "./svg.js";

export type PresetName =
  | "fig2"
  | "fig3"
  | "fig4"
  | "fig5"
  | "fig6"
  | "fig7a"
  | "fig7b"
  | "fig7c";

export const PRESETS: PresetName[] = [
  "fig2",
  "fig3",
  "fig4",
  "fig5",
  "fig6",
  "fig7a",
  "fig7b",
  "fig7c",
];

interface Series {
  label: string;
  points: Point[];
}

function toPoint(r: SweepRecord, x: number): Point {
  return {
    x,
    y: r.undefined || r.value === null ? null : r.value,
    err: r.standard_error ?? 0,
  };
}

/** Group rows into one series per distinct curve key, sorted along x. */
function makeSeries(
  rows: SweepRecord[],
  curveKey: (r: SweepRecord) => number,
  xValue: (r: SweepRecord) => number,
  labelOf: (key: number) => string
): Series[] {
  const keys = [...new Set(rows.map(curveKey))].sort((a, b) => a - b);
  return keys.map((k) => {
    const pts = rows
      .filter((r) => curveKey(r) === k)
      .map((r) => toPoint(r, xValue(r)))
      .sort((a, b) => a.x - b.x);
    return { label: labelOf(k), points: pts };
  });
}

function yExtentOf(series: Series[]): { min: number; max: number } {
  const values = series.flatMap((s) =>
    s.points.flatMap((p) =>
      p.y === null ? [] : [p.y - (p.err ?? 0), p.y + (p.err ?? 0)]
    )
  );
  return extent(values);
}

function xExtentOf(series: Series[]): { min: number; max: number } {
  return extent(
    series.flatMap((s) => s.points.map((p) => p.x)),
    0.02
  );
}

function seriesPanel(
  title: string,
  xLabel: string,
  yLabel: string,
  series: Series[],
  opts: { xLog?: boolean; markers?: boolean; errorBars?: boolean } = {}
): PanelSpec {
  if (series.every((s) => s.points.length === 0)) {
    throw new EmptyInputError(`no data for panel '${title}'`);
  }
  const xE = xExtentOf(series);
  const yE = yExtentOf(series);
  return {
    title,
    xLabel,
    yLabel,
    xLog: opts.xLog,
    xExtent: xE,
    yExtent: yE,
    content: (sx, sy) => {
      const parts = series.map((s, i) =>
        seriesElement(s.points, sx, sy, PALETTE[i % PALETTE.length], {
          markers: opts.markers,
          errorBars: opts.errorBars,
        })
      );
      // simple legend in the top-right corner of the panel
      series.forEach((s, i) => {
        const x = sx.range.max - 86;
        const y = sy.range.max + 14 + 13 * i;
        parts.push(
          `<line x1="${x}" x2="${x + 16}" y1="${y}" y2="${y}" stroke="${PALETTE[i % PALETTE.length]}" stroke-width="2"/>` +
            `<text x="${x + 20}" y="${y + 3.5}" font-size="10">${s.label}</text>`
        );
      });
      return parts.join("");
    },
  };
}

function scalarPanel(
  rows: SweepRecord[],
  observable: string,
  title: string,
  xCol: "U_over_J" | "P_over_J",
  xLabel: string,
  yLabel: string,
  opts: { xLog?: boolean; errorBars?: boolean } = {}
): PanelSpec {
  const sel = filterRows(rows, { observable });
  const curveByL = new Set(sel.map((r) => r.L)).size > 1;
  const curveByU =
    !curveByL && xCol === "P_over_J" && new Set(sel.map((r) => r.U_over_J)).size > 1;
  const series = makeSeries(
    sel,
    curveByL ? (r) => r.L : curveByU ? (r) => r.U_over_J : () => 0,
    (r) => r[xCol],
    curveByL
      ? (k) => `L=${k}`
      : curveByU
        ? (k) => `U/J=${k}`
        : () => observable
  );
  return seriesPanel(title, xLabel, yLabel, series, opts);
}

function spectrumPanels(rows: SweepRecord[]): PanelSpec[] {
  const sel = filterRows(rows, { observable: "eigenstate_probability" });
  if (sel.length === 0) {
    throw new EmptyInputError("no eigenstate_probability rows in input");
  }
  // panel 1: probability stems per eigenstate index
  const stems: PanelSpec = {
    title: "NESS eigenstate probabilities",
    xLabel: "eigenstate index",
    yLabel: "probability",
    xExtent: extent(
      sel.map((r) => r.eigen_index ?? 0),
      0.04
    ),
    yExtent: { min: 0, max: Math.max(...sel.map((r) => r.value ?? 0)) * 1.1 || 1 },
    content: (sx: Scale, sy: Scale) => {
      const zero = sy(0);
      return sel
        .map((r) => {
          const x = sx(r.eigen_index ?? 0);
          const y = sy(r.value ?? 0);
          const color = r.is_top3 ? "#d62728" : "#1f77b4";
          return (
            `<line x1="${x}" x2="${x}" y1="${zero}" y2="${y}" stroke="${color}" stroke-width="1.5"/>` +
            `<circle cx="${x}" cy="${y}" r="2.5" fill="${color}"${r.is_top3 ? ' class="top3"' : ""}/>`
          );
        })
        .join("");
    },
  };
  // panel 2: energy vs magnetization ladder, bright states highlighted
  const ladder: PanelSpec = {
    title: "Spectrum (bright states highlighted)",
    xLabel: "Z_T",
    yLabel: "E / J",
    xExtent: extent(
      sel.map((r) => r.magnetization ?? 0),
      0.1
    ),
    yExtent: extent(sel.map((r) => r.energy_over_J ?? 0)),
    content: (sx: Scale, sy: Scale) =>
      sel
        .map((r) => {
          const x = sx(r.magnetization ?? 0);
          const y = sy(r.energy_over_J ?? 0);
          return r.is_bright
            ? `<circle class="bright" cx="${x}" cy="${y}" r="5" fill="none" stroke="#d62728" stroke-width="2"/>` +
                `<circle cx="${x}" cy="${y}" r="2" fill="#d62728"/>`
            : `<circle cx="${x}" cy="${y}" r="2" fill="#1f77b4"/>`;
        })
        .join(""),
  };
  return [stems, ladder];
}

function correlationPanel(
  rows: SweepRecord[],
  title: string,
  errorBars: boolean
): PanelSpec {
  const sel = filterRows(rows, { observable: "ozz_ratio" });
  if (sel.length === 0) {
    throw new EmptyInputError("no ozz_ratio rows in input");
  }
  const sweepsU = new Set(sel.map((r) => r.U_over_J)).size > 1;
  const series = makeSeries(
    sel,
    (r) => (r.site_l ?? 0) - (r.site_m ?? 0),
    sweepsU ? (r) => r.U_over_J : (r) => r.L,
    (k) => `|m-l|=${k}`
  );
  return seriesPanel(
    title,
    sweepsU ? "U / J" : "L",
    "O_ZZ",
    series,
    { markers: true, errorBars }
  );
}

export function buildFigure(preset: PresetName, rows: SweepRecord[]): string {
  switch (preset) {
    case "fig2":
      return figure(
        [
          scalarPanel(rows, "photon_number", "Cavity photon number", "P_over_J",
            "P / J", "<n>", { xLog: true }),
          scalarPanel(rows, "g2_zero", "Second-order correlation", "P_over_J",
            "P / J", "g2(0)", { xLog: true }),
          scalarPanel(rows, "total_magnetization", "Population clamping",
            "P_over_J", "P / J", "Z_T", { xLog: true }),
        ],
        2
      );
    case "fig3":
      return figure(
        [
          scalarPanel(rows, "photon_number", "Photon number", "U_over_J",
            "U / J", "<n>"),
          scalarPanel(rows, "g2_zero", "g2(0)", "U_over_J", "U / J", "g2(0)"),
          scalarPanel(rows, "total_magnetization", "Total magnetization",
            "U_over_J", "U / J", "Z_T"),
          scalarPanel(rows, "magnetization_per_spin", "Magnetization per spin",
            "U_over_J", "U / J", "Z_T / L"),
        ],
        2
      );
    case "fig4":
      return figure(
        [
          scalarPanel(rows, "cooperativity_fraction", "Collective fraction",
            "U_over_J", "U / J", "C_f"),
          scalarPanel(rows, "cooperativity_xxz", "Interaction cooperativity",
            "U_over_J", "U / J", "C_XXZ"),
        ],
        2
      );
    case "fig5":
    case "fig6":
      return figure(spectrumPanels(rows), 2);
    case "fig7a":
      return figure([correlationPanel(rows, "ZZ correlation structure", false)], 1);
    case "fig7b":
      return figure(
        [correlationPanel(rows, "Correlations vs system size", true)],
        1
      );
    case "fig7c":
      return figure(
        [correlationPanel(rows, "Correlations vs distance (L=11)", true)],
        1
      );
  }
}
