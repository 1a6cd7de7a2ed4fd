import { describe, expect, it } from "vitest";

import { buildFigure } from "../src/figures.js";
import { parseSweepTable } from "../src/schema.js";
import { csvText, spectrumRows } from "./fixtures.js";

function rowsOf(text: string) {
  return parseSweepTable(text).rows;
}

describe("buildFigure", () => {
  it("renders undefined O_ZZ rows as gaps, never zeros", () => {
    const rows = rowsOf(
      csvText([
        { observable: "ozz_ratio", U_over_J: 0.8, value: 1.4, site_m: 2, site_l: 3 },
        {
          observable: "ozz_ratio",
          U_over_J: 1.0,
          value: "",
          undefined: true,
          site_m: 2,
          site_l: 3,
        },
        { observable: "ozz_ratio", U_over_J: 1.2, value: 1.1, site_m: 2, site_l: 3 },
      ])
    );
    const svg = buildFigure("fig7a", rows);
    // a gap splits the polyline into two move commands and the undefined
    // point contributes no marker: 2 markers, 2 M segments, no zero point
    const path = svg.match(/class="series\s*" d="([^"]+)"/);
    expect(path).not.toBeNull();
    expect(path![1].match(/M/g)).toHaveLength(2);
    expect(path![1].match(/L/g)).toBeNull();
    expect(svg.match(/class="marker\s*"/g)).toHaveLength(2);
  });

  it("highlights exactly L+1 bright markers in fig6 output", () => {
    const L = 3;
    const svg = buildFigure("fig6", rowsOf(csvText(spectrumRows(L))));
    expect(svg.match(/class="bright"/g)).toHaveLength(L + 1);
    expect(svg.match(/class="top3"/g)).toHaveLength(3);
  });

  it("is deterministic for identical input", () => {
    const rows = rowsOf(csvText(spectrumRows()));
    expect(buildFigure("fig5", rows)).toBe(buildFigure("fig5", rows));
  });

  it("renders error bars for trajectory rows", () => {
    const rows = rowsOf(
      csvText([
        {
          observable: "ozz_ratio",
          L: 4,
          value: 1.2,
          standard_error: 0.1,
          site_m: 2,
          site_l: 3,
          method: "jump",
        },
        {
          observable: "ozz_ratio",
          L: 5,
          value: 1.3,
          standard_error: 0.2,
          site_m: 2,
          site_l: 3,
          method: "jump",
        },
      ])
    );
    const svg = buildFigure("fig7b", rows);
    expect(svg.match(/class="errbar"/g)).toHaveLength(2);
  });

  it("builds every line-plot preset from sweep scalars", () => {
    const scalars = ["photon_number", "g2_zero", "total_magnetization",
                     "magnetization_per_spin"];
    const rows = rowsOf(
      csvText(
        [0.5, 1.0, 2.0].flatMap((u) =>
          scalars.map((observable) => ({
            observable,
            U_over_J: u,
            P_over_J: u * 10,
            value: 1 + u,
          }))
        )
      )
    );
    for (const preset of ["fig2", "fig3"] as const) {
      const svg = buildFigure(preset, rows);
      expect(svg.startsWith("<svg")).toBe(true);
      expect(svg).toContain("</svg>");
    }
  });

  it("raises an explicit empty-input error when observables are missing", () => {
    const rows = rowsOf(csvText([{ observable: "photon_number", value: 2 }]));
    expect(() => buildFigure("fig6", rows)).toThrowError(/eigenstate_probability/);
  });
});
