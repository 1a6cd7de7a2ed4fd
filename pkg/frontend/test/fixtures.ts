/** Builders for synthetic sweep CSV text matching the simulator's format. */

export const COLUMNS = [
  "L",
  "U_over_J",
  "P_over_J",
  "g_over_J",
  "kappa_over_J",
  "n_max",
  "method",
  "observable",
  "value",
  "standard_error",
  "site_m",
  "site_l",
  "eigen_index",
  "energy_over_J",
  "magnetization",
  "is_bright",
  "is_top3",
  "undefined",
];

export const META_BLOCK = [
  "# schema_version: 1",
  "# config_hash: 0123456789abcdef",
  "# code_version: 0.1.0",
  "# units: all energies and rates in units of J",
].join("\n");

export interface RowInput {
  L?: number;
  U_over_J?: number;
  P_over_J?: number;
  observable: string;
  value?: number | "";
  standard_error?: number;
  site_m?: number;
  site_l?: number;
  eigen_index?: number;
  energy_over_J?: number;
  magnetization?: number;
  is_bright?: boolean;
  is_top3?: boolean;
  undefined?: boolean;
  method?: string;
}

export function csvRow(r: RowInput): string {
  const flag = (b?: boolean) => (b === undefined ? "" : b ? "1" : "0");
  return [
    r.L ?? 3,
    r.U_over_J ?? 1,
    r.P_over_J ?? 1,
    0.1,
    0.05,
    40,
    r.method ?? "exact",
    r.observable,
    r.value ?? "",
    r.standard_error ?? 0,
    r.site_m ?? "",
    r.site_l ?? "",
    r.eigen_index ?? "",
    r.energy_over_J ?? "",
    r.magnetization ?? "",
    flag(r.is_bright),
    flag(r.is_top3),
    r.undefined ? "1" : "0",
  ].join(",");
}

export function csvText(rows: RowInput[], header = COLUMNS.join(",")): string {
  return [META_BLOCK, header, ...rows.map(csvRow)].join("\n") + "\n";
}

/** A small fig6-style spectrum at L=3: 8 eigenstates, 4 bright. */
export function spectrumRows(L = 3): RowInput[] {
  const bright = new Set([0, 1, 4, 7]);
  return Array.from({ length: 8 }, (_, i) => ({
    L,
    observable: "eigenstate_probability",
    value: Number((0.3 - 0.03 * i).toFixed(4)),
    eigen_index: i,
    energy_over_J: bright.has(i) ? 2.0 : -1.0 + 0.2 * i,
    magnetization: 3 - 2 * (i % 4),
    is_bright: bright.has(i),
    is_top3: i < 3,
  }));
}
