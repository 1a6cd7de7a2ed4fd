"""CSV sweep tables and JSON metadata sidecars.

The data file is deterministic for a fixed config: a ``#``-prefixed
metadata block (schema version, config hash, code version), one header
row, then records. Timestamps and per-point diagnostics live in the
``<output>.meta.json`` sidecar so the data file stays byte-reproducible.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone

SCHEMA_VERSION = 1
CODE_VERSION = "0.1.0"

COLUMNS = [
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
]


@dataclass
class SweepRow:
    L: int
    U_over_J: float
    P_over_J: float
    g_over_J: float
    kappa_over_J: float
    n_max: int
    method: str  # exact | jump | diffusive
    observable: str
    value: float | None
    standard_error: float = 0.0
    site_m: int | None = None
    site_l: int | None = None
    eigen_index: int | None = None
    energy_over_J: float | None = None
    magnetization: float | None = None
    is_bright: bool | None = None
    is_top3: bool | None = None
    undefined: bool = False

    def as_record(self) -> list[str]:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, bool):
                return "1" if v else "0"
            if isinstance(v, float):
                return format(v, ".12g")
            return str(v)

        return [fmt(getattr(self, c)) for c in COLUMNS]


@dataclass
class SweepTable:
    rows: list[SweepRow] = field(default_factory=list)
    diagnostics: list[dict] = field(default_factory=list)


def config_hash(config: dict) -> str:
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def write_sweep_table(path: str, table: SweepTable, config: dict) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# schema_version: {SCHEMA_VERSION}\n")
        fh.write(f"# config_hash: {config_hash(config)}\n")
        fh.write(f"# code_version: {CODE_VERSION}\n")
        fh.write("# units: all energies and rates in units of J\n")
        writer = csv.writer(fh)
        writer.writerow(COLUMNS)
        for row in table.rows:
            writer.writerow(row.as_record())


def write_sidecar(path: str, config: dict, table: SweepTable, extra: dict | None = None) -> None:
    meta = {
        "schema_version": SCHEMA_VERSION,
        "code_version": CODE_VERSION,
        "config_hash": config_hash(config),
        "config": config,
        "written_at": datetime.now(timezone.utc).isoformat(),
        "num_rows": len(table.rows),
        "diagnostics": table.diagnostics,
    }
    if extra:
        meta.update(extra)
    with open(path + ".meta.json", "w") as fh:
        json.dump(meta, fh, indent=2, default=str)


def read_sweep_table(path: str) -> tuple[dict, list[dict]]:
    """Parse a data file back into (metadata, row dicts). CSV is the contract."""
    meta = {}
    rows = []
    with open(path) as fh:
        data_lines = []
        for line in fh:
            if line.startswith("#"):
                key, _, val = line[1:].partition(":")
                meta[key.strip()] = val.strip()
            else:
                data_lines.append(line)
        reader = csv.DictReader(data_lines)
        rows = list(reader)
    return meta, rows
