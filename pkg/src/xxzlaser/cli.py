"""Command-line front end: single solves, parameter sweeps, trajectory
ensembles, spectral decompositions, correlations and cooperativities,
emitting the CSV tables behind every figure.

Usage:
    simulate --config run.json [--out data.csv] [--jobs N]
    simulate --preset fig3 [--quick] [--out data.csv] [--seed N]
    simulate --list-presets
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import observables as obs
from .errors import BudgetExceededError, ConfigError, SimulationError
from .io import SweepRow, SweepTable, write_sidecar, write_sweep_table
from .model import SystemParams
from .ness import DensityMatrix, adaptive_cutoff_ness, solve_ness_auto
from .presets import build_preset, list_presets
from .trajectories import Schedule, estimate_ensemble

MODES = ("ness", "trajectory", "sweep", "spectrum", "correlations", "cooperativity")


@dataclass
class RunConfig:
    mode: str
    params: SystemParams
    sweep_axis: dict | None
    curve_axis: dict | None
    ensemble: dict | None
    adaptive_cutoff: bool
    correlations: object
    output_path: str | None
    raw: dict


def parse_config(cfg: dict) -> RunConfig:
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    if cfg.get("schema_version") != 1:
        raise ConfigError("config field 'schema_version' must be 1")
    mode = cfg.get("mode")
    if mode not in MODES:
        raise ConfigError(f"config field 'mode' must be one of {MODES}, got {mode!r}")
    p = cfg.get("params")
    if not isinstance(p, dict) or "L" not in p:
        raise ConfigError("config field 'params' must be an object with at least 'L'")
    try:
        params = SystemParams(**{k: v for k, v in p.items() if k != "quick"})
    except (TypeError, SimulationError) as exc:
        raise ConfigError(f"config field 'params' invalid: {exc}") from exc
    for axis_name in ("sweep_axis", "curve_axis"):
        axis = cfg.get(axis_name)
        if axis is not None:
            if axis.get("name") not in ("P", "U", "L"):
                raise ConfigError(f"{axis_name}.name must be one of P, U, L")
            vals = axis.get("values")
            if not vals or not all(np.isfinite(v) for v in vals):
                raise ConfigError(f"{axis_name}.values must be nonempty and finite")
    if mode == "trajectory" and not cfg.get("ensemble"):
        raise ConfigError("trajectory mode requires config field 'ensemble'")
    return RunConfig(
        mode=mode,
        params=params,
        sweep_axis=cfg.get("sweep_axis"),
        curve_axis=cfg.get("curve_axis"),
        ensemble=cfg.get("ensemble"),
        adaptive_cutoff=bool(cfg.get("adaptive_cutoff", True)),
        correlations=cfg.get("correlations", True),
        output_path=cfg.get("output_path"),
        raw=cfg,
    )


def _apply_axis(params: SystemParams, name: str, value) -> SystemParams:
    if name == "P":
        return replace(params, P=float(value))
    if name == "U":
        return replace(params, U=float(value))
    if name == "L":
        return replace(params, L=int(value))
    raise ConfigError(f"unknown axis {name!r}")


def _grid(config: RunConfig) -> list[SystemParams]:
    points = [config.params]
    if config.curve_axis:
        name, values = config.curve_axis["name"], sorted(config.curve_axis["values"])
        points = [_apply_axis(p, name, v) for v in values for p in points]
    if config.sweep_axis:
        name, values = config.sweep_axis["name"], sorted(config.sweep_axis["values"])
        points = [_apply_axis(p, name, v) for p in points for v in values]
    return points


def _solve(params: SystemParams, adaptive: bool):
    if adaptive:
        res = adaptive_cutoff_ness(params)
        return res.rho, res.diagnostics, res.chosen_n_max
    rho, diag = solve_ness_auto(params)
    return rho, diag, params.n_max


def _base_row(params: SystemParams, n_max: int, method: str, **kw) -> SweepRow:
    return SweepRow(
        L=params.L,
        U_over_J=params.U / params.J,
        P_over_J=params.P / params.J,
        g_over_J=params.g / params.J,
        kappa_over_J=params.kappa / params.J,
        n_max=n_max,
        method=method,
        **kw,
    )


def _scalar_rows(params: SystemParams, n_max: int, rho: DensityMatrix) -> list[SweepRow]:
    rows = []
    n = obs.photon_number(rho)
    rows.append(_base_row(params, n_max, "exact", observable="photon_number", value=n))
    if n > 1e-12:
        rows.append(
            _base_row(params, n_max, "exact", observable="g2_zero", value=obs.g2_zero(rho))
        )
    else:
        rows.append(
            _base_row(
                params, n_max, "exact", observable="g2_zero", value=None, undefined=True
            )
        )
    zt = obs.total_magnetization(rho)
    rows.append(
        _base_row(params, n_max, "exact", observable="total_magnetization", value=zt)
    )
    rows.append(
        _base_row(
            params,
            n_max,
            "exact",
            observable="magnetization_per_spin",
            value=zt / params.L,
        )
    )
    return rows


def _default_pairs(L: int, distance: bool) -> list[tuple[int, int]]:
    m = max(1, L // 2)
    if distance:
        return [(m, m + l) for l in range(1, L - m + 1)]
    return [(m, l) for l in (m + 1, m + 2) if l <= L]


def _spectrum_rows(params: SystemParams, n_max: int, rho: DensityMatrix) -> list[SweepRow]:
    spin_rho = obs.partial_trace_cavity(rho)
    basis = obs.diagonalize_xxz(params)
    records = obs.spectral_decomposition(spin_rho, basis)
    bright = obs.bright_states(params.L)
    rows = []
    for rec in records:
        vec = basis.vectors[:, rec.eigen_index]
        is_bright = any(
            abs(np.dot(b.amplitudes, vec)) ** 2 >= 0.999 for b in bright
        )
        rows.append(
            _base_row(
                params,
                n_max,
                "exact",
                observable="eigenstate_probability",
                value=rec.probability,
                eigen_index=rec.eigen_index,
                energy_over_J=rec.energy / params.J,
                magnetization=float(rec.magnetization),
                is_bright=is_bright,
                is_top3=rec.is_top3,
            )
        )
    return rows


def _correlation_rows(
    params: SystemParams, n_max: int, rho: DensityMatrix, pairs
) -> list[SweepRow]:
    rows = []
    for m, l in pairs:
        zz = obs.zz_correlation(rho, m, l)
        rows.append(
            _base_row(
                params,
                n_max,
                "exact",
                observable="zz_raw",
                value=zz.raw,
                site_m=m,
                site_l=l,
            )
        )
        rows.append(
            _base_row(
                params,
                n_max,
                "exact",
                observable="ozz_ratio",
                value=zz.ratio,
                site_m=m,
                site_l=l,
                undefined=zz.undefined,
            )
        )
    return rows


_SINGLE_CACHE: dict[tuple, float] = {}


def _single_emitter_photons(params: SystemParams) -> float:
    key = (params.P, params.g, params.kappa, params.J)
    if key not in _SINGLE_CACHE:
        single = replace(params, L=1, n_max=max(4, params.n_max))
        res = adaptive_cutoff_ness(single)
        _SINGLE_CACHE[key] = obs.photon_number(res.rho)
    return _SINGLE_CACHE[key]


def _cooperativity_rows(params: SystemParams, adaptive: bool) -> tuple[list[SweepRow], dict]:
    rho, diag, n_max = _solve(params, adaptive)
    n_many = obs.photon_number(rho)
    free, diag_free, n_max_free = _solve(replace(params, xxz_enabled=False), adaptive)
    n_free = obs.photon_number(free)
    n_single = _single_emitter_photons(params)
    rows = [
        _base_row(params, n_max, "exact", observable="photon_number", value=n_many),
        _base_row(
            params,
            n_max,
            "exact",
            observable="cooperativity_fraction",
            value=obs.cooperativity_fraction(n_many, n_single, params.L),
        ),
        _base_row(
            params,
            n_max,
            "exact",
            observable="cooperativity_xxz",
            value=obs.cooperativity_xxz(n_many, n_free),
        ),
    ]
    return rows, {"diagnostics": diag, "free_diagnostics": diag_free}


def _trajectory_rows(params: SystemParams, config: RunConfig, seed_override) -> list[SweepRow]:
    ens = config.ensemble
    method = ens.get("method", "jump")
    sched = Schedule(**ens["schedule"]) if "schedule" in ens else None
    base_seed = int(seed_override if seed_override is not None else ens.get("base_seed", 0))
    pairs = None
    if config.correlations:
        pairs = _default_pairs(params.L, config.correlations == "distance")
    estimates = estimate_ensemble(
        params,
        num_trajectories=int(ens["num_trajectories"]),
        base_seed=base_seed,
        schedule=sched,
        method=method,
        zz_pairs=pairs,
    )
    wanted = {"photon_number", "g2_zero", "total_magnetization"}
    rows = []
    for est in estimates.values():
        name = est.observable_name
        if name in wanted:
            rows.append(
                _base_row(
                    params,
                    params.n_max,
                    method,
                    observable=name,
                    value=est.mean if np.isfinite(est.mean) else None,
                    standard_error=est.standard_error if np.isfinite(est.standard_error) else 0.0,
                    undefined=not np.isfinite(est.mean),
                )
            )
        elif name.startswith("ozz_ratio_") or name.startswith("zz_raw_"):
            kind, m, l = name.rsplit("_", 2)
            rows.append(
                _base_row(
                    params,
                    params.n_max,
                    method,
                    observable=kind,
                    value=est.mean if np.isfinite(est.mean) else None,
                    standard_error=est.standard_error if np.isfinite(est.standard_error) else 0.0,
                    site_m=int(m),
                    site_l=int(l),
                    undefined=not np.isfinite(est.mean),
                )
            )
    return rows


def _run_point(args) -> tuple[list, dict]:
    params, config, seed_override = args
    info: dict = {"params": params.__dict__}
    if config.mode == "trajectory":
        return _trajectory_rows(params, config, seed_override), info
    if config.mode == "cooperativity":
        rows, diags = _cooperativity_rows(params, config.adaptive_cutoff)
        info.update(diags)
        return rows, info
    rho, diag, n_max = _solve(params, config.adaptive_cutoff)
    info["diagnostics"] = diag
    if config.mode in ("ness", "sweep"):
        return _scalar_rows(params, n_max, rho), info
    if config.mode == "spectrum":
        return _spectrum_rows(params, n_max, rho), info
    if config.mode == "correlations":
        pairs = _default_pairs(params.L, config.correlations == "distance")
        return _correlation_rows(params, n_max, rho, pairs), info
    raise ConfigError(f"unhandled mode {config.mode!r}")


def run(config: RunConfig, out_path: str, jobs: int = 1, seed_override=None) -> SweepTable:
    """Execute a run config, write the CSV table and metadata sidecar."""
    points = _grid(config)
    tasks = [(p, config, seed_override) for p in points]
    table = SweepTable()
    failures = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_point, tasks))
        for point, result in zip(points, results):
            table.rows.extend(result[0])
            table.diagnostics.append(result[1])
    else:
        for point, task in zip(points, tasks):
            try:
                rows, info = _run_point(task)
            except SimulationError as exc:
                failures.append({"params": point.__dict__, "error": str(exc)})
                print(f"FAILED {point}: {exc}", file=sys.stderr)
                continue
            table.rows.extend(rows)
            table.diagnostics.append(info)
            print(
                f"done L={point.L} U/J={point.U / point.J:g} P/J={point.P / point.J:g}"
                f" ({len(rows)} rows)"
            )
    write_sweep_table(out_path, table, config.raw)
    write_sidecar(out_path, config.raw, table, extra={"failures": failures})
    if failures:
        raise SimulationError(
            f"{len(failures)} grid point(s) failed; completed rows and a failure "
            f"manifest were written to {out_path}(.meta.json)"
        )
    return table


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="simulate", description=__doc__)
    src = ap.add_mutually_exclusive_group()
    src.add_argument("--config", help="path to a JSON run config")
    src.add_argument("--preset", help="name of a built-in figure preset")
    ap.add_argument("--list-presets", action="store_true")
    ap.add_argument("--out", help="output CSV path")
    ap.add_argument("--jobs", type=int, default=1, help="parallel grid workers")
    ap.add_argument("--seed", type=int, default=None, help="override ensemble base seed")
    ap.add_argument("--quick", action="store_true", help="smoke-test scale preset grids")
    args = ap.parse_args(argv)

    try:
        if args.list_presets:
            for name, desc in list_presets().items():
                print(f"{name:8s} {desc}")
            return 0
        if args.config:
            with open(args.config) as fh:
                try:
                    raw = json.load(fh)
                except json.JSONDecodeError as exc:
                    raise ConfigError(f"config is not valid JSON: {exc}") from exc
        elif args.preset:
            raw = build_preset(args.preset, quick=args.quick)
        else:
            ap.print_usage()
            raise ConfigError("one of --config, --preset, --list-presets is required")
        config = parse_config(raw)
        out = args.out or config.output_path or "sweep.csv"
        table = run(config, out, jobs=max(1, args.jobs), seed_override=args.seed)
        print(f"wrote {len(table.rows)} rows to {out}")
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except BudgetExceededError as exc:
        print(f"resource budget exceeded: {exc}", file=sys.stderr)
        return 4
    except SimulationError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
