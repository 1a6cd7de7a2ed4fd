"""Stochastic unravelings of the master equation.

The quantum-jump version works on a sliding window of exactly L+1 Fock
states. Starting from the all-down spin state with zero photons, the
coherent evolution conserves the total excitation number, so between jumps
the reachable photon numbers given the spin content span at most L+1
consecutive values; pump and loss jumps move that window up and down.

Between jumps the effective Hamiltonian is constant, so the no-jump
evolution is propagated with cached matrix exponentials over dyadic
multiples of the fine step; jump times are located by bisection over those
cached propagators, which realizes the norm-threshold waiting-time
algorithm essentially exactly. Systems too large for dense exponentials
fall back to fixed-step RK4 integration.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .errors import DomainError, StepSizeError, WindowLeakError
from .hilbert import SpaceDescriptor, boson_operator, spin_operator
from .model import SystemParams, build_hxxz, build_htc

DENSE_PROPAGATOR_LIMIT = 3000
WINDOW_LEAK_TOL = 1e-10
WINDOW_DROP_TOL = 1e-12


@dataclass(frozen=True)
class Schedule:
    """Time grid of a single trajectory (all times in units of 1/J)."""

    dt: float
    t_burn: float
    t_total: float
    sample_every: float

    def __post_init__(self):
        if self.dt <= 0 or self.t_total <= 0 or self.sample_every <= 0:
            raise DomainError("dt, t_total, sample_every must be positive")
        if not 0 <= self.t_burn < self.t_total:
            raise DomainError("need 0 <= t_burn < t_total")


def default_schedule(params: SystemParams) -> Schedule:
    """Cavity-linewidth-based defaults; tune per study."""
    rate = max(params.J, abs(params.U), params.P, params.kappa, params.g)
    kappa = max(params.kappa, 1e-6)
    return Schedule(
        dt=0.05 / rate,
        t_burn=50.0 / kappa,
        t_total=550.0 / kappa,
        sample_every=1.0 / kappa,
    )


@dataclass
class TrajectoryState:
    amplitudes: np.ndarray
    fock_base: int
    n_excitations: int
    time: float
    seed: int
    norm: float


@dataclass(frozen=True)
class TrajectoryResult:
    """Time averages accumulated after burn-in for one trajectory."""

    averages: dict
    num_samples: int
    num_jumps: int
    max_window_leak: float
    final_state: TrajectoryState


@dataclass(frozen=True)
class EnsembleEstimate:
    observable_name: str
    mean: float
    standard_error: float
    num_trajectories: int
    burn_in: float
    total_time: float


class _WindowOperators:
    """Spin-space pieces and per-base cached evolution operators."""

    def __init__(self, params: SystemParams, fine_dt: float, max_level: int):
        self.params = params
        L = params.L
        self.L = L
        self.W = L + 1
        self.spin_dim = 2**L
        self.dim = self.spin_dim * self.W
        self.fine_dt = fine_dt
        self.max_level = max_level
        spin_desc = SpaceDescriptor(L, 1)
        self.h_spin = build_hxxz(params, spin_desc).data
        self.raise_ops = [
            spin_operator(spin_desc, i, "raise").data for i in range(1, L + 1)
        ]
        states = np.arange(self.spin_dim)
        downs = np.array([bin(s).count("1") for s in states])
        self.ups = L - downs
        self.ztot = (L - 2 * downs).astype(float)
        self.zsite = [
            np.where(states & (1 << (L - i)), -1.0, 1.0) for i in range(1, L + 1)
        ]
        # spin-down projector diagonal summed over sites = number of down spins
        self.down_count = downs.astype(float)
        self._heff: dict[int, object] = {}
        self._props: dict[tuple[int, int], np.ndarray] = {}
        self.dense = self.dim <= DENSE_PROPAGATOR_LIMIT

    def h_eff(self, base: int):
        if base not in self._heff:
            p = self.params
            i_w = sp.identity(self.W, dtype=complex, format="csr")
            i_s = sp.identity(self.spin_dim, dtype=complex, format="csr")
            amp = np.sqrt(base + np.arange(1, self.W)).astype(complex)
            a_loc = sp.diags(amp, 1, shape=(self.W, self.W), format="csr")
            n_loc = sp.diags(base + np.arange(self.W).astype(complex), 0, format="csr")
            h = sp.kron(self.h_spin, i_w, format="csr")
            for r in self.raise_ops:
                h = h + p.g * (sp.kron(r, a_loc) + sp.kron(r.conj().T, a_loc.conj().T))
            decay = p.P * sp.kron(sp.diags(self.down_count.astype(complex)), i_w) \
                + p.kappa * sp.kron(i_s, n_loc)
            heff = (h - 0.5j * decay).tocsr()
            self._heff[base] = heff.toarray() if self.dense else heff
        return self._heff[base]

    def propagator(self, base: int, level: int) -> np.ndarray:
        """exp(-i H_eff dt 2^level), dense path only.

        Negative levels give the dyadic fractions of a fine step used to
        pin down jump times inside a step.
        """
        key = (base, level)
        if key not in self._props:
            if level <= 0:
                self._props[key] = sla.expm(
                    -1j * self.h_eff(base) * (self.fine_dt * 2.0**level)
                )
            else:
                half = self.propagator(base, level - 1)
                self._props[key] = half @ half
        return self._props[key]

    def photon_values(self, base: int) -> np.ndarray:
        return np.tile(base + np.arange(self.W).astype(float), self.spin_dim)

    def window_leak(self, psi: np.ndarray, base: int, n_exc: int) -> float:
        """Relative weight off the excitation-consistent window slots."""
        pr = np.abs(psi.reshape(self.spin_dim, self.W)) ** 2
        total = pr.sum()
        if total <= 0:
            return 0.0
        local = n_exc - base - self.ups
        valid = (local >= 0) & (local < self.W)
        ok = pr[np.nonzero(valid)[0], local[valid]].sum()
        return float((total - ok) / total)


class _DenseAdvancer:
    """Exact dyadic-propagator advancer with norm-threshold bisection.

    When the squared norm crosses the waiting-time threshold inside a fine
    step, the crossing is refined to a dyadic fraction of that step
    (resolution dt / 2**REFINE_LEVELS) so jump times carry essentially no
    step-size bias. The caller completes the remainder of the interrupted
    step after applying the jump via ``finish_fraction``.
    """

    REFINE_LEVELS = 10

    def __init__(self, ops: _WindowOperators):
        self.ops = ops

    def advance(self, psi, base, nsteps, threshold):
        """Advance up to nsteps fine steps; stop at the first crossing of
        the norm threshold. Returns (psi, steps_done, crossed, frac_num):
        on a crossing, psi is the pre-jump state at the refined jump time,
        steps_done includes the interrupted step, and frac_num / 2**REFINE_LEVELS
        is the elapsed fraction of that step."""
        done = 0
        while nsteps > 0:
            level = min(nsteps.bit_length() - 1, self.ops.max_level)
            block = 1 << level
            out, used, crossed, frac = self._block(psi, base, level, threshold)
            psi = out
            done += used
            nsteps -= used
            if crossed:
                return psi, done, True, frac
            assert used == block
        return psi, done, False, 0

    def finish_fraction(self, psi, base, frac_num):
        """Evolve the post-jump state through the rest of the interrupted
        fine step so the trajectory returns to the step grid."""
        rem = (1 << self.REFINE_LEVELS) - frac_num
        for k in range(1, self.REFINE_LEVELS + 1):
            if rem & (1 << (self.REFINE_LEVELS - k)):
                psi = self.ops.propagator(base, -k) @ psi
        return psi

    def _block(self, psi, base, level, threshold):
        trial = self.ops.propagator(base, level) @ psi
        n2 = float(np.vdot(trial, trial).real)
        if n2 > threshold:
            return trial, 1 << level, False, 0
        if level == 0:
            if n2 < 1e-300:
                raise StepSizeError("norm underflow within a single fine step")
            cur = psi
            frac = 0
            for k in range(1, self.REFINE_LEVELS + 1):
                half = self.ops.propagator(base, -k) @ cur
                if float(np.vdot(half, half).real) > threshold:
                    cur = half
                    frac += 1 << (self.REFINE_LEVELS - k)
            return cur, 1, True, frac
        first, used, crossed, frac = self._block(psi, base, level - 1, threshold)
        if crossed:
            return first, used, True, frac
        second, used2, crossed2, frac2 = self._block(first, base, level - 1, threshold)
        return second, used + used2, crossed2, frac2


class _RK4Advancer:
    """Fixed-step RK4 fallback for systems too large for dense exponentials."""

    def __init__(self, ops: _WindowOperators):
        self.ops = ops

    def advance(self, psi, base, nsteps, threshold):
        h = self.ops.h_eff(base)
        dt = self.ops.fine_dt

        def deriv(v):
            return -1j * (h @ v)

        for step in range(1, nsteps + 1):
            k1 = deriv(psi)
            k2 = deriv(psi + 0.5 * dt * k1)
            k3 = deriv(psi + 0.5 * dt * k2)
            k4 = deriv(psi + dt * k3)
            psi = psi + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            n2 = float(np.vdot(psi, psi).real)
            if n2 < 1e-300:
                raise StepSizeError("norm underflow within a single RK4 step")
            if n2 <= threshold:
                # jump resolved only to the fine step on this path
                return psi, step, True, 1 << _DenseAdvancer.REFINE_LEVELS
        return psi, nsteps, False, 0

    def finish_fraction(self, psi, base, frac_num):
        return psi


class _Accumulator:
    def __init__(self, L: int, zz_pairs):
        self.sums: dict[str, float] = {
            "photon_number": 0.0,
            "photon_pair": 0.0,
            "total_magnetization": 0.0,
        }
        for i in range(1, L + 1):
            self.sums[f"z_site_{i}"] = 0.0
        self.zz_pairs = list(zz_pairs or [])
        for m, l in self.zz_pairs:
            self.sums[f"zz_raw_{m}_{l}"] = 0.0
        self.count = 0

    def add(self, pr_spin_local: np.ndarray, photon_vals: np.ndarray, ops):
        pr = pr_spin_local.reshape(-1)
        self.sums["photon_number"] += float(pr @ photon_vals)
        self.sums["photon_pair"] += float(pr @ (photon_vals * (photon_vals - 1.0)))
        spin_pr = pr_spin_local.sum(axis=1)
        self.sums["total_magnetization"] += float(spin_pr @ ops.ztot)
        for i in range(1, ops.L + 1):
            self.sums[f"z_site_{i}"] += float(spin_pr @ ops.zsite[i - 1])
        for m, l in self.zz_pairs:
            zz = ops.zsite[m - 1] * ops.zsite[l - 1]
            self.sums[f"zz_raw_{m}_{l}"] += float(spin_pr @ zz)
        self.count += 1

    def averages(self) -> dict:
        if self.count == 0:
            return {k: float("nan") for k in self.sums}
        return {k: v / self.count for k, v in self.sums.items()}


def _steps(schedule: Schedule, params: SystemParams) -> tuple[float, int, int, int, int]:
    """Quantize the schedule onto the fine step grid."""
    bound = 0.05 / max(
        params.J, abs(params.U), params.P, params.kappa, params.g * np.sqrt(params.L + 1)
    )
    fine = min(schedule.dt, bound)
    per_sample = max(1, round(schedule.sample_every / fine))
    total = max(per_sample, round(schedule.t_total / fine))
    burn = round(schedule.t_burn / fine)
    max_level = max(0, per_sample.bit_length() - 1)
    return fine, per_sample, total, burn, max_level


def run_jump_trajectory(
    params: SystemParams,
    seed: int,
    schedule: Schedule | None = None,
    zz_pairs=None,
    event_log_path: str | None = None,
) -> TrajectoryResult:
    """One quantum-jump trajectory from the all-down vacuum state."""
    schedule = schedule or default_schedule(params)
    fine, per_sample, total_steps, burn_steps, max_level = _steps(schedule, params)
    ops = _WindowOperators(params, fine, max_level)
    advancer = _DenseAdvancer(ops) if ops.dense else _RK4Advancer(ops)
    rng = np.random.Generator(np.random.Philox(key=seed))

    psi = np.zeros(ops.dim, dtype=complex)
    # all spins down = highest spin index, zero photons, window base 0
    psi[(ops.spin_dim - 1) * ops.W + 0] = 1.0
    base = 0
    n_exc = 0
    step = 0
    threshold = rng.random()
    acc = _Accumulator(params.L, zz_pairs)
    num_jumps = 0
    max_leak = 0.0
    events = []

    sample_points = range(max(burn_steps, per_sample), total_steps + 1, per_sample)
    next_samples = iter(sample_points)
    next_sample = next(next_samples, None)

    while step < total_steps:
        target = next_sample if next_sample is not None else total_steps
        psi, done, crossed, frac = advancer.advance(psi, base, target - step, threshold)
        step += done
        leak = ops.window_leak(psi, base, n_exc)
        max_leak = max(max_leak, leak)
        if leak > WINDOW_LEAK_TOL:
            raise WindowLeakError(
                f"window leakage {leak:.3e} at t={step * fine:.3f} exceeds "
                f"{WINDOW_LEAK_TOL}"
            )
        if crossed:
            psi, base, n_exc, channel = _apply_jump(psi, base, n_exc, ops, rng)
            psi = advancer.finish_fraction(psi, base, frac)
            num_jumps += 1
            threshold = rng.random()
            if event_log_path is not None:
                events.append((step * fine, channel))
            continue
        if next_sample is not None and step == next_sample:
            n2 = float(np.vdot(psi, psi).real)
            pr = (np.abs(psi.reshape(ops.spin_dim, ops.W)) ** 2) / n2
            acc.add(pr, ops.photon_values(base), ops)
            next_sample = next(next_samples, None)

    if event_log_path is not None:
        with open(event_log_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["time", "channel"])
            writer.writerows(events)

    norm = float(np.linalg.norm(psi))
    final = TrajectoryState(
        amplitudes=psi / norm,
        fock_base=base,
        n_excitations=n_exc,
        time=total_steps * fine,
        seed=seed,
        norm=1.0,
    )
    return TrajectoryResult(
        averages=acc.averages(),
        num_samples=acc.count,
        num_jumps=num_jumps,
        max_window_leak=max_leak,
        final_state=final,
    )


def _apply_jump(psi, base, n_exc, ops: _WindowOperators, rng):
    """Select and apply a jump channel; returns updated (psi, base, n_exc)."""
    p = ops.params
    grid = np.abs(psi.reshape(ops.spin_dim, ops.W)) ** 2
    spin_pr = grid.sum(axis=1)
    weights = []
    for i in range(ops.L):
        # sigma_i sigma_i^+ projects on spin i down
        down_mask = 0.5 * (1.0 - ops.zsite[i])
        weights.append(p.P * float(spin_pr @ down_mask))
    photon_vals = base + np.arange(ops.W).astype(float)
    weights.append(p.kappa * float((grid * photon_vals[None, :]).sum()))
    weights = np.array(weights)
    wsum = weights.sum()
    if wsum <= 0:
        raise StepSizeError("norm crossed threshold but all jump rates vanish")
    choice = rng.choice(len(weights), p=weights / wsum)

    mat = psi.reshape(ops.spin_dim, ops.W)
    if choice < ops.L:
        new = (ops.raise_ops[choice] @ mat)
        n_exc += 1
        new_base = max(0, n_exc - ops.L)
        if new_base > base:
            dropped = float((np.abs(new[:, 0]) ** 2).sum())
            if dropped >= WINDOW_DROP_TOL:
                raise WindowLeakError(
                    f"window shift would drop weight {dropped:.3e}"
                )
            shifted = np.zeros_like(new)
            shifted[:, :-1] = new[:, 1:]
            new = shifted
        base = new_base
        channel = f"pump_{choice + 1}"
    else:
        n_exc -= 1
        new_base = max(0, n_exc - ops.L)
        if new_base == base - 1:
            # photon loss and base decrement cancel: same local index
            new = mat * np.sqrt(base + np.arange(ops.W))[None, :]
        else:
            new = np.zeros_like(mat)
            new[:, :-1] = mat[:, 1:] * np.sqrt(np.arange(1, ops.W))[None, :]
        base = new_base
        channel = "loss"
    psi = new.reshape(-1)
    nn = np.linalg.norm(psi)
    if nn <= 0:
        raise StepSizeError("jump annihilated the state")
    return psi / nn, base, n_exc, channel


# ---------------------------------------------------------------------------
# diffusive (homodyne-type) unraveling on the full fixed-cutoff space
# ---------------------------------------------------------------------------


def run_diffusive_trajectory(
    params: SystemParams,
    seed: int,
    schedule: Schedule | None = None,
    zz_pairs=None,
    accumulate_state: bool = False,
) -> TrajectoryResult:
    """Homodyne diffusive unraveling at the fixed Fock cutoff of ``params``.

    Euler-Maruyama integration of the normalized stochastic equation with
    one Wiener increment per channel; the state is renormalized each step.
    """
    schedule = schedule or default_schedule(params)
    desc = params.descriptor()
    dim = desc.dim
    h = (build_hxxz(params) + build_htc(params)).data.toarray()
    channels = []
    for i in range(1, params.L + 1):
        channels.append(np.sqrt(params.P) * spin_operator(desc, i, "raise").data.toarray())
    channels.append(np.sqrt(params.kappa) * boson_operator(desc, "annihilate").data.toarray())

    bound = 0.05 / max(
        params.J, abs(params.U), params.P, params.kappa * params.n_max, params.g
    )
    dt = min(schedule.dt, bound)
    total_steps = max(1, round(schedule.t_total / dt))
    burn_steps = round(schedule.t_burn / dt)
    per_sample = max(1, round(schedule.sample_every / dt))

    rng = np.random.Generator(np.random.Philox(key=seed))
    psi = np.zeros(dim, dtype=complex)
    psi[(desc.spin_dim - 1) * desc.fock_dim] = 1.0

    L = params.L
    states = np.arange(desc.spin_dim)
    downs = np.array([bin(s).count("1") for s in states])
    ztot_diag = np.repeat((L - 2 * downs).astype(float), desc.fock_dim)
    zsite_diag = [
        np.repeat(np.where(states & (1 << (L - i)), -1.0, 1.0), desc.fock_dim)
        for i in range(1, L + 1)
    ]
    photon_diag = np.tile(np.arange(desc.fock_dim).astype(float), desc.spin_dim)

    acc = _Accumulator(L, zz_pairs)
    mean_state = np.zeros((dim, dim), dtype=complex) if accumulate_state else None
    mean_count = 0
    sqdt = np.sqrt(dt)

    for step in range(1, total_steps + 1):
        cpsis = [c @ psi for c in channels]
        drift = -1j * (h @ psi)
        noise = np.zeros(dim, dtype=complex)
        dws = rng.normal(0.0, sqdt, size=len(channels))
        for c, cpsi, dw in zip(channels, cpsis, dws):
            mexp = 2.0 * float(np.vdot(psi, cpsi).real)
            drift += (
                -0.5 * (c.conj().T @ cpsi)
                + 0.5 * mexp * cpsi
                - 0.125 * mexp**2 * psi
            )
            noise += (cpsi - 0.5 * mexp * psi) * dw
        psi = psi + drift * dt + noise
        nn = float(np.linalg.norm(psi))
        if nn < 1e-150:
            raise StepSizeError("diffusive norm underflow; reduce dt")
        psi = psi / nn
        if step >= max(burn_steps, 1) and step % per_sample == 0:
            pr = np.abs(psi) ** 2
            acc.sums["photon_number"] += float(pr @ photon_diag)
            acc.sums["photon_pair"] += float(pr @ (photon_diag * (photon_diag - 1.0)))
            acc.sums["total_magnetization"] += float(pr @ ztot_diag)
            for i in range(1, L + 1):
                acc.sums[f"z_site_{i}"] += float(pr @ zsite_diag[i - 1])
            for m, l in acc.zz_pairs:
                acc.sums[f"zz_raw_{m}_{l}"] += float(
                    pr @ (zsite_diag[m - 1] * zsite_diag[l - 1])
                )
            acc.count += 1
            if accumulate_state:
                mean_state += np.outer(psi, psi.conj())
                mean_count += 1

    averages = acc.averages()
    if accumulate_state and mean_count:
        averages["mean_state"] = mean_state / mean_count
    final = TrajectoryState(
        amplitudes=psi,
        fock_base=0,
        n_excitations=-1,
        time=total_steps * dt,
        seed=seed,
        norm=1.0,
    )
    return TrajectoryResult(
        averages=averages,
        num_samples=acc.count,
        num_jumps=0,
        max_window_leak=0.0,
        final_state=final,
    )


# ---------------------------------------------------------------------------
# ensembles
# ---------------------------------------------------------------------------


def _derived_observables(avg: dict, zz_pairs) -> dict:
    out = dict(avg)
    n = avg["photon_number"]
    out["g2_zero"] = avg["photon_pair"] / n**2 if n > 1e-12 else float("nan")
    for m, l in zz_pairs or []:
        denom = avg[f"z_site_{m}"] * avg[f"z_site_{l}"]
        raw = avg[f"zz_raw_{m}_{l}"]
        out[f"ozz_ratio_{m}_{l}"] = raw / denom if abs(denom) > 1e-9 else float("nan")
    return out


def _observable_functions(moment_names, zz_pairs) -> dict:
    """Each observable as a function of ensemble-averaged raw moments.

    Linear observables pass a moment through; ratio observables (g2,
    normalized ZZ) divide pooled moments, so their estimator is the ratio
    of ensemble means rather than the mean of per-trajectory ratios,
    whose O(1/T) bias is visible against exact results.
    """

    def moment(name):
        return lambda m: m[name]

    def g2(m):
        n = m["photon_number"]
        return m["photon_pair"] / n**2 if n > 1e-12 else float("nan")

    def ozz(i, j):
        def f(m):
            denom = m[f"z_site_{i}"] * m[f"z_site_{j}"]
            return (
                m[f"zz_raw_{i}_{j}"] / denom if abs(denom) > 1e-9 else float("nan")
            )

        return f

    funcs = {name: moment(name) for name in moment_names}
    funcs["g2_zero"] = g2
    for i, j in zz_pairs or []:
        funcs[f"ozz_ratio_{i}_{j}"] = ozz(i, j)
    return funcs


def estimate_ensemble(
    params: SystemParams,
    num_trajectories: int,
    base_seed: int,
    schedule: Schedule | None = None,
    method: str = "jump",
    zz_pairs=None,
) -> dict[str, EnsembleEstimate]:
    """Mean and standard error of each observable across trajectories.

    Estimates are jackknifed over trajectory-level time averages: leaving
    out one trajectory at a time gives both a bias-corrected mean and a
    standard error, and for plain moments this reduces to the ordinary
    sample mean and its standard error. Deterministic for fixed
    (base_seed, schedule).
    """
    if num_trajectories < 2:
        raise DomainError("need at least 2 trajectories for a standard error")
    schedule = schedule or default_schedule(params)
    runner = {"jump": run_jump_trajectory, "diffusive": run_diffusive_trajectory}.get(
        method
    )
    if runner is None:
        raise DomainError(f"unknown trajectory method {method!r}")
    per_traj: list[dict] = []
    for k in range(num_trajectories):
        try:
            res = runner(params, seed=base_seed + k, schedule=schedule, zz_pairs=zz_pairs)
        except Exception as exc:
            raise type(exc)(f"trajectory {k} (seed {base_seed + k}): {exc}") from exc
        per_traj.append(res.averages)
    moment_names = [
        k for k in per_traj[0] if not isinstance(per_traj[0][k], np.ndarray)
    ]
    moments = np.array(
        [[t[name] for name in moment_names] for t in per_traj], dtype=float
    )
    totals = moments.sum(axis=0)
    n_traj = moments.shape[0]
    estimates: dict[str, EnsembleEstimate] = {}
    for name, func in _observable_functions(moment_names, zz_pairs).items():
        pooled = func(dict(zip(moment_names, totals / n_traj)))
        loo = np.array(
            [
                func(dict(zip(moment_names, (totals - row) / (n_traj - 1))))
                for row in moments
            ]
        )
        finite = loo[np.isfinite(loo)]
        if finite.size < 2 or not np.isfinite(pooled):
            mean, se = float("nan"), float("nan")
        else:
            mean = float(n_traj * pooled - (n_traj - 1) * np.mean(finite))
            se = float(
                np.sqrt((finite.size - 1) / finite.size * np.sum((finite - np.mean(finite)) ** 2))
            )
        estimates[name] = EnsembleEstimate(
            observable_name=name,
            mean=mean,
            standard_error=se,
            num_trajectories=num_trajectories,
            burn_in=schedule.t_burn,
            total_time=schedule.t_total,
        )
    return estimates
