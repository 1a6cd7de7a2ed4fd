import numpy as np
import pytest

from xxzlaser.errors import DomainError
from xxzlaser.model import SystemParams
from xxzlaser.ness import solve_ness_auto
from xxzlaser.observables import photon_number, total_magnetization
from xxzlaser.trajectories import (
    Schedule,
    default_schedule,
    estimate_ensemble,
    run_diffusive_trajectory,
    run_jump_trajectory,
)

QUICK = Schedule(dt=0.05, t_burn=50.0, t_total=250.0, sample_every=2.0)


def test_schedule_validation():
    with pytest.raises(DomainError):
        Schedule(dt=0.0, t_burn=1.0, t_total=10.0, sample_every=1.0)
    with pytest.raises(DomainError):
        Schedule(dt=0.1, t_burn=20.0, t_total=10.0, sample_every=1.0)
    s = default_schedule(SystemParams(L=2))
    assert 0 < s.dt <= 0.05
    assert s.t_burn < s.t_total


def test_trajectory_is_deterministic():
    p = SystemParams(L=2, U=1.0, n_max=8)
    a = run_jump_trajectory(p, seed=42, schedule=QUICK)
    b = run_jump_trajectory(p, seed=42, schedule=QUICK)
    assert a.averages == b.averages
    assert a.num_jumps == b.num_jumps
    assert np.array_equal(a.final_state.amplitudes, b.final_state.amplitudes)
    c = run_jump_trajectory(p, seed=43, schedule=QUICK)
    assert c.averages != a.averages


def test_dark_state_without_pump():
    p = SystemParams(L=3, U=1.0, P=0.0, n_max=4)
    res = run_jump_trajectory(p, seed=0, schedule=QUICK)
    assert res.num_jumps == 0
    assert res.averages["photon_number"] == 0.0
    assert res.averages["total_magnetization"] == -3.0


def test_window_width_and_leak():
    p = SystemParams(L=3, U=1.0, n_max=8)
    res = run_jump_trajectory(p, seed=5, schedule=QUICK)
    # state vector spans exactly 2^L * (L+1) amplitudes throughout
    assert res.final_state.amplitudes.size == 2**3 * 4
    assert res.max_window_leak <= 1e-10
    assert res.num_jumps > 0
    assert abs(np.linalg.norm(res.final_state.amplitudes) - 1.0) < 1e-12


def test_window_base_tracks_excitations():
    p = SystemParams(L=2, U=1.0, n_max=8)
    res = run_jump_trajectory(p, seed=9, schedule=QUICK)
    st = res.final_state
    assert st.fock_base == max(0, st.n_excitations - p.L)


def test_event_log_written(tmp_path):
    p = SystemParams(L=2, U=1.0, n_max=8)
    log = tmp_path / "events.csv"
    res = run_jump_trajectory(p, seed=1, schedule=QUICK, event_log_path=str(log))
    lines = log.read_text().strip().splitlines()
    assert lines[0] == "time,channel"
    assert len(lines) == res.num_jumps + 1
    channels = {line.split(",")[1] for line in lines[1:]}
    assert channels <= {"pump_1", "pump_2", "loss"}


def test_zz_pairs_accumulated():
    p = SystemParams(L=3, U=1.0, n_max=8)
    res = run_jump_trajectory(p, seed=2, schedule=QUICK, zz_pairs=[(1, 2), (1, 3)])
    assert "zz_raw_1_2" in res.averages
    assert -1.0 <= res.averages["zz_raw_1_2"] <= 1.0


def test_ensemble_requires_two_trajectories():
    with pytest.raises(DomainError):
        estimate_ensemble(SystemParams(L=2), num_trajectories=1, base_seed=0)
    with pytest.raises(DomainError):
        estimate_ensemble(
            SystemParams(L=2), num_trajectories=4, base_seed=0, method="exact"
        )


def test_ensemble_matches_exact_loosely():
    """Small ensemble agreement with the exact solver (5 sigma, quick)."""
    p = SystemParams(L=2, U=1.0, n_max=40)
    rho, _ = solve_ness_auto(p)
    sched = Schedule(dt=0.05, t_burn=250.0, t_total=1250.0, sample_every=5.0)
    est = estimate_ensemble(p, num_trajectories=16, base_seed=123, schedule=sched)
    for name, exact in (
        ("photon_number", photon_number(rho)),
        ("total_magnetization", total_magnetization(rho)),
    ):
        e = est[name]
        assert abs(e.mean - exact) < 5 * e.standard_error, (name, e, exact)


def test_diffusive_trajectory_runs():
    p = SystemParams(L=2, U=1.0, n_max=12)
    sched = Schedule(dt=0.005, t_burn=20.0, t_total=60.0, sample_every=1.0)
    res = run_diffusive_trajectory(p, seed=4, schedule=sched)
    assert res.averages["photon_number"] >= 0.0
    assert abs(np.linalg.norm(res.final_state.amplitudes) - 1.0) < 1e-10
    again = run_diffusive_trajectory(p, seed=4, schedule=sched)
    assert res.averages == again.averages


def test_diffusive_mean_state_option():
    p = SystemParams(L=2, U=1.0, P=0.2, n_max=6)
    sched = Schedule(dt=0.005, t_burn=10.0, t_total=40.0, sample_every=0.5)
    res = run_diffusive_trajectory(p, seed=8, schedule=sched, accumulate_state=True)
    mean_state = res.averages.get("mean_state")
    d = p.descriptor().dim
    assert mean_state is not None
    assert mean_state.shape == (d, d)
    assert abs(np.trace(mean_state) - 1.0) < 1e-10
    assert np.allclose(mean_state, mean_state.conj().T)


@pytest.mark.slow
def test_large_chain_trajectory_smoke():
    """A short run at the largest study size exercises the RK4 window path."""
    p = SystemParams(L=11, U=1.0, n_max=8)
    sched = Schedule(dt=0.05, t_burn=5.0, t_total=30.0, sample_every=1.0)
    res = run_jump_trajectory(p, seed=0, schedule=sched)
    assert res.max_window_leak <= 1e-8
    assert res.final_state.amplitudes.size == 2**11 * 12
