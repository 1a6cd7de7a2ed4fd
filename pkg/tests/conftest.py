"""Shared helpers for the test suite.

The time-integration oracle lives here: it evolves the density matrix with
an off-the-shelf ODE solver acting on the straightforward matrix-valued
right-hand side, so it shares no code with the vectorized Liouvillian or
the bordered steady-state solve it is used to check.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp

from xxzlaser.model import SystemParams, apply_master_equation


def integrate_to_steady_state(
    params: SystemParams,
    rho0: np.ndarray | None = None,
    t_chunk: float = 400.0,
    tol: float = 1e-9,
    max_chunks: int = 80,
) -> np.ndarray:
    """Relax the master equation in time until the state stops moving.

    Chunked so convergence is detected from the actual state change rather
    than a guessed final time.
    """
    d = params.descriptor().dim
    if rho0 is None:
        rho0 = np.zeros((d, d), dtype=complex)
        rho0[-1, -1] = 1.0  # all spins down, zero photons
    rho = rho0.astype(complex)

    def rhs(_t, y):
        return apply_master_equation(params, y.reshape(d, d)).reshape(-1)

    for _ in range(max_chunks):
        sol = solve_ivp(
            rhs,
            (0.0, t_chunk),
            rho.reshape(-1),
            method="DOP853",
            rtol=1e-10,
            atol=1e-12,
        )
        if not sol.success:
            raise RuntimeError(f"oracle integration failed: {sol.message}")
        new = sol.y[:, -1].reshape(d, d)
        delta = float(np.max(np.abs(new - rho)))
        rho = new
        if delta < tol:
            # hermitize away integrator roundoff, keep the trace exact
            rho = 0.5 * (rho + rho.conj().T)
            return rho / np.trace(rho).real
    raise RuntimeError("oracle integration did not converge")


def dense_rho(rho) -> np.ndarray:
    """Dense ndarray view of a DensityMatrix, sparse or not."""
    m = rho.matrix
    return np.asarray(m.todense() if hasattr(m, "todense") else m, dtype=complex)
