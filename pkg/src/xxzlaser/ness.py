"""Exact non-equilibrium steady state via the trace-bordered linear system.

Two equivalent solve paths are provided:

* the full vectorized path, solving (L + b vec(I)^+) x = b on the complete
  d^2-dimensional space with b the first vectorized basis unit vector;
* a reduced path exploiting the weak U(1) symmetry of the model: every term
  of the Liouvillian shifts the total excitation number of bra and ket by
  the same amount, so the (unique) steady state lives in the block of
  density-matrix entries rho[r, c] with equal excitation number on both
  sides. This shrinks the linear system by roughly a factor fock_dim and is
  what makes chains up to L = 6 tractable on a small machine.

Both paths are cross-checked against each other in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (
    BudgetExceededError,
    ConvergenceError,
    DegenerateSteadyStateError,
    DomainError,
)
from .hilbert import SpaceDescriptor
from .model import (
    DEFAULT_MAX_VEC_DIM,
    LiouvillianMatrix,
    SystemParams,
    build_liouvillian,
    liouvillian_terms,
    unvectorize,
    vectorize,
)

RESIDUAL_FACTOR = 1e-9
EXPLORATION_RESIDUAL_FACTOR = 1e-6

# Full direct solves beyond this vectorized dimension switch to the reduced path.
FULL_SOLVE_MAX_VEC_DIM = 65_000
# Reduced direct factorizations beyond this dimension switch to time evolution.
REDUCED_DIRECT_MAX_DIM = 30_000
# The sector-ordered reduced Liouvillian is block tridiagonal with blocks of
# size m^2 for sector width m; sparse LU fill scales like dim * blockband.
# Cap the estimated fill so wide-sector systems go to the evolution path.
REDUCED_DIRECT_FILL_BUDGET = 60_000_000
# Hard cap for the matrix-free evolution path.
EVOLUTION_MAX_DIM = 5_000_000


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian trace-one matrix on a composite spin-cavity space.

    ``matrix`` is dense for the direct solve paths; the large-system
    evolution path stores the excitation-sector-block-diagonal steady state
    as a CSR sparse matrix instead (same observables API either way).
    """

    matrix: object  # np.ndarray or scipy.sparse.csr_matrix
    desc: SpaceDescriptor

    def __post_init__(self):
        if self.matrix.shape != (self.desc.dim, self.desc.dim):
            raise DomainError(
                f"matrix shape {self.matrix.shape} does not match descriptor "
                f"dim {self.desc.dim}"
            )

    @property
    def dim(self) -> int:
        return self.desc.dim

    @property
    def is_sparse(self) -> bool:
        return sp.issparse(self.matrix)

    def dense(self) -> np.ndarray:
        return self.matrix.toarray() if self.is_sparse else np.asarray(self.matrix)


@dataclass(frozen=True)
class NessDiagnostics:
    residual_norm: float | None
    trace_error: float
    min_eigenvalue: float
    top_fock_population: float
    hermiticity_defect: float

    def acceptable(self, tol: float = 1e-8) -> bool:
        return (
            self.trace_error <= tol
            and self.hermiticity_defect <= tol
            and self.min_eigenvalue >= -max(tol, 1e-8)
        )


def _excitation_numbers(desc: SpaceDescriptor) -> np.ndarray:
    """Total excitation number (up spins + photons) per composite basis index."""
    spins = np.arange(desc.spin_dim)
    # bit set = spin down in the fixed basis convention
    ups = desc.num_spins - np.array(
        [bin(s).count("1") for s in spins], dtype=np.int64
    )
    phot = np.arange(desc.fock_dim)
    return (ups[:, None] + phot[None, :]).reshape(-1)


class ReducedSpace:
    """Index bookkeeping for the equal-excitation block of vec(rho)."""

    def __init__(self, desc: SpaceDescriptor):
        self.desc = desc
        self.ntot = _excitation_numbers(desc)
        self.sectors: list[np.ndarray] = []
        for n in range(int(self.ntot.max()) + 1):
            idx = np.nonzero(self.ntot == n)[0]
            if idx.size:
                self.sectors.append(idx)
        sizes = [idx.size**2 for idx in self.sectors]
        self.offsets = np.concatenate([[0], np.cumsum(sizes)])
        self.dim = int(self.offsets[-1])

    def expand(self, x: np.ndarray) -> np.ndarray:
        """Scatter a reduced vector back into a full dense matrix."""
        d = self.desc.dim
        rho = np.zeros((d, d), dtype=complex)
        for k, idx in enumerate(self.sectors):
            m = idx.size
            block = x[self.offsets[k] : self.offsets[k + 1]].reshape((m, m), order="F")
            rho[np.ix_(idx, idx)] = block
        return rho

    def trace_vector(self) -> np.ndarray:
        """Reduced-space image of vec(I)."""
        t = np.zeros(self.dim)
        for k, idx in enumerate(self.sectors):
            m = idx.size
            t[self.offsets[k] : self.offsets[k + 1]].reshape((m, m), order="F")[
                np.diag_indices(m)
            ] = 1.0
        return t

    def unit_index(self) -> int:
        """Reduced index of the (0, 0) entry of rho (the bordering vector b)."""
        for k, idx in enumerate(self.sectors):
            pos = np.nonzero(idx == 0)[0]
            if pos.size:
                p = int(pos[0])
                return int(self.offsets[k]) + p * idx.size + p
        raise RuntimeError("basis index 0 missing from sector decomposition")


def build_reduced_liouvillian(
    params: SystemParams, red: ReducedSpace | None = None
) -> tuple[sp.csr_matrix, ReducedSpace]:
    """Assemble the Liouvillian restricted to the equal-excitation block."""
    desc = params.descriptor()
    red = red or ReducedSpace(desc)
    rows, cols, vals = [], [], []
    terms = [(x.tocsr(), y.tocsr()) for x, y in liouvillian_terms(params, desc)]
    for x, y in terms:
        delta = _term_shift(x, red.ntot)
        for k, idx in enumerate(red.sectors):
            n_src = int(red.ntot[idx[0]])
            tgt = _sector_position(red, n_src + delta)
            if tgt is None:
                continue
            jdx = red.sectors[tgt]
            x_sub = x[jdx][:, idx]
            y_sub = y[idx][:, jdx]
            block = sp.kron(y_sub.T, x_sub, format="coo")
            if block.nnz == 0:
                continue
            rows.append(block.row + red.offsets[tgt])
            cols.append(block.col + red.offsets[k])
            vals.append(block.data)
    mat = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(red.dim, red.dim),
    ).tocsr()
    mat.sum_duplicates()
    mat.data[np.abs(mat.data) < 1e-14] = 0.0
    mat.eliminate_zeros()
    return mat, red


def _sector_position(red: ReducedSpace, n: int):
    for k, idx in enumerate(red.sectors):
        if red.ntot[idx[0]] == n:
            return k
    return None


def _term_shift(x: sp.csr_matrix, ntot: np.ndarray) -> int:
    """Uniform excitation shift of an operator, asserted constant."""
    coo = x.tocoo()
    if coo.nnz == 0:
        return 0
    shifts = ntot[coo.row] - ntot[coo.col]
    if not np.all(shifts == shifts[0]):
        raise RuntimeError("operator does not shift excitation number uniformly")
    return int(shifts[0])


def _diagnose(
    rho_raw: np.ndarray, desc: SpaceDescriptor, residual_norm: float | None
) -> NessDiagnostics:
    herm = float(np.max(np.abs(rho_raw - rho_raw.conj().T)))
    trace_err = float(abs(np.trace(rho_raw) - 1.0))
    sym = 0.5 * (rho_raw + rho_raw.conj().T)
    eigs = np.linalg.eigvalsh(sym)
    diag = np.real(np.diag(rho_raw))
    top = float(np.sum(diag[desc.fock_dim - 1 :: desc.fock_dim]))
    return NessDiagnostics(
        residual_norm=residual_norm,
        trace_error=trace_err,
        min_eigenvalue=float(eigs[0]),
        top_fock_population=top,
        hermiticity_defect=herm,
    )


def _cleanup(rho_raw: np.ndarray) -> np.ndarray:
    rho = 0.5 * (rho_raw + rho_raw.conj().T)
    return rho / np.real(np.trace(rho))


def _solve_bordered(
    mat: sp.csr_matrix,
    trace_vec: np.ndarray,
    b_index: int,
    method: str,
) -> np.ndarray:
    n = mat.shape[0]
    b = np.zeros(n, dtype=complex)
    b[b_index] = 1.0
    border = sp.csr_matrix(
        (np.full(trace_vec.nonzero()[0].size, 1.0 + 0j),
         (np.full(trace_vec.nonzero()[0].size, b_index),
          trace_vec.nonzero()[0])),
        shape=mat.shape,
    )
    bordered = (mat + border).tocsc()
    if method == "direct":
        try:
            lu = spla.splu(bordered)
        except RuntimeError as exc:
            raise DegenerateSteadyStateError(
                f"bordered steady-state matrix is singular: {exc}"
            ) from exc
        return lu.solve(b)
    if method == "iterative":
        try:
            ilu = spla.spilu(bordered, drop_tol=1e-6, fill_factor=20)
            precond = spla.LinearOperator(bordered.shape, ilu.solve)
        except RuntimeError:
            precond = None
        x, info = spla.lgmres(
            bordered, b, M=precond, rtol=1e-12, atol=1e-13, maxiter=2000
        )
        if info != 0:
            res = float(np.linalg.norm(bordered @ x - b))
            raise ConvergenceError(
                f"iterative bordered solve did not converge (info={info})",
                achieved_residual=res,
            )
        return x
    raise DomainError(f"unknown solve method {method!r}")


def solve_ness(
    liou: LiouvillianMatrix, method: str = "direct"
) -> tuple[DensityMatrix, NessDiagnostics]:
    """Steady state of the full vectorized Liouvillian.

    Solves (L + b vec(I)^+) x = b with b the first vectorized basis unit
    vector, then symmetrizes and renormalizes. Diagnostics are computed on
    the raw solver output, before cleanup.
    """
    mat = liou.matrix
    d = liou.desc.dim
    trace_vec = np.zeros(d * d)
    trace_vec[:: d + 1] = 1.0
    x = _solve_bordered(mat.tocsr(), trace_vec, 0, method)
    residual = float(np.linalg.norm(mat @ x))
    scale = float(np.max(np.abs(mat.data))) if mat.nnz else 1.0
    if residual > RESIDUAL_FACTOR * scale:
        raise ConvergenceError(
            f"steady-state residual {residual:.3e} above target "
            f"{RESIDUAL_FACTOR * scale:.3e}",
            achieved_residual=residual,
        )
    rho_raw = unvectorize(x, d)
    diag = _diagnose(rho_raw, liou.desc, residual)
    rho = DensityMatrix(matrix=_cleanup(rho_raw), desc=liou.desc)
    return rho, diag


def solve_ness_reduced(
    params: SystemParams, method: str = "direct"
) -> tuple[DensityMatrix, NessDiagnostics]:
    """Steady state via the equal-excitation reduced system."""
    mat, red = build_reduced_liouvillian(params)
    x = _solve_bordered(mat, red.trace_vector(), red.unit_index(), method)
    residual = float(np.linalg.norm(mat @ x))
    scale = float(np.max(np.abs(mat.data))) if mat.nnz else 1.0
    if residual > RESIDUAL_FACTOR * scale:
        raise ConvergenceError(
            f"reduced steady-state residual {residual:.3e} above target "
            f"{RESIDUAL_FACTOR * scale:.3e}",
            achieved_residual=residual,
        )
    rho_raw = red.expand(x)
    diag = _diagnose(rho_raw, params.descriptor(), residual)
    rho = DensityMatrix(matrix=_cleanup(rho_raw), desc=params.descriptor())
    return rho, diag


def solve_ness_evolution(
    params: SystemParams,
    initial: DensityMatrix | None = None,
    t_chunk: float = 20.0,
    t_max: float = 40_000.0,
    residual_factor: float = RESIDUAL_FACTOR,
) -> tuple[DensityMatrix, NessDiagnostics]:
    """Steady state by relaxing the reduced master equation in time.

    Matrix-free alternative for systems too large to factorize: repeatedly
    applies exp(L dt) with a Krylov propagator until the residual meets the
    same target as the direct solves. ``initial`` (e.g. the solution at a
    smaller Fock cutoff) warm-starts the relaxation; the default start is
    the maximally mixed state.
    """
    mat, red = build_reduced_liouvillian(params)
    scale = float(np.max(np.abs(mat.data))) if mat.nnz else 1.0
    target = residual_factor * scale
    if initial is not None:
        v = _restrict_density(initial, params.descriptor(), red)
    else:
        v = red.trace_vector().astype(complex)
    tr = float(np.sum(v[_reduced_diag_indices(red)].real))
    v = v / tr
    t = 0.0
    residual = float(np.linalg.norm(mat @ v))
    while residual > target:
        if t >= t_max:
            raise ConvergenceError(
                f"evolution steady-state residual {residual:.3e} still above "
                f"target {target:.3e} after t={t:g}",
                achieved_residual=residual,
            )
        v = spla.expm_multiply(mat, v, start=0.0, stop=t_chunk, num=2, endpoint=True)[-1]
        t += t_chunk
        residual = float(np.linalg.norm(mat @ v))
    diag = _diagnose_reduced(v, red, params.descriptor(), residual)
    rho = DensityMatrix(
        matrix=_reduced_to_sparse(v, red, cleanup=True), desc=params.descriptor()
    )
    return rho, diag


def _diagnose_reduced(
    v: np.ndarray, red: ReducedSpace, desc: SpaceDescriptor, residual: float
) -> NessDiagnostics:
    """Per-sector diagnostics without materializing the full dense matrix."""
    herm = 0.0
    trace = 0.0
    min_eig = np.inf
    top = 0.0
    top_mask_col = desc.fock_dim - 1
    for k, idx in enumerate(red.sectors):
        m = idx.size
        block = v[red.offsets[k] : red.offsets[k + 1]].reshape((m, m), order="F")
        herm = max(herm, float(np.max(np.abs(block - block.conj().T))))
        d = np.real(np.diag(block))
        trace += float(d.sum())
        min_eig = min(
            min_eig, float(np.linalg.eigvalsh(0.5 * (block + block.conj().T))[0])
        )
        top += float(d[(idx % desc.fock_dim) == top_mask_col].sum())
    return NessDiagnostics(
        residual_norm=residual,
        trace_error=float(abs(trace - 1.0)),
        min_eigenvalue=min_eig,
        top_fock_population=top,
        hermiticity_defect=herm,
    )


def _reduced_to_sparse(v: np.ndarray, red: ReducedSpace, cleanup: bool) -> sp.csr_matrix:
    rows, cols, vals = [], [], []
    trace = 0.0
    blocks = []
    for k, idx in enumerate(red.sectors):
        m = idx.size
        block = v[red.offsets[k] : red.offsets[k + 1]].reshape((m, m), order="F")
        if cleanup:
            block = 0.5 * (block + block.conj().T)
        trace += float(np.real(np.trace(block)))
        blocks.append((idx, block))
    for idx, block in blocks:
        if cleanup:
            block = block / trace
        r, c = np.meshgrid(idx, idx, indexing="ij")
        rows.append(r.reshape(-1))
        cols.append(c.reshape(-1))
        vals.append(block.reshape(-1))
    d = red.desc.dim
    out = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(d, d),
    ).tocsr()
    out.data[np.abs(out.data) < 1e-300] = 0.0
    out.eliminate_zeros()
    return out


def _reduced_diag_indices(red: ReducedSpace) -> np.ndarray:
    out = []
    for k, idx in enumerate(red.sectors):
        m = idx.size
        out.append(red.offsets[k] + np.arange(m) * (m + 1))
    return np.concatenate(out)


def _restrict_density(
    rho: DensityMatrix, desc_new: SpaceDescriptor, red: ReducedSpace
) -> np.ndarray:
    """Embed a density matrix (possibly at a smaller Fock cutoff) into the
    reduced vector representation of ``desc_new``."""
    old = rho.desc
    if old.num_spins != desc_new.num_spins or old.fock_dim > desc_new.fock_dim:
        raise DomainError("warm start must share L and not exceed the new cutoff")
    r = rho.matrix
    sparse = sp.issparse(r)
    v = np.zeros(red.dim, dtype=complex)
    for k, idx in enumerate(red.sectors):
        s, p = np.divmod(idx, desc_new.fock_dim)
        keep = p < old.fock_dim
        if not np.any(keep):
            continue
        oi = s[keep] * old.fock_dim + p[keep]
        sub_small = r[np.ix_(oi, oi)]
        if sparse:
            sub_small = np.asarray(sub_small.todense())
        m = idx.size
        block = np.zeros((m, m), dtype=complex)
        block[np.ix_(keep.nonzero()[0], keep.nonzero()[0])] = sub_small
        v[red.offsets[k] : red.offsets[k + 1]] = block.reshape(-1, order="F")
    return v


def _photon_number(rho: DensityMatrix) -> float:
    diag = np.real(np.asarray(rho.matrix.diagonal()).reshape(-1))
    n = np.tile(np.arange(rho.desc.fock_dim), rho.desc.spin_dim)
    return float(diag @ n)


def _diagnose_sparse(
    m: sp.csr_matrix, desc: SpaceDescriptor, residual: float | None
) -> NessDiagnostics:
    """Diagnostics for a block-diagonal sparse matrix via connected components."""
    from scipy.sparse.csgraph import connected_components

    herm_dev = m - m.conj().T
    herm = float(np.max(np.abs(herm_dev.data))) if herm_dev.nnz else 0.0
    diag = np.real(np.asarray(m.diagonal()).reshape(-1))
    trace_err = float(abs(diag.sum() - 1.0))
    top = float(diag[desc.fock_dim - 1 :: desc.fock_dim].sum())
    pattern = ((np.abs(m) + np.abs(m).T) > 0).astype(np.int8)
    ncomp, labels = connected_components(pattern, directed=False)
    min_eig = np.inf
    for c in range(ncomp):
        idx = np.nonzero(labels == c)[0]
        block = m[np.ix_(idx, idx)].toarray()
        min_eig = min(
            min_eig, float(np.linalg.eigvalsh(0.5 * (block + block.conj().T))[0])
        )
    return NessDiagnostics(
        residual_norm=residual,
        trace_error=trace_err,
        min_eigenvalue=min_eig,
        top_fock_population=top,
        hermiticity_defect=herm,
    )


def _solver_path(params: SystemParams, max_vec_dim: int) -> str:
    """full | reduced | evolution, chosen by memory cost estimates."""
    vec_dim = params.descriptor().dim ** 2
    if vec_dim <= min(FULL_SOLVE_MAX_VEC_DIM, max_vec_dim):
        return "full"
    red = ReducedSpace(params.descriptor())
    m_max = max(idx.size for idx in red.sectors)
    est_fill = red.dim * 3 * m_max**2
    if (
        red.dim <= min(REDUCED_DIRECT_MAX_DIM, max_vec_dim)
        and est_fill <= REDUCED_DIRECT_FILL_BUDGET
    ):
        return "reduced"
    if red.dim > max(EVOLUTION_MAX_DIM, max_vec_dim):
        raise BudgetExceededError(
            f"reduced dimension {red.dim} exceeds the evolution-path budget "
            f"{max(EVOLUTION_MAX_DIM, max_vec_dim)}"
        )
    return "evolution"


def solve_ness_auto(
    params: SystemParams,
    max_vec_dim: int = DEFAULT_MAX_VEC_DIM,
    warm_start: DensityMatrix | None = None,
    residual_factor: float = RESIDUAL_FACTOR,
) -> tuple[DensityMatrix, NessDiagnostics]:
    """Pick the full, reduced, or matrix-free path by problem size.

    ``residual_factor`` only loosens the matrix-free relaxation; the direct
    factorization paths always hit machine-level residuals.
    """
    path = _solver_path(params, max_vec_dim)
    if path == "full":
        return solve_ness(build_liouvillian(params, max_vec_dim=max_vec_dim))
    if path == "reduced":
        return solve_ness_reduced(params)
    return solve_ness_evolution(
        params, initial=warm_start, residual_factor=residual_factor
    )


@dataclass(frozen=True)
class AdaptiveResult:
    rho: DensityMatrix
    diagnostics: NessDiagnostics
    chosen_n_max: int
    history: tuple = field(default_factory=tuple)  # (n_max, photons, top_pop)


def adaptive_cutoff_ness(
    params: SystemParams,
    top_pop_tol: float = 1e-8,
    photon_rtol: float = 1e-4,
    max_vec_dim: int = DEFAULT_MAX_VEC_DIM,
) -> AdaptiveResult:
    """Grow the Fock cutoff geometrically until the steady state converges.

    Convergence requires the top-Fock population below ``top_pop_tol`` and
    the photon number stable to ``photon_rtol`` between consecutive
    cutoffs (a solution with essentially zero photons converges at the
    first adequate cutoff).

    The exploratory cutoffs are relaxed only to a loose residual when the
    matrix-free path is in play (their photon numbers steer the schedule,
    nothing more); the accepted solution is always re-tightened to the
    standard residual target before returning.
    """
    n = max(params.L + 2, 3)
    history: list[tuple[int, float, float]] = []
    prev_photons = None
    prev_rho: DensityMatrix | None = None
    while True:
        try:
            rho, diag = solve_ness_auto(
                params.with_n_max(n),
                max_vec_dim=max_vec_dim,
                warm_start=prev_rho,
                residual_factor=EXPLORATION_RESIDUAL_FACTOR,
            )
        except BudgetExceededError as exc:
            raise BudgetExceededError(
                f"Fock cutoff schedule exceeded the memory budget at n_max={n}; "
                f"trend so far (n_max, photons, top_pop): {history}"
            ) from exc
        photons = _photon_number(rho)
        history.append((n, photons, diag.top_fock_population))
        if diag.top_fock_population < top_pop_tol:
            converged = photons < 1e-10 or (
                prev_photons is not None
                and abs(photons - prev_photons)
                <= photon_rtol * max(abs(photons), 1e-30)
            )
            if converged:
                if _solver_path(params.with_n_max(n), max_vec_dim) == "evolution":
                    rho, diag = solve_ness_evolution(
                        params.with_n_max(n), initial=rho
                    )
                return AdaptiveResult(rho, diag, n, tuple(history))
        prev_photons = photons
        prev_rho = rho
        # Bound the schedule below by geometric growth and accelerate it
        # with the photon number, which sets the scale of the occupied
        # Fock tail; cap the jump so warm starts stay effective.
        n = max(n + 2, int(np.ceil(n * 1.3)), min(2 * n, int(np.ceil(2.4 * photons))))


def validate_density_matrix(rho: DensityMatrix, tol: float = 1e-8) -> NessDiagnostics:
    """Diagnostics-only validation; never mutates its input.

    ``residual_norm`` is None here since no Liouvillian is involved; ``tol``
    is the threshold used by ``NessDiagnostics.acceptable``.
    """
    if rho.is_sparse:
        diag = _diagnose_sparse(rho.matrix.tocsr(), rho.desc, None)
    else:
        diag = _diagnose(np.asarray(rho.matrix, dtype=complex), rho.desc, None)
    # tol only parameterizes the acceptable() check; returned for the caller.
    _ = diag.acceptable(tol)
    return diag
