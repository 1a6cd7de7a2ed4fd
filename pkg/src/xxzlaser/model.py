"""Physical model: XXZ chain, Tavis-Cummings coupling, Lindblad dissipators,
and the vectorized Liouvillian matrix.

Vectorization follows the column-stacking convention: vec(X rho Y) =
(Y^T kron X) vec(rho), so the commutator part reads
-i (I kron H - H^T kron I).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .errors import BudgetExceededError, DimensionMismatchError, DomainError
from .hilbert import SpaceDescriptor, SparseOperator, boson_operator, spin_operator

# Default bordered-system budget: vectorized dimension (2^6 * 10)^2.
DEFAULT_MAX_VEC_DIM = (2**6 * 10) ** 2


@dataclass(frozen=True)
class SystemParams:
    """Model constants. All energies and rates are in units of the hopping J.

    The chain is open with L-1 nearest-neighbour bonds. ``xxz_enabled``
    switches the chain Hamiltonian off (used for the non-interacting
    reference laser in the cooperativity measures); J keeps defining the
    unit system either way.
    """

    L: int
    J: float = 1.0
    U: float = 1.0
    g: float = 0.1
    P: float = 1.0
    kappa: float = 0.05
    n_max: int = 8
    xxz_enabled: bool = True

    def __post_init__(self):
        if self.L < 1:
            raise DomainError(f"L must be >= 1, got {self.L}")
        if self.J <= 0:
            raise DomainError(f"J must be > 0 (it sets the unit), got {self.J}")
        for name in ("g", "P", "kappa"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.n_max < 1:
            raise DomainError(f"n_max must be >= 1, got {self.n_max}")

    def descriptor(self) -> SpaceDescriptor:
        # n_max is the highest retained photon number, so n_max + 1 levels
        return SpaceDescriptor(num_spins=self.L, fock_dim=self.n_max + 1)

    def with_n_max(self, n_max: int) -> "SystemParams":
        return replace(self, n_max=n_max)


@dataclass(frozen=True)
class LiouvillianMatrix:
    """Sparse matrix acting on column-stacked density matrices."""

    matrix: sp.csr_matrix
    params: SystemParams
    desc: SpaceDescriptor

    @property
    def vec_dim(self) -> int:
        return self.desc.dim ** 2


def build_hxxz(params: SystemParams, desc: SpaceDescriptor | None = None) -> SparseOperator:
    """Open-chain XXZ Hamiltonian J sum (XX + YY) + U sum ZZ over L-1 bonds."""
    desc = desc or params.descriptor()
    dim = desc.dim
    h = SparseOperator(sp.csr_matrix((dim, dim), dtype=complex))
    if not params.xxz_enabled:
        return h
    for i in range(1, desc.num_spins):
        j = i + 1
        for kind, coeff in (("X", params.J), ("Y", params.J), ("Z", params.U)):
            a = spin_operator(desc, i, kind)
            b = spin_operator(desc, j, kind)
            h = h + coeff * (a @ b)
    return h


def build_htc(params: SystemParams, desc: SpaceDescriptor | None = None) -> SparseOperator:
    """Tavis-Cummings coupling g sum_i (a sigma_i^+ + a^+ sigma_i)."""
    desc = desc or params.descriptor()
    a = boson_operator(desc, "annihilate")
    adag = boson_operator(desc, "create")
    dim = desc.dim
    h = SparseOperator(sp.csr_matrix((dim, dim), dtype=complex))
    for i in range(1, desc.num_spins + 1):
        sp_raise = spin_operator(desc, i, "raise")
        sp_lower = spin_operator(desc, i, "lower")
        h = h + params.g * (a @ sp_raise + adag @ sp_lower)
    return h


def apply_dissipator(x: SparseOperator, rho: np.ndarray) -> np.ndarray:
    """Lindblad dissipator D_x(rho) = -1/2 {x^+ x, rho} + x rho x^+."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (x.dim, x.dim):
        raise DimensionMismatchError(
            f"rho shape {rho.shape} does not match operator dim {x.dim}"
        )
    xm = x.data
    xdx = (xm.conj().T @ xm).toarray()
    return xm @ rho @ xm.conj().T - 0.5 * (xdx @ rho + rho @ xdx)


def liouvillian_terms(params: SystemParams, desc: SpaceDescriptor | None = None):
    """The master equation as a list of (X, Y) pairs meaning rho -> X rho Y.

    Shared between the full vectorized build and the excitation-sector
    reduced solver.
    """
    desc = desc or params.descriptor()
    dim = desc.dim
    ident = sp.identity(dim, dtype=complex, format="csr")
    h = (build_hxxz(params, desc) + build_htc(params, desc)).data
    terms = [(-1j * h, ident), (ident, 1j * h)]
    jumps = []
    if params.P > 0:
        for i in range(1, desc.num_spins + 1):
            jumps.append(np.sqrt(params.P) * spin_operator(desc, i, "raise").data)
    if params.kappa > 0:
        jumps.append(np.sqrt(params.kappa) * boson_operator(desc, "annihilate").data)
    for c in jumps:
        cdc = (c.conj().T @ c).tocsr()
        terms.append((c, c.conj().T))
        terms.append((-0.5 * cdc, ident))
        terms.append((ident, -0.5 * cdc))
    return terms


def build_liouvillian(
    params: SystemParams, max_vec_dim: int = DEFAULT_MAX_VEC_DIM
) -> LiouvillianMatrix:
    """Vectorized Liouvillian: sum over terms (X, Y) of Y^T kron X."""
    desc = params.descriptor()
    vec_dim = desc.dim ** 2
    if vec_dim > max_vec_dim:
        raise BudgetExceededError(
            f"vectorized dimension {vec_dim} = ({desc.dim})^2 exceeds the "
            f"budget {max_vec_dim}; raise max_vec_dim or use fewer Fock states"
        )
    mat = sp.csr_matrix((vec_dim, vec_dim), dtype=complex)
    for x, y in liouvillian_terms(params, desc):
        mat = mat + sp.kron(y.T, x, format="csr")
    mat.data[np.abs(mat.data) < 1e-14] = 0.0
    mat.eliminate_zeros()
    return LiouvillianMatrix(matrix=mat, params=params, desc=desc)


@lru_cache(maxsize=4)
def _master_equation_pieces(params: SystemParams):
    """Dense Hamiltonian and (rate, J, J^dag J) dissipator triples."""
    desc = params.descriptor()
    h = (build_hxxz(params, desc) + build_htc(params, desc)).to_dense()
    channels = []
    if params.P > 0:
        for i in range(1, params.L + 1):
            j = spin_operator(desc, i, "raise").to_dense()
            channels.append((params.P, j, j.conj().T @ j))
    if params.kappa > 0:
        a = boson_operator(desc, "annihilate").to_dense()
        channels.append((params.kappa, a, a.conj().T @ a))
    return h, tuple(channels)


def apply_master_equation(params: SystemParams, rho: np.ndarray) -> np.ndarray:
    """Right side of the master equation applied directly to a density matrix.

    Dense-matrix evaluation, independent of the vectorized construction;
    used as the oracle for the vectorized Liouvillian and for the
    time-integration steady-state cross-check.
    """
    dim = params.descriptor().dim
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (dim, dim):
        raise DimensionMismatchError(
            f"rho shape {rho.shape} does not match space dim {dim}"
        )
    h, channels = _master_equation_pieces(params)
    out = -1j * (h @ rho - rho @ h)
    for rate, j, jdj in channels:
        out += rate * (j @ rho @ j.conj().T - 0.5 * (jdj @ rho + rho @ jdj))
    return out


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Column-stack a matrix (Fortran order)."""
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvectorize(vec: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(vec, dtype=complex).reshape((dim, dim), order="F")
