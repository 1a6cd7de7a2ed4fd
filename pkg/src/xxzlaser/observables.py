"""Physical quantities extracted from density matrices.

Everything here is read-only with respect to its inputs. Site labels are
1-based throughout, matching the chain Hamiltonian.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import DomainError, UndefinedStatisticError
from .hilbert import SpaceDescriptor, boson_operator, spin_operator
from .model import SystemParams, build_hxxz
from .ness import DensityMatrix

OZZ_DENOMINATOR_TOL = 1e-9


def _diag(rho: DensityMatrix) -> np.ndarray:
    return np.real(np.asarray(rho.matrix.diagonal()).reshape(-1))


def _expectation(rho: DensityMatrix, op) -> float:
    # tr(A rho) = sum_ij A_ij rho_ji, works for dense and sparse rho
    prod = op.data.multiply(rho.matrix.T) if rho.is_sparse else op.data.multiply(
        np.asarray(rho.matrix).T
    )
    return float(np.real(prod.sum()))


def photon_number(rho: DensityMatrix) -> float:
    """Mean intracavity photon number <a^+ a>."""
    diag = _diag(rho)
    n = np.tile(np.arange(rho.desc.fock_dim), rho.desc.spin_dim)
    return float(diag @ n)


def g2_zero(rho: DensityMatrix) -> float:
    """Second-order autocorrelation <a+ a+ a a> / <a+ a>^2 at zero delay."""
    diag = _diag(rho)
    n = np.tile(np.arange(rho.desc.fock_dim), rho.desc.spin_dim).astype(float)
    mean_n = float(diag @ n)
    if mean_n <= 1e-12:
        raise UndefinedStatisticError(
            f"g2(0) undefined: photon number {mean_n:.3e} vanishes"
        )
    mean_nn = float(diag @ (n * (n - 1.0)))
    return mean_nn / mean_n**2


def total_magnetization(rho: DensityMatrix) -> float:
    """<Z_T> = sum_i <Z_i>, in [-L, L]."""
    return float(
        sum(
            _expectation(rho, spin_operator(rho.desc, i, "Z"))
            for i in range(1, rho.desc.num_spins + 1)
        )
    )


def cooperativity_fraction(n_many: float, n_single: float, L: int) -> float:
    """Cooperative fraction comparing one shared cavity to L private ones.

    ``n_single`` is the single-emitter steady-state photon number at the
    same coupling, pump and loss.
    """
    if n_many < 0 or n_single < 0:
        raise DomainError("photon numbers must be non-negative")
    denom = n_many + L * n_single
    if denom <= 0:
        raise UndefinedStatisticError("cooperative fraction undefined: both outputs zero")
    return (n_many - L * n_single) / denom


def cooperativity_xxz(n_xxz: float, n_free: float) -> float:
    """Chain cooperativity: interacting laser vs the same laser with the chain off."""
    if n_xxz < 0 or n_free < 0:
        raise DomainError("photon numbers must be non-negative")
    denom = n_xxz + n_free
    if denom <= 0:
        raise UndefinedStatisticError("chain cooperativity undefined: both outputs zero")
    return (n_xxz - n_free) / denom


@dataclass(frozen=True)
class ZZCorrelation:
    raw: float  # <Z_m Z_l>
    ratio: float | None  # <Z_m Z_l> / (<Z_m><Z_l>), None when undefined
    undefined: bool


def zz_correlation(rho: DensityMatrix, m: int, l: int) -> ZZCorrelation:
    """Normalized and raw ZZ correlators between sites m and l (1-based)."""
    L = rho.desc.num_spins
    if not (1 <= m <= L and 1 <= l <= L):
        raise DomainError(f"sites ({m}, {l}) out of range 1..{L}")
    zm = spin_operator(rho.desc, m, "Z")
    zl = spin_operator(rho.desc, l, "Z")
    raw = _expectation(rho, zm @ zl)
    denom = _expectation(rho, zm) * _expectation(rho, zl)
    if abs(denom) < OZZ_DENOMINATOR_TOL:
        return ZZCorrelation(raw=raw, ratio=None, undefined=True)
    return ZZCorrelation(raw=raw, ratio=raw / denom, undefined=False)


def partial_trace_cavity(rho: DensityMatrix) -> DensityMatrix:
    """Reduced spin state tr_C rho on the 2^L spin space."""
    d_s, d_c = rho.desc.spin_dim, rho.desc.fock_dim
    if rho.is_sparse:
        coo = rho.matrix.tocoo()
        rs, rp = np.divmod(coo.row, d_c)
        cs, cp = np.divmod(coo.col, d_c)
        keep = rp == cp
        spin_rho = np.zeros((d_s, d_s), dtype=complex)
        np.add.at(spin_rho, (rs[keep], cs[keep]), coo.data[keep])
    else:
        r = np.asarray(rho.matrix).reshape(d_s, d_c, d_s, d_c)
        spin_rho = np.trace(r, axis1=1, axis2=3)
    return DensityMatrix(
        matrix=spin_rho, desc=SpaceDescriptor(rho.desc.num_spins, 1)
    )


@dataclass(frozen=True)
class XXZEigenbasis:
    """Sector-resolved eigenbasis of the bare spin-chain Hamiltonian."""

    vectors: np.ndarray  # columns are eigenvectors, dim 2^L
    energies: np.ndarray
    magnetizations: np.ndarray  # integer Z_T eigenvalue per state
    params: SystemParams


def _spin_magnetizations(L: int) -> np.ndarray:
    states = np.arange(2**L)
    downs = np.array([bin(s).count("1") for s in states])
    return L - 2 * downs


def diagonalize_xxz(params: SystemParams) -> XXZEigenbasis:
    """Dense diagonalization of H_XXZ, block by block in the Z_T sectors.

    States are ordered by (magnetization, energy); the basis inside
    degenerate multiplets is canonicalized downstream by
    ``spectral_decomposition``.
    """
    if params.L > 12:
        raise DomainError("dense sector diagonalization limited to L <= 12")
    desc = SpaceDescriptor(params.L, 1)
    h = build_hxxz(params, desc).to_dense().real
    mags = _spin_magnetizations(params.L)
    dim = 2**params.L
    vectors = np.zeros((dim, dim))
    energies = np.zeros(dim)
    out_mags = np.zeros(dim, dtype=int)
    col = 0
    for z in range(params.L, -params.L - 2, -2):
        idx = np.nonzero(mags == z)[0]
        if idx.size == 0:
            continue
        w, v = np.linalg.eigh(h[np.ix_(idx, idx)])
        for k in range(idx.size):
            vectors[idx, col] = v[:, k]
            energies[col] = w[k]
            out_mags[col] = z
            col += 1
    return XXZEigenbasis(
        vectors=vectors, energies=energies, magnetizations=out_mags, params=params
    )


@dataclass(frozen=True)
class SpectralRecord:
    eigen_index: int
    energy: float
    magnetization: int
    probability: float
    is_top3: bool = False


def spectral_decomposition(
    rho_spin: DensityMatrix, basis: XXZEigenbasis, degeneracy_tol: float = 1e-8
) -> list[SpectralRecord]:
    """Probabilities p_i = <i|rho_spin|i> in the chain eigenbasis.

    Within each degenerate (energy, magnetization) multiplet the projected
    density matrix is diagonalized first, which makes the probabilities
    independent of the arbitrary eigenvector choice inside the multiplet.
    """
    rho = np.asarray(rho_spin.matrix)
    if rho.shape[0] != basis.vectors.shape[0]:
        raise DomainError("rho_spin dimension does not match eigenbasis")
    vectors = basis.vectors.astype(complex).copy()
    dim = vectors.shape[1]
    # group contiguous states with equal magnetization and energy
    groups: list[list[int]] = []
    for i in range(dim):
        if groups and (
            basis.magnetizations[i] == basis.magnetizations[groups[-1][0]]
            and abs(basis.energies[i] - basis.energies[groups[-1][0]]) <= degeneracy_tol
        ):
            groups[-1].append(i)
        else:
            groups.append([i])
    records = []
    for grp in groups:
        v = vectors[:, grp]
        proj = v.conj().T @ rho @ v
        if len(grp) > 1:
            probs, rot = np.linalg.eigh(0.5 * (proj + proj.conj().T))
            probs = probs[::-1]
        else:
            probs = np.real(np.diag(proj))
        for k, i in enumerate(grp):
            records.append(
                SpectralRecord(
                    eigen_index=i,
                    energy=float(basis.energies[i]),
                    magnetization=int(basis.magnetizations[i]),
                    probability=float(max(probs[k], 0.0)),
                )
            )
    top = sorted(records, key=lambda r: -r.probability)[:3]
    top_ids = {r.eigen_index for r in top}
    return [
        SpectralRecord(
            eigen_index=r.eigen_index,
            energy=r.energy,
            magnetization=r.magnetization,
            probability=r.probability,
            is_top3=r.eigen_index in top_ids,
        )
        for r in records
    ]


@dataclass(frozen=True)
class BrightState:
    """Permutation-symmetric spin state with n down-spins (Dicke state)."""

    n: int
    magnetization: int
    amplitudes: np.ndarray

    @property
    def L(self) -> int:
        return int(np.log2(self.amplitudes.size))


def bright_states(L: int) -> list[BrightState]:
    """The L+1 uniform-superposition states over fixed down-spin number."""
    if L < 1:
        raise DomainError(f"L must be >= 1, got {L}")
    states = np.arange(2**L)
    downs = np.array([bin(s).count("1") for s in states])
    out = []
    for n in range(L + 1):
        amp = np.zeros(2**L)
        amp[downs == n] = 1.0 / np.sqrt(comb(L, n))
        out.append(BrightState(n=n, magnetization=L - 2 * n, amplitudes=amp))
    return out
