"""Sparse operators on the composite space of L spins and one truncated boson mode.

Basis ordering is fixed everywhere as spin_1 (slowest index) through spin_L,
then the cavity mode: a composite basis index is
``(((s_1 * 2 + s_2) * 2 + ...) * fock_dim) + n`` with s_i in {0 = up, 1 = down}
and n the Fock occupation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatchError, DomainError

# Entries smaller than this in magnitude are never stored explicitly.
DROP_TOL = 1e-14

SPIN_KINDS = ("X", "Y", "Z", "raise", "lower")
BOSON_KINDS = ("annihilate", "create", "number")

_PAULI = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "raise": np.array([[0, 1], [0, 0]], dtype=complex),
    "lower": np.array([[0, 0], [1, 0]], dtype=complex),
}


@dataclass(frozen=True)
class SpaceDescriptor:
    """Tensor-product space of ``num_spins`` two-level systems and one boson mode.

    ``fock_dim`` counts the retained Fock states |0> ... |fock_dim - 1>.
    """

    num_spins: int
    fock_dim: int

    def __post_init__(self):
        if self.num_spins < 1:
            raise DomainError(f"num_spins must be >= 1, got {self.num_spins}")
        if self.fock_dim < 1:
            raise DomainError(f"fock_dim must be >= 1, got {self.fock_dim}")

    @property
    def spin_dim(self) -> int:
        return 2**self.num_spins

    @property
    def dim(self) -> int:
        return self.spin_dim * self.fock_dim


def _drop_small(m: sp.csr_matrix) -> sp.csr_matrix:
    m = m.tocsr()
    if m.nnz:
        m.data[np.abs(m.data) < DROP_TOL] = 0.0
        m.eliminate_zeros()
    m.sum_duplicates()
    return m


class SparseOperator:
    """Immutable complex sparse matrix tied to a total dimension."""

    __slots__ = ("dim", "data")

    def __init__(self, matrix, dim: int | None = None):
        m = sp.csr_matrix(matrix, dtype=complex, copy=True)
        if m.shape[0] != m.shape[1]:
            raise DimensionMismatchError(f"operator must be square, got {m.shape}")
        if dim is not None and m.shape[0] != dim:
            raise DimensionMismatchError(
                f"matrix dimension {m.shape[0]} does not match declared {dim}"
            )
        m = _drop_small(m)
        for buf in (m.data, m.indices, m.indptr):
            buf.flags.writeable = False
        object.__setattr__(self, "dim", m.shape[0])
        object.__setattr__(self, "data", m)

    def __setattr__(self, *_):
        raise AttributeError("SparseOperator is immutable")

    # -- arithmetic ---------------------------------------------------------

    def _check_dim(self, other: "SparseOperator"):
        if self.dim != other.dim:
            raise DimensionMismatchError(
                f"dimension mismatch: {self.dim} vs {other.dim}"
            )

    def __add__(self, other: "SparseOperator") -> "SparseOperator":
        self._check_dim(other)
        return SparseOperator(self.data + other.data)

    def __sub__(self, other: "SparseOperator") -> "SparseOperator":
        self._check_dim(other)
        return SparseOperator(self.data - other.data)

    def __mul__(self, scalar: complex) -> "SparseOperator":
        return SparseOperator(self.data * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "SparseOperator":
        return SparseOperator(-self.data)

    def __matmul__(self, other: "SparseOperator") -> "SparseOperator":
        self._check_dim(other)
        return SparseOperator(self.data @ other.data)

    def adjoint(self) -> "SparseOperator":
        return SparseOperator(self.data.conj().T)

    def kron(self, other: "SparseOperator") -> "SparseOperator":
        return SparseOperator(sp.kron(self.data, other.data, format="csr"))

    # -- conversions --------------------------------------------------------

    def to_dense(self) -> np.ndarray:
        return self.data.toarray()

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return self.data @ vec

    def expectation(self, vec: np.ndarray) -> complex:
        return complex(np.vdot(vec, self.data @ vec))

    @property
    def nnz(self) -> int:
        return self.data.nnz

    def __repr__(self):
        return f"SparseOperator(dim={self.dim}, nnz={self.nnz})"


def compose(a: SparseOperator, b: SparseOperator | complex, op: str) -> SparseOperator:
    """Generic binary/unary composition dispatcher.

    ``op`` is one of add, multiply, scale, adjoint, kron. ``adjoint`` ignores
    ``b``; ``scale`` expects a scalar for ``b``.
    """
    if op == "add":
        return a + b
    if op == "multiply":
        return a @ b
    if op == "scale":
        return a * b
    if op == "adjoint":
        return a.adjoint()
    if op == "kron":
        return a.kron(b)
    raise DomainError(f"unknown composition op {op!r}")


def identity(desc: SpaceDescriptor) -> SparseOperator:
    return SparseOperator(sp.identity(desc.dim, dtype=complex, format="csr"))


def spin_operator(desc: SpaceDescriptor, site: int, kind: str) -> SparseOperator:
    """Single-site Pauli/ladder operator embedded in the full space.

    ``site`` is 1-based; the operator acts trivially on all other factors.
    """
    if kind not in SPIN_KINDS:
        raise DomainError(f"unknown spin operator kind {kind!r}")
    if not 1 <= site <= desc.num_spins:
        raise DomainError(
            f"site {site} out of range 1..{desc.num_spins}"
        )
    left = sp.identity(2 ** (site - 1), dtype=complex, format="csr")
    right = sp.identity(
        2 ** (desc.num_spins - site) * desc.fock_dim, dtype=complex, format="csr"
    )
    m = sp.kron(sp.kron(left, _PAULI[kind]), right, format="csr")
    return SparseOperator(m, desc.dim)


def _mode_matrix(fock_dim: int, kind: str) -> sp.csr_matrix:
    n = np.arange(fock_dim)
    if kind == "number":
        return sp.diags(n.astype(complex), 0, format="csr")
    amp = np.sqrt(n[1:]).astype(complex)
    if kind == "annihilate":
        return sp.diags(amp, 1, shape=(fock_dim, fock_dim), format="csr")
    if kind == "create":
        return sp.diags(amp, -1, shape=(fock_dim, fock_dim), format="csr")
    raise DomainError(f"unknown boson operator kind {kind!r}")


def boson_operator(desc: SpaceDescriptor, kind: str) -> SparseOperator:
    """Truncated cavity ladder/number operator embedded in the full space."""
    if kind not in BOSON_KINDS:
        raise DomainError(f"unknown boson operator kind {kind!r}")
    spins = sp.identity(desc.spin_dim, dtype=complex, format="csr")
    m = sp.kron(spins, _mode_matrix(desc.fock_dim, kind), format="csr")
    return SparseOperator(m, desc.dim)
