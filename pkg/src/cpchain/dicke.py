"""Product-basis spin operators, collective states, and the subradiant sector.

Basis convention: the 2^N product basis is indexed by bit patterns with
emitter 1 as the most significant bit, |e> = 1 and |g> = 0.  States are
dense complex vectors (pure) or matrices (mixed); operators are scipy
sparse matrices with one nonzero per row.
"""

from __future__ import annotations

from functools import lru_cache
from math import comb

import numpy as np
import scipy.sparse as sp

__all__ = [
    "SpinOps",
    "QuantumState",
    "dicke_state",
    "pair_correlator",
    "subradiant_basis",
    "subradiant_dimension",
]

_MAX_EMITTERS = 12


def _check_n(n: int):
    if not 1 <= n <= _MAX_EMITTERS:
        raise ValueError(f"emitter number must be in 1..{_MAX_EMITTERS}")


def _bit(n_emitters: int, site: int) -> int:
    """Bit position of emitter ``site`` (1-based, MSB first)."""
    if not 1 <= site <= n_emitters:
        raise ValueError(f"emitter index {site} outside 1..{n_emitters}")
    return n_emitters - site


class SpinOps:
    """Ladder and collective angular-momentum operators for N emitters.

    Sparse matrices over the 2^N product basis.  sigma_minus(n) lowers
    emitter n; j_z counts half the excitation imbalance so that the
    collective eigenvalues follow the usual |J, M> conventions.
    """

    def __init__(self, n: int):
        _check_n(n)
        self.n = n
        self.dim = 1 << n

    @lru_cache(maxsize=None)
    def sigma_minus(self, site: int) -> sp.csr_matrix:
        b = _bit(self.n, site)
        src = np.flatnonzero(np.arange(self.dim) & (1 << b))
        dst = src & ~(1 << b)
        data = np.ones(len(src))
        return sp.csr_matrix((data, (dst, src)), shape=(self.dim, self.dim))

    def sigma_plus(self, site: int) -> sp.csr_matrix:
        return self.sigma_minus(site).T.tocsr()

    def number_op(self, site: int) -> sp.csr_matrix:
        diag = ((np.arange(self.dim) >> _bit(self.n, site)) & 1).astype(float)
        return sp.diags(diag).tocsr()

    @property
    def j_minus(self) -> sp.csr_matrix:
        out = sp.csr_matrix((self.dim, self.dim))
        for site in range(1, self.n + 1):
            out = out + self.sigma_minus(site)
        return out.tocsr()

    @property
    def j_plus(self) -> sp.csr_matrix:
        return self.j_minus.T.tocsr()

    @property
    def j_z(self) -> sp.csr_matrix:
        counts = np.array([bin(i).count("1") for i in range(self.dim)],
                          dtype=float)
        return sp.diags(counts - self.n / 2.0).tocsr()

    @property
    def j_x(self) -> sp.csr_matrix:
        return (0.5 * (self.j_plus + self.j_minus)).tocsr()

    @property
    def j_y(self) -> sp.csr_matrix:
        return (-0.5j * (self.j_plus - self.j_minus)).tocsr()

    @property
    def j_squared(self) -> sp.csr_matrix:
        jm, jz = self.j_minus, self.j_z
        return (jm.T @ jm + jz @ jz + jz).tocsr()

    def excitation_sector(self, n_excited: int) -> np.ndarray:
        """Basis indices with the given number of excited emitters."""
        counts = np.array([bin(i).count("1") for i in range(self.dim)])
        return np.flatnonzero(counts == n_excited)


class QuantumState:
    """Pure state (amplitude vector) or density matrix over 2^N.

    Validates the spec invariants on construction: unit norm/trace,
    Hermiticity, and positive semidefiniteness within tolerance.
    """

    def __init__(self, data, n: int | None = None, validate: bool = True):
        arr = np.asarray(data, dtype=complex)
        if arr.ndim == 1:
            dim = arr.shape[0]
        elif arr.ndim == 2 and arr.shape[0] == arr.shape[1]:
            dim = arr.shape[0]
        else:
            raise ValueError("state must be a vector or a square matrix")
        n_inferred = int(round(np.log2(dim)))
        if 1 << n_inferred != dim:
            raise ValueError("state dimension must be a power of two")
        if n is not None and n != n_inferred:
            raise ValueError("declared emitter count does not match data")
        self.n = n_inferred
        self.dim = dim
        self._data = arr
        if validate:
            self.validate()

    @property
    def is_pure(self) -> bool:
        return self._data.ndim == 1

    @property
    def vector(self) -> np.ndarray:
        if not self.is_pure:
            raise ValueError("state is a density matrix, not a vector")
        return self._data

    def density_matrix(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self._data, self._data.conj())
        return self._data

    def validate(self, tol: float = 1e-12, psd_tol: float = 1e-10):
        if self.is_pure:
            norm = np.linalg.norm(self._data)
            if abs(norm - 1.0) > tol:
                raise ValueError(f"state norm {norm} deviates from 1")
        else:
            rho = self._data
            tr = np.trace(rho).real
            if abs(tr - 1.0) > tol:
                raise ValueError(f"trace {tr} deviates from 1")
            if np.abs(rho - rho.conj().T).max() > tol:
                raise ValueError("density matrix is not Hermitian")
            lam = np.linalg.eigvalsh(rho)
            if lam.min() < -psd_tol:
                raise ValueError(f"negative eigenvalue {lam.min():.2e}")
        return self

    def expectation(self, op) -> complex:
        if self.is_pure:
            v = self._data
            return complex(np.vdot(v, op @ v))
        return complex(np.trace(op @ self._data))

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_bits(cls, pattern: str) -> "QuantumState":
        """Product state from a string like "eg", emitter 1 first."""
        n = len(pattern)
        _check_n(n)
        idx = 0
        for ch in pattern:
            idx = (idx << 1) | (1 if ch == "e" else 0)
        vec = np.zeros(1 << n, dtype=complex)
        vec[idx] = 1.0
        return cls(vec)

    @classmethod
    def all_ground(cls, n: int) -> "QuantumState":
        return cls.from_bits("g" * n)

    @classmethod
    def all_excited(cls, n: int) -> "QuantumState":
        return cls.from_bits("e" * n)

    @classmethod
    def shared_excitation(cls, theta: float, phi: float) -> "QuantumState":
        """cos(theta)|eg> + e^{i phi} sin(theta)|ge> for two emitters."""
        vec = np.zeros(4, dtype=complex)
        vec[0b10] = np.cos(theta)
        vec[0b01] = np.exp(1j * phi) * np.sin(theta)
        return cls(vec)

    @classmethod
    def maximally_mixed(cls, n: int) -> "QuantumState":
        _check_n(n)
        dim = 1 << n
        return cls(np.eye(dim, dtype=complex) / dim)


def dicke_state(n: int, j: float, m: float) -> QuantumState:
    """Symmetric Dicke state |J, M> for J = N/2.

    Equal-amplitude superposition of all product states with J + M
    excitations.  Sectors with J < N/2 are degenerate and gauge-dependent;
    use :func:`subradiant_basis` for the J = 0 sector.
    """
    _check_n(n)
    if abs(j - n / 2.0) > 1e-12:
        raise ValueError("only the symmetric ladder J = N/2 is a unique "
                         "state; use subradiant_basis for J = 0")
    n_exc = m + j
    if abs(n_exc - round(n_exc)) > 1e-12 or not 0 <= round(n_exc) <= n:
        raise ValueError(f"M = {m} incompatible with J = {j}")
    n_exc = int(round(n_exc))
    ops = SpinOps(n)
    idx = ops.excitation_sector(n_exc)
    vec = np.zeros(1 << n, dtype=complex)
    vec[idx] = 1.0 / np.sqrt(len(idx))
    return QuantumState(vec)


def pair_correlator(state: QuantumState, m: int, n: int) -> float:
    """<sigma_m^- sigma_n^+ + sigma_n^- sigma_m^+> for distinct emitters.

    Real by Hermiticity of the symmetrized pair operator; bounded by 1 in
    magnitude.  This is the weight of the surface-mediated pair term in
    the collective force.
    """
    if m == n:
        raise ValueError("pair correlator needs two distinct emitters")
    ops = SpinOps(state.n)
    op = ops.sigma_minus(m) @ ops.sigma_plus(n)
    val = state.expectation(op)
    return float(2.0 * val.real)


def subradiant_dimension(n: int) -> int:
    """Degeneracy of the J = 0 sector: N! / ((N/2 + 1)! (N/2)!)."""
    if n % 2:
        raise ValueError("odd emitter numbers have no J = 0 sector")
    half = n // 2
    return comb(n, half) - comb(n, half - 1)


def subradiant_basis(n: int) -> list[QuantumState]:
    """Deterministic orthonormal basis of the J = 0 (subradiant) sector.

    The sector is the kernel of J^- restricted to the zero-magnetization
    block (a state there annihilated by J^- must have J = -M = 0).  The
    kernel is extracted through its orthogonal projector and then
    orthonormalized by a Gram-Schmidt sweep in fixed basis order, so the
    returned gauge is reproducible across runs and platforms.  Individual
    basis states are gauge-dependent; only the spanned subspace (and
    traces over it) are physical.
    """
    _check_n(n)
    d_expect = subradiant_dimension(n)
    ops = SpinOps(n)
    rows = ops.excitation_sector(n // 2 - 1)
    cols = ops.excitation_sector(n // 2)
    block = ops.j_minus.toarray()[np.ix_(rows, cols)]
    # Orthogonal projector onto ker(block): unique, gauge-free.
    u, s, vh = np.linalg.svd(block)
    rank = int((s > 1e-10 * s[0]).sum())
    null_rows = vh[rank:]
    if null_rows.shape[0] != d_expect:
        raise RuntimeError("unexpected subradiant dimension from SVD")
    proj = null_rows.conj().T @ null_rows
    # Gram-Schmidt over the projector columns in fixed order.
    basis = []
    for col in range(proj.shape[1]):
        v = proj[:, col].copy()
        for b in basis:
            v -= b * (b.conj() @ v)
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            basis.append(v / norm)
        if len(basis) == d_expect:
            break
    if len(basis) != d_expect:
        raise RuntimeError("Gram-Schmidt failed to span the kernel")
    states = []
    for v in basis:
        full = np.zeros(1 << n, dtype=complex)
        full[cols] = v
        states.append(QuantumState(full))
    return states
