"""Numba kernels for the master-equation right-hand side.

The RHS splits into P = (iH + A) rho, its conjugate transpose, and the
jump sum J = sum_{mn} Gamma_mn s-_m rho s+_n.  K is applied as a CSR
matrix; the jump sum exploits that every s-_m is a bit shift, so its
action is a gathered row/column add driven by precomputed index tables.
Falls back to a pure scipy implementation when numba is unavailable.
"""

from __future__ import annotations

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is installed in CI
    HAVE_NUMBA = False


if HAVE_NUMBA:

    @numba.njit(parallel=True, cache=True)
    def _csr_matmat(indptr, indices, data, rho, out):
        dim = rho.shape[0]
        for i in numba.prange(dim):
            row = out[i]
            row[:] = 0.0
            for p in range(indptr[i], indptr[i + 1]):
                v = data[p]
                src = rho[indices[p]]
                for j in range(dim):
                    row[j] += v * src[j]

    @numba.njit(parallel=True, cache=True)
    def _anti_hermitian_combine(p, out):
        # out = -p - p^dagger
        dim = p.shape[0]
        for i in numba.prange(dim):
            for j in range(dim):
                out[i, j] = -p[i, j] - np.conj(p[j, i])

    @numba.njit(parallel=True, cache=True)
    def _jump_accumulate(rho, gam, set_idx, clear_idx, bitpos, out):
        dim = rho.shape[0]
        nops = gam.shape[0]
        half = set_idx.shape[1]
        for ii in numba.prange(dim):
            for m in range(nops):
                if (ii >> bitpos[m]) & 1:
                    continue  # output row must have bit m cleared
                src_row = ii | (1 << bitpos[m])
                for n in range(nops):
                    g = gam[m, n]
                    if g == 0.0:
                        continue
                    for a in range(half):
                        out[ii, clear_idx[n, a]] += (
                            g * rho[src_row, set_idx[n, a]])

    def rhs_apply(kmat_csr, gam, set_idx, clear_idx, bitpos, rho, work, out):
        _csr_matmat(kmat_csr.indptr, kmat_csr.indices, kmat_csr.data,
                    rho, work)
        _anti_hermitian_combine(work, out)
        _jump_accumulate(rho, gam, set_idx, clear_idx, bitpos, out)
        return out

else:  # pragma: no cover

    def rhs_apply(kmat_csr, gam, set_idx, clear_idx, bitpos, rho, work, out):
        p = kmat_csr @ rho
        res = -(p + p.conj().T)
        nops = gam.shape[0]
        for m in range(nops):
            rows_set = set_idx[m]
            rows_clear = clear_idx[m]
            lowered = rho[rows_set, :]
            for n in range(nops):
                if gam[m, n] == 0.0:
                    continue
                block = lowered[:, set_idx[n]]
                res[np.ix_(rows_clear, clear_idx[n])] += gam[m, n] * block
        out[:] = res
        return out


def build_bit_tables(n: int):
    """Index tables for the bit-shift structure of the lowering operators.

    Returns (set_idx, clear_idx, bitpos): row a of set_idx[m] is the a-th
    basis index with emitter (m+1) excited, clear_idx the same index with
    it de-excited; bitpos[m] is the bit position of emitter m+1.
    """
    dim = 1 << n
    set_idx = np.empty((n, dim // 2), dtype=np.int64)
    clear_idx = np.empty((n, dim // 2), dtype=np.int64)
    bitpos = np.empty(n, dtype=np.int64)
    idx = np.arange(dim)
    for m in range(n):
        b = n - 1 - m  # emitter m+1 sits at bit n-1-m (MSB first)
        bitpos[m] = b
        rows = np.flatnonzero(idx & (1 << b))
        set_idx[m] = rows
        clear_idx[m] = rows & ~(1 << b)
    return set_idx, clear_idx, bitpos


# ---------------------------------------------------------------------------
# excitation-number blocked engine
#
# The master equation conserves the difference of excitation numbers
# between bra and ket: the Hamiltonian and the damping matrix conserve the
# count, jumps lower both sides at once.  A density matrix that starts
# block-diagonal over excitation sectors therefore stays so, and the
# blocked storage sum_k d_k^2 (with d_k = C(n, k)) holds ~18% of the full
# 4^n matrix at n = 10.  Storage is one flat complex vector with block k
# occupying out[boff[k] : boff[k] + d_k^2] in row-major local order.
# ---------------------------------------------------------------------------


class BlockLayout:
    """Permutation and index tables of the excitation-number blocks."""

    def __init__(self, n: int):
        dim = 1 << n
        idx = np.arange(dim)
        counts = np.array([bin(i).count("1") for i in range(dim)])
        self.n = n
        self.nblocks = n + 1
        self.patterns = [np.flatnonzero(counts == k) for k in range(n + 1)]
        self.bdim = np.array([len(p) for p in self.patterns], dtype=np.int64)
        self.boff = np.concatenate(
            [[0], np.cumsum(self.bdim**2)]).astype(np.int64)
        self.total = int(self.boff[-1])
        # global basis index -> (block, local index)
        self.block_of = counts.astype(np.int64)
        self.local_of = np.empty(dim, dtype=np.int64)
        for k, p in enumerate(self.patterns):
            self.local_of[p] = np.arange(len(p))

    def pack(self, rho: np.ndarray, atol: float = 1e-13):
        """Blocked copy of rho, or None if it has off-block weight."""
        flat = np.zeros(self.total, dtype=complex)
        weight = 0.0
        for k, p in enumerate(self.patterns):
            d = len(p)
            block = rho[np.ix_(p, p)]
            flat[self.boff[k]:self.boff[k] + d * d] = block.ravel()
            weight += float(np.abs(block).sum())
        total_weight = float(np.abs(rho).sum())
        if total_weight - weight > atol * max(total_weight, 1.0):
            return None
        return flat

    def unpack(self, flat: np.ndarray) -> np.ndarray:
        dim = 1 << self.n
        rho = np.zeros((dim, dim), dtype=complex)
        for k, p in enumerate(self.patterns):
            d = len(p)
            rho[np.ix_(p, p)] = flat[
                self.boff[k]:self.boff[k] + d * d].reshape(d, d)
        return rho

    def block_view(self, flat: np.ndarray, k: int) -> np.ndarray:
        d = int(self.bdim[k])
        return flat[self.boff[k]:self.boff[k] + d * d].reshape(d, d)


def build_blocked_operators(layout: BlockLayout, kmat_csr, bitpos):
    """Translate the sparse K matrix and jump structure to block tables.

    Returns a dict of flat numpy arrays consumed by the blocked kernels:
    a block-local CSR for K and, for the jump sum, per-target-row source
    tables (rp_*) and per-(block, emitter) column-pair tables (cp_*).
    """
    n = layout.n
    nops = len(bitpos)
    # --- K as block-local CSR over permuted rows (block-major order) ---
    rows_perm = np.concatenate(layout.patterns)
    kptr = [0]
    kcol = []
    kdata = []
    krow_block = []
    krow_local = []
    kc = kmat_csr.tocsr()
    for k in range(layout.nblocks):
        for i, g in enumerate(layout.patterns[k]):
            sl = slice(kc.indptr[g], kc.indptr[g + 1])
            cols_g = kc.indices[sl]
            vals = kc.data[sl]
            for cg, v in zip(cols_g, vals):
                if layout.block_of[cg] != k:
                    raise ValueError("K is not excitation-conserving")
                kcol.append(layout.local_of[cg])
                kdata.append(v)
            kptr.append(len(kcol))
            krow_block.append(k)
            krow_local.append(i)
    # --- jump source tables ---
    # target rows: permuted rows of blocks 0..n-1; sources live one block up
    rp_ptr = [0]
    rp_m = []
    rp_src = []
    for k in range(layout.nblocks):
        for p in layout.patterns[k]:
            if k + 1 < layout.nblocks:
                for m in range(nops):
                    if not (p >> bitpos[m]) & 1:
                        src = p | (1 << bitpos[m])
                        rp_m.append(m)
                        rp_src.append(layout.local_of[src])
            rp_ptr.append(len(rp_m))
    # --- column pairs per (target block, emitter n) ---
    cp_ptr = np.zeros((layout.nblocks, nops + 1), dtype=np.int64)
    cp_jj = []
    cp_src = []
    for k in range(layout.nblocks):
        cp_ptr[k, 0] = len(cp_jj)
        for m in range(nops):
            if k + 1 < layout.nblocks:
                for jj, p in enumerate(layout.patterns[k]):
                    if not (p >> bitpos[m]) & 1:
                        cp_jj.append(jj)
                        cp_src.append(layout.local_of[p | (1 << bitpos[m])])
            cp_ptr[k, m + 1] = len(cp_jj)
    return {
        "kptr": np.asarray(kptr, dtype=np.int64),
        "kcol": np.asarray(kcol, dtype=np.int64),
        "kdata": np.asarray(kdata, dtype=kmat_csr.dtype),
        "krow_block": np.asarray(krow_block, dtype=np.int64),
        "krow_local": np.asarray(krow_local, dtype=np.int64),
        "rp_ptr": np.asarray(rp_ptr, dtype=np.int64),
        "rp_m": np.asarray(rp_m, dtype=np.int64),
        "rp_src": np.asarray(rp_src, dtype=np.int64),
        "cp_ptr": cp_ptr,
        "cp_jj": np.asarray(cp_jj, dtype=np.int64),
        "cp_src": np.asarray(cp_src, dtype=np.int64),
        "rows_perm": rows_perm,
    }


if HAVE_NUMBA:

    @numba.njit(cache=True)
    def _blocked_rhs(bdim, boff, kptr, kcol, kdata, krow_block, krow_local,
                     rp_ptr, rp_m, rp_src, cp_ptr, cp_jj, cp_src, gam,
                     rho, work, out):
        nrows = krow_block.shape[0]
        # work = K rho, blockwise
        for r in range(nrows):
            k = krow_block[r]
            i = krow_local[r]
            d = bdim[k]
            base = boff[k] + i * d
            for j in range(d):
                work[base + j] = 0.0
            for p in range(kptr[r], kptr[r + 1]):
                v = kdata[p]
                src = boff[k] + kcol[p] * d
                for j in range(d):
                    work[base + j] += v * rho[src + j]
        # out = -work - work^dagger, blockwise
        nblocks = bdim.shape[0]
        for k in range(nblocks):
            d = bdim[k]
            off = boff[k]
            for i in range(d):
                for j in range(d):
                    out[off + i * d + j] = (-work[off + i * d + j]
                                            - np.conj(work[off + j * d + i]))
        # jump sum: target rows in block k get sources from block k+1
        nops = gam.shape[0]
        for r in range(nrows):
            kt = krow_block[r]
            if kt + 1 >= nblocks:
                continue
            ii = krow_local[r]
            dt_ = bdim[kt]
            ds = bdim[kt + 1]
            tbase = boff[kt] + ii * dt_
            sbase = boff[kt + 1]
            for q in range(rp_ptr[r], rp_ptr[r + 1]):
                m = rp_m[q]
                si = rp_src[q]
                srow = sbase + si * ds
                for nn in range(nops):
                    g = gam[m, nn]
                    if g == 0.0:
                        continue
                    for c in range(cp_ptr[kt, nn], cp_ptr[kt, nn + 1]):
                        out[tbase + cp_jj[c]] += g * rho[srow + cp_src[c]]

else:  # pragma: no cover

    def _blocked_rhs(bdim, boff, kptr, kcol, kdata, krow_block, krow_local,
                     rp_ptr, rp_m, rp_src, cp_ptr, cp_jj, cp_src, gam,
                     rho, work, out):
        nrows = krow_block.shape[0]
        nblocks = bdim.shape[0]
        work[:] = 0.0
        for r in range(nrows):
            k = krow_block[r]
            i = krow_local[r]
            d = bdim[k]
            base = boff[k] + i * d
            for p in range(kptr[r], kptr[r + 1]):
                src = boff[k] + kcol[p] * d
                work[base:base + d] += kdata[p] * rho[src:src + d]
        for k in range(nblocks):
            d = bdim[k]
            off = boff[k]
            blk = work[off:off + d * d].reshape(d, d)
            out[off:off + d * d] = (-blk - blk.conj().T).ravel()
        nops = gam.shape[0]
        for r in range(nrows):
            kt = krow_block[r]
            if kt + 1 >= nblocks:
                continue
            ii = krow_local[r]
            dt_ = bdim[kt]
            ds = bdim[kt + 1]
            tbase = boff[kt] + ii * dt_
            sbase = boff[kt + 1]
            for q in range(rp_ptr[r], rp_ptr[r + 1]):
                m = rp_m[q]
                srow = sbase + rp_src[q] * ds
                for nn in range(nops):
                    g = gam[m, nn]
                    if g == 0.0:
                        continue
                    cs = slice(cp_ptr[kt, nn], cp_ptr[kt, nn + 1])
                    out[tbase + cp_jj[cs]] += g * rho[srow + cp_src[cs]]


def blocked_rhs_apply(tables, bdim, boff, gam, rho_flat, work_flat,
                      out_flat):
    _blocked_rhs(bdim, boff, tables["kptr"], tables["kcol"], tables["kdata"],
                 tables["krow_block"], tables["krow_local"], tables["rp_ptr"],
                 tables["rp_m"], tables["rp_src"], tables["cp_ptr"],
                 tables["cp_jj"], tables["cp_src"], gam, rho_flat, work_flat,
                 out_flat)
    return out_flat
