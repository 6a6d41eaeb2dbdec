"""Collective Casimir-Polder force functional and force/decay maps.

The total force on an emitter chain in state rho is the negative
z-derivative of the coherent energy,

    F = - sum_n [ dW+_n <s+_n s-_n> + dW-_n <s-_n s+_n> ]
        - sum_{m>n} dWdd_sc_mn <s-_m s+_n + s-_n s+_m>,

with all derivative coefficients taken from a CouplingSet.  Forces are in
units of hbar*Gamma0*k0 throughout (attraction to the surface is
negative); the free-space pair shift carries no z dependence and never
enters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coeffs import (CouplingSet, EmitterParams, Geometry, coupling_set)
from .dicke import QuantumState, SpinOps, subradiant_basis
from .errors import QuadratureError
from .media import Medium
from .quadrature import DEFAULT_QUAD, QuadratureSpec

__all__ = [
    "force_of_state",
    "special_state_forces",
    "superradiant_force_N",
    "subradiant_force_spread",
    "force_map",
    "ForceMap",
    "SpecialStateForces",
]


def _populations(state: QuantumState) -> np.ndarray:
    """<sigma_n^+ sigma_n^-> for every emitter, from the diagonal."""
    rho_diag = (np.abs(state.vector) ** 2 if state.is_pure
                else np.diag(state.density_matrix()).real)
    n = state.n
    pops = np.empty(n)
    idx = np.arange(1 << n)
    for site in range(1, n + 1):
        mask = (idx >> (n - site)) & 1
        pops[site - 1] = rho_diag[mask == 1].sum()
    return pops


def _pair_correlators(state: QuantumState) -> np.ndarray:
    """Symmetrized <s-_m s+_n> correlator matrix (zero diagonal)."""
    n = state.n
    ops = SpinOps(n)
    corr = np.zeros((n, n))
    if state.is_pure:
        v = state.vector
        lowered = [ops.sigma_minus(k) @ v for k in range(1, n + 1)]
        for m in range(n):
            for l in range(m + 1, n):
                # <v| s-_m s+_l |v> = <s+_m v | s+_l v> with s+ = (s-)^T
                val = np.vdot(lowered[m], lowered[l])
                corr[m, l] = corr[l, m] = 2.0 * val.real
    else:
        rho = state.density_matrix()
        for m in range(n):
            sm = ops.sigma_minus(m + 1)
            for l in range(m + 1, n):
                op = sm @ ops.sigma_plus(l + 1)
                val = np.trace(op @ rho)
                corr[m, l] = corr[l, m] = 2.0 * val.real
    return corr


def force_of_state(state: QuantumState, couplings: CouplingSet) -> float:
    """Total CP force (hbar*Gamma0*k0) on the chain in the given state.

    Linear in the state; reduces to the ground-state force when no
    emitter is excited.
    """
    if state.n != couplings.n:
        raise ValueError(
            f"state has {state.n} emitters, couplings {couplings.n}")
    pops = _populations(state)
    corr = _pair_correlators(state)
    single = np.sum(couplings.domega_plus_dz * pops
                    + couplings.domega_minus_dz * (1.0 - pops))
    pair = 0.0
    for m in range(couplings.n):
        for l in range(m + 1, couplings.n):
            pair += couplings.domega_dd_sc_dz[m, l] * corr[m, l]
    return float(-(single + pair))


@dataclass(frozen=True)
class SpecialStateForces:
    """Forces (hbar*Gamma0*k0) and rates (Gamma0) of the four marker states."""

    f_ground: float
    f_excited: float
    f_sup: float
    f_sub: float
    f_inf: float
    gamma_sup: float
    gamma_sub: float
    gamma_nn: float


def special_state_forces(geometry: Geometry, medium: Medium,
                         emitter: EmitterParams,
                         quad: QuadratureSpec = DEFAULT_QUAD
                         ) -> SpecialStateForces:
    """Two-emitter forces for |gg>, |ee>, and the symmetric/antisymmetric
    single-excitation states, from full-quadrature coefficients.

    f_inf is reported as (f_ground + f_excited)/2, exact at any distance;
    the collective rates are Gamma_sup/sub = Gamma_11 +- Gamma_12.
    """
    if geometry.n != 2:
        raise ValueError("special-state forces are defined for two emitters")
    cs = coupling_set(geometry, medium, emitter, quad,
                      include_free_dd_shift=geometry.x0 > 0)
    d_minus = cs.domega_minus_dz
    d_res = cs.domega_res_dz
    d_pair = cs.domega_dd_sc_dz[0, 1]
    f_ground = -float(d_minus.sum())
    f_excited = -float((-d_minus + d_res).sum())
    f_sup = -float(0.5 * d_res.sum() + d_pair)
    f_sub = -float(0.5 * d_res.sum() - d_pair)
    f_inf = 0.5 * (f_ground + f_excited)
    g = cs.gamma_total
    gamma_sup = float(0.5 * (g[0, 0] + g[1, 1]) + g[0, 1])
    gamma_sub = float(0.5 * (g[0, 0] + g[1, 1]) - g[0, 1])
    return SpecialStateForces(f_ground, f_excited, f_sup, f_sub, f_inf,
                              gamma_sup, gamma_sub, float(g[0, 0]))


def _binomial_weight(n: int) -> float:
    """Pair-correlator weight of |N/2, 0>: 2 C(N-2, N/2-1)/C(N, N/2)."""
    return 2.0 * math.comb(n - 2, n // 2 - 1) / math.comb(n, n // 2)


def superradiant_force_N(n: int, geometry: Geometry, medium: Medium,
                         emitter: EmitterParams,
                         quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Closed-form force on the N-emitter superradiant state |N/2, 0>.

    Half-filled single-emitter resonant part plus the binomial-weighted
    sum of surface-mediated pair derivatives; agrees with the general
    functional applied to the Dicke state as an algebraic identity.
    Requires even N (half excitation per emitter).
    """
    if n % 2:
        raise ValueError("superradiant |N/2, 0> needs even N")
    if n != geometry.n:
        raise ValueError("n must match the geometry")
    cs = coupling_set(geometry, medium, emitter, quad,
                      include_free_dd_shift=geometry.x0 > 0)
    w = _binomial_weight(n)
    pair = 0.0
    for m in range(n):
        for l in range(m + 1, n):
            pair += cs.domega_dd_sc_dz[m, l]
    return float(-(0.5 * cs.domega_res_dz.sum() + w * pair))


def subradiant_force_spread(n: int, geometry: Geometry, medium: Medium,
                            emitter: EmitterParams,
                            quad: QuadratureSpec = DEFAULT_QUAD
                            ) -> list[float]:
    """Forces on the deterministic orthonormal J = 0 basis states.

    Individual values are gauge-dependent; the set (and its min/max
    envelope and sum) are physical.  Requires even N <= 8.
    """
    if n % 2 or n > 8:
        raise ValueError("subradiant spread needs even N <= 8")
    if n != geometry.n:
        raise ValueError("n must match the geometry")
    cs = coupling_set(geometry, medium, emitter, quad,
                      include_free_dd_shift=geometry.x0 > 0)
    return [force_of_state(st, cs) for st in subradiant_basis(n)]


@dataclass
class ForceMap:
    """Tabulated two-emitter forces and rates over an (x0, z0) grid.

    Grids are in units of 1/k0.  Cells where the quadrature failed hold
    NaN and are listed in ``failures`` as (i, j, message); they are never
    silently dropped.  Forces in hbar*Gamma0*k0, rates in Gamma0.
    """

    x0_grid: np.ndarray
    z0_grid: np.ndarray
    f_ground: np.ndarray
    f_excited: np.ndarray
    f_sup: np.ndarray
    f_sub: np.ndarray
    f_inf: np.ndarray
    gamma_sup: np.ndarray
    gamma_sub: np.ndarray
    gamma_nn: np.ndarray
    medium: Medium = None
    emitter: EmitterParams = None
    failures: list = field(default_factory=list)

    CSV_COLUMNS = ("x0_k0", "z0_k0", "F_g", "F_e", "F_sup", "F_sub",
                   "F_inf", "Gam_sup", "Gam_sub", "Gam_nn", "quad_err_flag")

    def rows(self):
        """Yield CSV rows in deterministic grid order (x outer, z inner)."""
        failed = {(i, j) for i, j, _ in self.failures}
        for i, x in enumerate(self.x0_grid):
            for j, z in enumerate(self.z0_grid):
                yield (x, z, self.f_ground[i, j], self.f_excited[i, j],
                       self.f_sup[i, j], self.f_sub[i, j], self.f_inf[i, j],
                       self.gamma_sup[i, j], self.gamma_sub[i, j],
                       self.gamma_nn[i, j], int((i, j) in failed))


def row_special_forces(x0_grid, z0: float, medium: Medium,
                       emitter: EmitterParams,
                       quad: QuadratureSpec = DEFAULT_QUAD
                       ) -> list[SpecialStateForces]:
    """Marker-state forces for a whole row of separations at one height.

    Sweeps share the reflection kernel of the scattering integral across
    all separations (one adaptive pass per row instead of one per point),
    which keeps dense maps minutes-scale.  Point values agree with
    :func:`special_state_forces` to quadrature accuracy.
    """
    from .coeffs import _omega_minus_cached, free_dd_decay
    from .greens import scatter_zz_real_batch

    x0_grid = np.atleast_1d(np.asarray(x0_grid, dtype=float))
    batch = np.concatenate([[0.0], x0_grid])
    vals, dvals, _err = scatter_zz_real_batch(batch, z0, medium,
                                              emitter.omega0, quad)
    dom_minus = _omega_minus_cached(z0, medium, emitter.omega0, quad, 1)
    dom_res = -3.0 * np.pi * dvals[0].real
    gam_nn = 1.0 + 6.0 * np.pi * vals[0].imag
    f_ground = -2.0 * dom_minus
    f_excited = -2.0 * (-dom_minus + dom_res)
    f_inf = 0.5 * (f_ground + f_excited)
    out = []
    for k, x in enumerate(x0_grid):
        dom_pair = -3.0 * np.pi * dvals[k + 1].real
        gam_12 = free_dd_decay(float(x)) + 6.0 * np.pi * vals[k + 1].imag
        out.append(SpecialStateForces(
            f_ground=float(f_ground), f_excited=float(f_excited),
            f_sup=float(-(dom_res + dom_pair)),
            f_sub=float(-(dom_res - dom_pair)),
            f_inf=float(f_inf),
            gamma_sup=float(gam_nn + gam_12),
            gamma_sub=float(gam_nn - gam_12),
            gamma_nn=float(gam_nn)))
    return out


def force_map(x0_grid, z0_grid, medium: Medium, emitter: EmitterParams,
              quad: QuadratureSpec = DEFAULT_QUAD,
              threads: int = 1) -> ForceMap:
    """Evaluate the two-emitter force/decay map over a dimensionless grid.

    Rows (fixed surface distance) are evaluated by the batched sweep and
    are independent; with ``threads > 1`` they go through a bounded
    thread pool (the kernels release the GIL inside numpy) while the
    output keeps deterministic grid ordering.
    """
    x0_grid = np.atleast_1d(np.asarray(x0_grid, dtype=float))
    z0_grid = np.atleast_1d(np.asarray(z0_grid, dtype=float))
    if x0_grid.size == 0 or z0_grid.size == 0:
        raise ValueError("force map needs a nonempty grid")
    shape = (len(x0_grid), len(z0_grid))
    arrays = {name: np.full(shape, np.nan) for name in
              ("f_ground", "f_excited", "f_sup", "f_sub", "f_inf",
               "gamma_sup", "gamma_sub", "gamma_nn")}
    failures = []

    def at_row(j):
        return row_special_forces(x0_grid, float(z0_grid[j]), medium,
                                  emitter, quad)

    cols = list(range(len(z0_grid)))
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda j: _guarded(at_row, j), cols))
    else:
        results = [_guarded(at_row, j) for j in cols]

    for j, res in zip(cols, results):
        if isinstance(res, str):
            failures.extend((i, j, res) for i in range(len(x0_grid)))
            continue
        for i, sf in enumerate(res):
            arrays["f_ground"][i, j] = sf.f_ground
            arrays["f_excited"][i, j] = sf.f_excited
            arrays["f_sup"][i, j] = sf.f_sup
            arrays["f_sub"][i, j] = sf.f_sub
            arrays["f_inf"][i, j] = sf.f_inf
            arrays["gamma_sup"][i, j] = sf.gamma_sup
            arrays["gamma_sub"][i, j] = sf.gamma_sub
            arrays["gamma_nn"][i, j] = sf.gamma_nn
    return ForceMap(x0_grid=x0_grid, z0_grid=z0_grid, medium=medium,
                    emitter=emitter, failures=failures, **arrays)


def _guarded(fn, *args):
    try:
        return fn(*args)
    except QuadratureError as exc:
        return f"quadrature: {exc} (achieved {exc.achieved_error:.2e})"
