"""Master-equation coefficients for a chain of emitters above a half-space.

Assembles the single-emitter level shifts (broadband ground-state shift,
resonant excited-state shift), the pairwise coherent dipole-dipole shifts
and dissipative couplings (split into free-space and surface-scattered
parts), their derivatives with respect to the surface distance, and the
non-retarded closed forms.

Unit conventions (the package core is dimensionless):

* shifts and rates are returned in units of the free-space decay rate
  Gamma0 of a single emitter;
* ``z`` derivatives are with respect to k0*z0 (surface distance in units
  of 1/k0), so forces in units of hbar*Gamma0*k0 are minus these
  derivatives weighted by expectation values;
* geometry and emitter parameters carry SI values and own the conversion
  factors.

All dipoles are aligned along z (perpendicular to the surface), so only
the zz component of the Green's tensors enters any coefficient.
"""

from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.constants import c, epsilon_0, hbar
from scipy.special import j0

from .errors import ResonanceError, SingularityError
from .greens import scatter_zz_imag, scatter_zz_real
from .media import Medium, image_factor
from .quadrature import DEFAULT_QUAD, QuadratureSpec, integrate

__all__ = [
    "EmitterParams",
    "Geometry",
    "CouplingSet",
    "coupling_set",
    "omega_minus",
    "omega_res",
    "omega_dd",
    "gamma",
    "nonretarded_closed_forms",
    "cooperativity_f",
    "image_kernel_g",
]


@dataclass(frozen=True)
class EmitterParams:
    """Two-level emitter: transition frequency and free-space decay rate.

    The dipole moment is derived from Gamma0 through the free-space decay
    formula Gamma0 = omega0^3 d0^2 / (3 pi eps0 hbar c^3); its orientation
    is fixed along z.
    """

    omega0: float  # rad/s
    gamma0: float  # 1/s

    def __post_init__(self):
        if self.omega0 <= 0 or self.gamma0 <= 0:
            raise ValueError("omega0 and gamma0 must be positive")

    @classmethod
    def from_wavelength(cls, lambda0: float, lifetime: float | None = None,
                        gamma0: float | None = None) -> "EmitterParams":
        if (lifetime is None) == (gamma0 is None):
            raise ValueError("pass exactly one of lifetime= or gamma0=")
        omega0 = 2.0 * np.pi * c / lambda0
        return cls(omega0, gamma0 if gamma0 is not None else 1.0 / lifetime)

    @property
    def k0(self) -> float:
        return self.omega0 / c

    @property
    def lambda0(self) -> float:
        return 2.0 * np.pi * c / self.omega0

    @property
    def dipole_moment(self) -> float:
        """|d0| in C*m, from the free-space decay rate."""
        return math.sqrt(
            3.0 * np.pi * epsilon_0 * hbar * c**3 * self.gamma0
            / self.omega0**3
        )

    @property
    def force_unit(self) -> float:
        """hbar * Gamma0 * k0 in newtons."""
        return hbar * self.gamma0 * self.k0


@dataclass(frozen=True)
class Geometry:
    """Linear chain of n emitters along x at constant height z0.

    x0 is the nearest-neighbor spacing and z0 the surface distance, both
    in meters; k0 fixes the dimensionless versions.
    """

    n: int
    x0: float
    z0: float
    k0: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one emitter")
        if self.z0 <= 0:
            raise ValueError("z0 must be positive (chain above the surface)")
        if self.x0 < 0:
            raise ValueError("x0 must be nonnegative")
        if self.k0 <= 0:
            raise ValueError("k0 must be positive")

    @classmethod
    def from_dimensionless(cls, n: int, x0_k0: float, z0_k0: float,
                           k0: float) -> "Geometry":
        return cls(n, x0_k0 / k0, z0_k0 / k0, k0)

    @property
    def x0_k0(self) -> float:
        return self.k0 * self.x0

    @property
    def z0_k0(self) -> float:
        return self.k0 * self.z0

    def positions_k0(self) -> np.ndarray:
        """(n, 3) emitter positions in units of 1/k0."""
        pos = np.zeros((self.n, 3))
        pos[:, 0] = self.x0_k0 * np.arange(self.n)
        pos[:, 2] = self.z0_k0
        return pos


# ---------------------------------------------------------------------------
# free-space pair coefficients (closed forms, z-dipoles, separation along x)
# ---------------------------------------------------------------------------

def free_dd_shift(u: float) -> float:
    """Free-space dipole-dipole shift / Gamma0 at separation u = k0*x.

    Divergent ~ u^-3 as u -> 0; the caller rejects u = 0.
    """
    if u <= 0:
        raise SingularityError("free-space dipole-dipole shift diverges "
                               "at zero separation")
    return 0.75 * ((1.0 - u * u) * np.cos(u) + u * np.sin(u)) / u**3


def free_dd_decay(u: float) -> float:
    """Free-space cross-decay / Gamma0 at separation u = k0*x (-> 1 at u=0).

    The closed form cancels catastrophically below u ~ 0.1, where the
    Taylor series is exact to machine precision instead.
    """
    if u < 0.1:
        u2 = u * u
        return 1.0 - u2 / 5.0 + 3.0 * u2 * u2 / 280.0 - u2**3 / 3780.0
    return 1.5 * (u * np.cos(u) - (1.0 - u * u) * np.sin(u)) / u**3


# ---------------------------------------------------------------------------
# broadband (imaginary-axis) ground-state shift
# ---------------------------------------------------------------------------

@lru_cache(maxsize=512)
def _omega_minus_cached(z0_k0: float, medium: Medium, omega0: float,
                        quad: QuadratureSpec, dz_order: int) -> float:
    """Ground-state shift / Gamma0 (or its d/d(k0 z0) for dz_order=1).

    Nested quadrature: outer imaginary frequency with the compactifying
    substitution xi = omega0 * tan(u), inner transverse momentum handled
    by the Green's-tensor tail integral with a 10x tighter tolerance.
    """
    if medium.is_vacuum:
        return 0.0
    inner_quad = QuadratureSpec(
        rel_tol=quad.rel_tol * 0.1,
        abs_tol=quad.abs_tol * 0.1,
        max_panels=quad.max_panels,
        tail_mult=quad.tail_mult,
    )
    # stop where the e^{-2 s z0} envelope makes the inner integral negligible
    s_max = quad.tail_mult / (2.0 * z0_k0)
    u_max = math.atan(s_max)

    def outer(u_arr):
        # xi = omega0 * tan(u): the sec^2 Jacobian cancels the
        # xi^2/(xi^2 + omega0^2) weight, leaving s^2 * Gzz(i s).
        out = np.empty_like(u_arr)
        for i, u in enumerate(u_arr):
            s = math.tan(u)
            gzz, _ = scatter_zz_imag(0.0, z0_k0, s, medium, omega0,
                                     inner_quad, dz0_order=dz_order)
            out[i] = s * s * gzz.real
        return out

    val, _err = integrate(outer, 0.0, u_max, quad)
    return 3.0 * float(val)


def omega_minus(n: int, geometry: Geometry, medium: Medium,
                emitter: EmitterParams,
                quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Broadband CP shift of the ground state, in units of Gamma0.

    Identical for every emitter of the constant-height chain; ``n`` is
    validated against the geometry.  Negative for a metal (attraction).
    """
    _check_index(n, geometry)
    return _omega_minus_cached(geometry.z0_k0, medium, emitter.omega0,
                               quad, 0)


def _check_index(n, geometry):
    if not 1 <= n <= geometry.n:
        raise ValueError(f"emitter index {n} outside 1..{geometry.n}")


def omega_res(n: int, geometry: Geometry, medium: Medium,
              emitter: EmitterParams,
              quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Resonant CP shift of the excited state, in units of Gamma0."""
    _check_index(n, geometry)
    gzz, _ = scatter_zz_real(0.0, geometry.z0_k0, medium, emitter.omega0,
                             quad)
    return -3.0 * np.pi * gzz.real


def omega_dd(m: int, n: int, geometry: Geometry, medium: Medium,
             emitter: EmitterParams,
             quad: QuadratureSpec = DEFAULT_QUAD) -> tuple[float, float]:
    """Resonant dipole-dipole shift (free, scattered), units of Gamma0.

    The free part diverges at coincident emitters and is independent of
    z0; the scattered part tends continuously to the single-emitter
    resonant shift as the separation vanishes.
    """
    _check_index(m, geometry)
    _check_index(n, geometry)
    if m == n:
        raise ValueError("dipole-dipole shift needs two distinct emitters")
    u = abs(m - n) * geometry.x0_k0
    gzz, _ = scatter_zz_real(u, geometry.z0_k0, medium, emitter.omega0, quad)
    return free_dd_shift(u), -3.0 * np.pi * gzz.real


def gamma(m: int, n: int, geometry: Geometry, medium: Medium,
          emitter: EmitterParams,
          quad: QuadratureSpec = DEFAULT_QUAD) -> tuple[float, float]:
    """Dissipative coupling (free, scattered), units of Gamma0.

    The diagonal m = n gives the single-emitter rates (free part exactly
    1).  The total matrix over all pairs is symmetric positive
    semidefinite, as required for a valid Lindblad generator.
    """
    _check_index(m, geometry)
    _check_index(n, geometry)
    u = abs(m - n) * geometry.x0_k0
    gzz, _ = scatter_zz_real(u, geometry.z0_k0, medium, emitter.omega0, quad)
    return free_dd_decay(u), 6.0 * np.pi * gzz.imag


# ---------------------------------------------------------------------------
# coupling-set assembly
# ---------------------------------------------------------------------------

@dataclass
class CouplingSet:
    """All master-equation coefficients for one (geometry, medium, emitter).

    Arrays are in units of Gamma0; ``d*_dz`` arrays are derivatives with
    respect to k0*z0.  Pair matrices are symmetric with the diagonal of
    ``omega_dd_*`` unused (zero).  ``quad_error`` is the largest quadrature
    error estimate encountered during assembly.
    """

    geometry: Geometry
    medium: Medium
    emitter: EmitterParams
    omega_minus: np.ndarray          # (n,)
    omega_res: np.ndarray            # (n,)
    domega_minus_dz: np.ndarray      # (n,)
    domega_res_dz: np.ndarray        # (n,)
    omega_dd_free: np.ndarray        # (n, n)
    omega_dd_sc: np.ndarray          # (n, n)
    domega_dd_sc_dz: np.ndarray      # (n, n)
    gamma_free: np.ndarray           # (n, n)
    gamma_sc: np.ndarray             # (n, n)
    dgamma_sc_dz: np.ndarray         # (n, n)
    quad_error: float = 0.0

    @property
    def n(self) -> int:
        return self.geometry.n

    @property
    def omega_plus(self) -> np.ndarray:
        return -self.omega_minus + self.omega_res

    @property
    def domega_plus_dz(self) -> np.ndarray:
        return -self.domega_minus_dz + self.domega_res_dz

    @property
    def gamma_total(self) -> np.ndarray:
        return self.gamma_free + self.gamma_sc

    @property
    def omega_dd_total(self) -> np.ndarray:
        return self.omega_dd_free + self.omega_dd_sc

    @property
    def domega_dd_free_dz(self) -> np.ndarray:
        # the free-space pair shift carries no z dependence
        return np.zeros_like(self.omega_dd_free)

    @property
    def dgamma_free_dz(self) -> np.ndarray:
        return np.zeros_like(self.gamma_free)

    def gamma_eigvals(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.gamma_total)

    def check_psd(self, tol: float = 1e-10) -> None:
        lam = self.gamma_eigvals()
        if lam.min() < -tol * max(lam.max(), 1.0):
            raise ValueError(
                f"dissipation matrix has negative eigenvalue {lam.min():.3e}"
            )

    def zero_cross_couplings(self) -> "CouplingSet":
        """Copy with all m != n couplings removed (incoherent reference)."""
        def diag_only(a):
            return np.diag(np.diag(a))
        return CouplingSet(
            geometry=self.geometry, medium=self.medium, emitter=self.emitter,
            omega_minus=self.omega_minus.copy(),
            omega_res=self.omega_res.copy(),
            domega_minus_dz=self.domega_minus_dz.copy(),
            domega_res_dz=self.domega_res_dz.copy(),
            omega_dd_free=np.zeros_like(self.omega_dd_free),
            omega_dd_sc=np.zeros_like(self.omega_dd_sc),
            domega_dd_sc_dz=self.domega_dd_sc_dz.copy(),
            gamma_free=diag_only(self.gamma_free),
            gamma_sc=diag_only(self.gamma_sc),
            dgamma_sc_dz=self.dgamma_sc_dz.copy(),
            quad_error=self.quad_error,
        )

    def without_free_dd_shift(self) -> "CouplingSet":
        """Copy with the free-space coherent pair shift removed.

        At nanometer spacings the free-space dipole-dipole shift reaches
        ~1e6 Gamma0; it enters no force (no z dependence) but its
        site-to-site spread dephases the collective cascade and makes the
        coherent part of the master equation numerically stiff.  The
        dissipative free-space couplings and every surface term are kept.
        """
        return dataclasses.replace(
            self, omega_dd_free=np.zeros_like(self.omega_dd_free))

    def to_json_dict(self) -> dict:
        def arr(a):
            return np.asarray(a).tolist()
        return {
            "units": {
                "rates_and_shifts": "Gamma0",
                "z_derivatives": "Gamma0 per (k0 z0)",
                "gamma0_si": self.emitter.gamma0,
                "omega0_si": self.emitter.omega0,
                "k0_si": self.emitter.k0,
                "force_unit_newton": self.emitter.force_unit,
            },
            "geometry": {
                "n": self.geometry.n, "x0_m": self.geometry.x0,
                "z0_m": self.geometry.z0, "x0_k0": self.geometry.x0_k0,
                "z0_k0": self.geometry.z0_k0,
            },
            "medium": {
                "plasma_frequency": self.medium.plasma_frequency,
                "loss_rate": self.medium.loss_rate,
                "permeability": self.medium.permeability,
            },
            "omega_minus": arr(self.omega_minus),
            "omega_plus": arr(self.omega_plus),
            "omega_res": arr(self.omega_res),
            "domega_minus_dz": arr(self.domega_minus_dz),
            "domega_res_dz": arr(self.domega_res_dz),
            "domega_plus_dz": arr(self.domega_plus_dz),
            "omega_dd_free": arr(self.omega_dd_free),
            "omega_dd_sc": arr(self.omega_dd_sc),
            "domega_dd_sc_dz": arr(self.domega_dd_sc_dz),
            "gamma_free": arr(self.gamma_free),
            "gamma_sc": arr(self.gamma_sc),
            "dgamma_sc_dz": arr(self.dgamma_sc_dz),
            "gamma_eigenvalues": arr(self.gamma_eigvals()),
            "quad_error": self.quad_error,
        }


_coupling_cache: dict = {}


def coupling_set(geometry: Geometry, medium: Medium, emitter: EmitterParams,
                 quad: QuadratureSpec = DEFAULT_QUAD,
                 include_free_dd_shift: bool = True) -> CouplingSet:
    """Build (or fetch from cache) the full coefficient set.

    ``include_free_dd_shift=False`` leaves the divergence-prone free-space
    coherent pair shift out (needed for x0 = 0 chains, where it has no
    finite value; all other coefficients are regular there).

    The cache is keyed by the frozen argument dataclasses; concurrent
    readers are safe under the GIL, sweeps re-enter the cache per point.
    """
    key = (geometry, medium, emitter, quad, include_free_dd_shift)
    hit = _coupling_cache.get(key)
    if hit is not None:
        return hit

    n = geometry.n
    z0 = geometry.z0_k0
    x0 = geometry.x0_k0
    w0 = emitter.omega0
    max_err = 0.0

    om_minus = _omega_minus_cached(z0, medium, w0, quad, 0)
    dom_minus = _omega_minus_cached(z0, medium, w0, quad, 1)

    # distinct lateral separations |m - n| * x0
    seps = np.arange(n) * x0
    om_sc = np.empty(n)
    dom_sc = np.empty(n)
    gam_sc = np.empty(n)
    dgam_sc = np.empty(n)
    for k, u in enumerate(seps):
        val, err = scatter_zz_real(float(u), z0, medium, w0, quad)
        dval, derr = scatter_zz_real(float(u), z0, medium, w0, quad,
                                     dz0_order=1)
        om_sc[k] = -3.0 * np.pi * val.real
        dom_sc[k] = -3.0 * np.pi * dval.real
        gam_sc[k] = 6.0 * np.pi * val.imag
        dgam_sc[k] = 6.0 * np.pi * dval.imag
        max_err = max(max_err, err, derr)

    idx = np.abs(np.subtract.outer(np.arange(n), np.arange(n)))
    omega_dd_sc = om_sc[idx]
    domega_dd_sc = dom_sc[idx]
    np.fill_diagonal(omega_dd_sc, 0.0)
    np.fill_diagonal(domega_dd_sc, 0.0)
    gamma_sc = gam_sc[idx]
    dgamma_sc = dgam_sc[idx]

    omega_dd_free = np.zeros((n, n))
    gamma_free = np.eye(n)
    for m in range(n):
        for l in range(m + 1, n):
            u = (l - m) * x0
            gamma_free[m, l] = gamma_free[l, m] = free_dd_decay(u)
            if include_free_dd_shift:
                omega_dd_free[m, l] = omega_dd_free[l, m] = free_dd_shift(u)

    cs = CouplingSet(
        geometry=geometry, medium=medium, emitter=emitter,
        omega_minus=np.full(n, om_minus),
        omega_res=np.full(n, om_sc[0]),
        domega_minus_dz=np.full(n, dom_minus),
        domega_res_dz=np.full(n, dom_sc[0]),
        omega_dd_free=omega_dd_free,
        omega_dd_sc=omega_dd_sc,
        domega_dd_sc_dz=domega_dd_sc,
        gamma_free=gamma_free,
        gamma_sc=gamma_sc,
        dgamma_sc_dz=dgamma_sc,
        quad_error=max_err,
    )
    _coupling_cache[key] = cs
    return cs


# ---------------------------------------------------------------------------
# non-retarded closed forms
# ---------------------------------------------------------------------------

def cooperativity_f(x0_k0: float, z0_k0: float,
                    quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Geometric cooperativity factor of the surface-mediated pair shift.

    f = (8 z^4 / 3) * Int_0^inf dk k (k^2+1) e^{-2kz} J0(x sqrt(k^2+1));
    f -> 1 + (2/3) z^2 for coincident emitters, f -> 0 for far-separated
    ones.  Evaluated by direct 1-D quadrature of the definition.
    """
    z = z0_k0

    def integrand(u):
        k = u / (2.0 * z)
        return (k * (k * k + 1.0) * np.exp(-u)
                * j0(x0_k0 * np.sqrt(k * k + 1.0)) / (2.0 * z))

    val, _ = integrate(integrand, 0.0, quad.tail_mult, quad)
    return (8.0 * z**4 / 3.0) * float(val)


def image_kernel_g(x0_k0: float, z0_k0: float,
                   quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """Near-field kernel g = Int_0^inf dk (1+k^2) e^{-2kz} J0(x sqrt(1+k^2)).

    Carries the 1/(4 z^3) scale of the image dipole; the non-retarded
    cross-emitter coefficients are proportional to it.
    """
    z = z0_k0

    def integrand(u):
        k = u / (2.0 * z)
        return ((1.0 + k * k) * np.exp(-u)
                * j0(x0_k0 * np.sqrt(1.0 + k * k)) / (2.0 * z))

    val, _ = integrate(integrand, 0.0, quad.tail_mult, quad)
    return float(val)


@dataclass(frozen=True)
class NearFieldForms:
    """Non-retarded closed forms, forces in hbar*Gamma0*k0, rates in Gamma0.

    ``f_ground``/``f_excited`` are totals over the chain; ``f_inf`` is the
    large-separation asymptote of the single-shared-excitation states
    (equal to (f_ground + f_excited)/2 for two emitters).
    """

    f_ground: float
    f_excited: float
    f_inf: float
    f_coop: float
    g_kernel: float
    gamma_nn_sc: float
    gamma_mn_sc: float


def nonretarded_closed_forms(geometry: Geometry, medium: Medium,
                             emitter: EmitterParams,
                             quad: QuadratureSpec = DEFAULT_QUAD
                             ) -> NearFieldForms:
    """Near-field limits of forces and rates (valid for k0*z0 << 1).

    The force closed forms drop the Drude loss rate (plasmon-pole form);
    the decay closed forms keep the complex image factor.  Evaluation at
    the surface-plasmon pole (plasma frequency near sqrt(2)*omega0) raises
    ResonanceError; distances above k0*z0 = 0.3 trigger a warning.
    """
    z = geometry.z0_k0
    x = geometry.x0_k0
    if z > 0.3:
        warnings.warn("non-retarded closed forms degrade above k0*z0 ~ 0.3",
                      stacklevel=2)
    W = medium.plasma_frequency / emitter.omega0
    if abs(W * W - 2.0) < 0.05 * max(W * W, 2.0):
        raise ResonanceError(
            "plasma frequency within 5% of the surface-plasmon pole "
            "(image factor diverges)"
        )
    n = geometry.n
    f_ground = -(9.0 * n / 32.0) * (W / (W + math.sqrt(2.0))) / z**4
    f_excited = -(9.0 * n / 32.0) * (W / (W - math.sqrt(2.0))) / z**4
    f_inf = -(9.0 / 16.0) * (W * W / (W * W - 2.0)) / z**4
    f_coop = cooperativity_f(x, z, quad)
    g_kernel = image_kernel_g(x, z, quad)
    img = image_factor(medium, omega=emitter.omega0)
    gamma_nn_sc = (3.0 / (8.0 * z**3)) * img.imag
    gamma_mn_sc = 1.5 * img.imag * g_kernel
    return NearFieldForms(f_ground, f_excited, f_inf, f_coop, g_kernel,
                          gamma_nn_sc, gamma_mn_sc)
