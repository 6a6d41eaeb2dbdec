"""Dyadic Green's tensors of the planar half-space.

Free-space tensor in closed form; scattering (surface-reflected) tensor as
a single transverse-momentum integral, evaluated on the imaginary axis
(for broadband ground-state shifts) and on the real axis (for resonant
shifts and decay rates).

Unit conventions, used consistently by every function here:

* positions are dimensionless, measured in units of 1/k0 = c/omega0;
* frequency arguments ``omega`` / ``xi`` are measured in units of omega0,
  where ``omega0`` (rad/s, passed alongside the medium) sets the SI scale
  at which the material response is evaluated;
* returned tensors are G/k0, i.e. the SI tensor divided by k0.

With these conventions the master-equation coefficients reduce to
Omega_res/Gamma0 = -3*pi*Re Gzz and Gamma/Gamma0 = 6*pi*Im Gzz.

The real-frequency scattering tensor is the analytic continuation of the
imaginary-axis integral: the vacuum-side decay constant kappa runs over
[0, inf) in the evanescent sector and over -i*[0, omega] (outgoing phase
e^{i k_z Z}) in the propagating sector.  The branch is validated against
the perfect-conductor standing-wave and image-dipole limits in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import j0, j1, jv

from .errors import GeometryError, SingularityError
from .media import Medium, fresnel
from .quadrature import DEFAULT_QUAD, QuadratureSpec, integrate

__all__ = [
    "DyadicTensor",
    "greens_free",
    "greens_scatter_imag",
    "greens_scatter_real",
    "greens_scatter_dz",
]

_COINCIDENT = 1e-12


@dataclass
class DyadicTensor:
    """3x3 complex tensor plus its evaluation metadata.

    ``matrix`` is G/k0 (dimensionless).  ``freq`` is the frequency in
    units of omega0 and ``axis`` records which axis it lives on.  ``part``
    is one of "free", "scattering", "total".  ``error`` is the quadrature
    error estimate (0 for closed forms).
    """

    matrix: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    freq: float
    axis: str
    part: str
    error: float = 0.0
    dz_order: int = 0

    def zz(self) -> complex:
        return complex(self.matrix[2, 2])


def _g_poly(chi):
    return 1.0 + chi + chi * chi


def _h_poly(chi):
    return 3.0 + 3.0 * chi + chi * chi


def greens_free(r1, r2, omega: float | None = None, xi: float | None = None,
                part: str = "full") -> DyadicTensor:
    """Free-space dyadic Green's tensor (closed form).

    Positions in units of 1/k0, frequency in units of omega0.  At
    coincident points only the real-frequency imaginary part is finite;
    request it with ``part="imag"`` (returns i * (omega/6pi) * identity).
    Any other coincident query raises SingularityError.
    """
    if (omega is None) == (xi is None):
        raise ValueError("pass exactly one of omega= or xi=")
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    d = r1 - r2
    r = float(np.linalg.norm(d))
    freq = float(xi if omega is None else omega)
    axis = "imag" if omega is None else "real"
    if freq <= 0:
        raise ValueError("frequency argument must be positive")
    if r < _COINCIDENT:
        if axis == "real" and part == "imag":
            mat = 1j * (freq / (6.0 * np.pi)) * np.eye(3, dtype=complex)
            return DyadicTensor(mat, r1, r2, freq, axis, "free")
        raise SingularityError(
            "free-space tensor diverges at coincident points; only the "
            "imaginary part at real frequency is defined (part='imag')"
        )
    # q r = chi: q = xi on the imaginary axis, -i*omega on the real axis.
    q = freq if axis == "imag" else -1j * freq
    chi = q * r
    n = d / r
    pref = np.exp(-chi) / (4.0 * np.pi * q * q * r**3)
    mat = pref * (_g_poly(chi) * np.eye(3) - _h_poly(chi) * np.outer(n, n))
    mat = np.asarray(mat, dtype=complex)
    if part == "imag":
        mat = 1j * mat.imag
    return DyadicTensor(mat, r1, r2, freq, axis, "free")


def _check_halfspace(r1, r2):
    if r1[2] <= 0 or r2[2] <= 0:
        raise GeometryError("both points must lie above the surface (z > 0)")


def _lateral_frame(r1, r2):
    """Rotation angle that maps the lateral separation onto +x."""
    dx, dy = r1[0] - r2[0], r1[1] - r2[1]
    rho = float(np.hypot(dx, dy))
    phi = float(np.arctan2(dy, dx)) if rho > 0 else 0.0
    return rho, phi


def _rotate_back(mat, phi):
    if phi == 0.0:
        return mat
    c, s = np.cos(phi), np.sin(phi)
    rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    return rot @ mat @ rot.T


class _ScatterIntegrand:
    """Vector integrand [xx, yy, zz, xz] for one sector of the k integral.

    Parameters fix the sector; __call__ maps the integration variable u to
    kappa, evaluates the Fresnel coefficients in SI units, and returns the
    kernel times the exponential envelope and measure.
    """

    def __init__(self, sector, x12, Z, freq, medium, omega0, dz_order):
        self.sector = sector  # "imag_tail" | "evan_tail" | "prop"
        self.x12 = x12
        self.Z = Z
        self.freq = freq  # xi/omega0 or omega/omega0
        self.medium = medium
        self.omega0 = omega0
        self.dz_order = dz_order

    def __call__(self, u):
        Z = self.Z
        w = self.freq
        if self.sector == "imag_tail":
            kappa = w + u / Z
            envelope = np.exp(-w * Z) * np.exp(-u) / Z
            m2 = w * w
        elif self.sector == "evan_tail":
            kappa = u / Z
            envelope = np.exp(-u) / Z
            m2 = -w * w
        else:  # propagating: kappa = -i t, overall factor i applied by caller
            kappa = -1j * u
            envelope = np.exp(1j * u * Z)
            m2 = -w * w
        kappa = np.asarray(kappa, dtype=complex)
        kpar2 = kappa * kappa - m2
        kpar = np.sqrt(kpar2)
        # kpar is real on all sectors of both axes.
        kpar_r = kpar.real
        x = kpar_r * self.x12
        b0, b1, b2 = j0(x), j1(x), jv(2, x)
        k0_si = self.omega0 / 299792458.0
        if self.sector == "imag_tail":
            pair = fresnel(self.medium, kappa.real * k0_si,
                           xi=self.freq * self.omega0)
            rs, rp = pair.r_s.astype(complex), pair.r_p.astype(complex)
        else:
            pair = fresnel(self.medium, kappa * k0_si,
                           omega=self.freq * self.omega0)
            rs, rp = pair.r_s, pair.r_p
        pfac = -1.0 / m2
        xx = (b0 + b2) * rs + pfac * kappa**2 * (b0 - b2) * rp
        yy = (b0 - b2) * rs + pfac * kappa**2 * (b0 + b2) * rp
        zz = pfac * 2.0 * kpar2 * b0 * rp
        xz = pfac * 2.0 * kpar * kappa * b1 * rp
        out = np.stack([xx, yy, zz, xz], axis=1)
        if self.dz_order:
            out = out * (-kappa[:, None]) ** self.dz_order
        return out * envelope[:, None]


def _assemble(comp):
    """Build the 3x3 matrix from in-frame components [xx, yy, zz, xz]."""
    xx, yy, zz, xz = comp
    return np.array(
        [[xx, 0.0, xz], [0.0, yy, 0.0], [-xz, 0.0, zz]], dtype=complex
    )


def _scatter_components(x12, Z, freq, axis, medium, omega0, quad, dz_order):
    """Sector integrals for the in-plane-frame components [xx, yy, zz, xz]."""
    total_err = 0.0
    if axis == "imag":
        fn = _ScatterIntegrand("imag_tail", x12, Z, freq, medium, omega0,
                               dz_order)
        val, err = integrate(fn, 0.0, quad.tail_mult, quad)
        comp = val
        total_err += err
    else:
        fn_e = _ScatterIntegrand("evan_tail", x12, Z, freq, medium, omega0,
                                 dz_order)
        val_e, err_e = integrate(fn_e, 0.0, quad.tail_mult, quad)
        fn_p = _ScatterIntegrand("prop", x12, Z, freq, medium, omega0,
                                 dz_order)
        val_p, err_p = integrate(fn_p, 0.0, freq, quad)
        comp = val_e + 1j * val_p
        total_err += err_e + err_p
    return comp / (8.0 * np.pi), total_err


def _scatter(r1, r2, freq, axis, medium, omega0, quad, dz_order):
    _check_halfspace(r1, r2)
    if freq <= 0:
        raise ValueError("frequency argument must be positive")
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    if medium.is_vacuum:
        return DyadicTensor(np.zeros((3, 3), dtype=complex), r1, r2, freq,
                            axis, "scattering", 0.0, dz_order)
    Z = float(r1[2] + r2[2])
    rho, phi = _lateral_frame(r1, r2)
    comp, err = _scatter_components(rho, Z, freq, axis, medium, omega0,
                                    quad, dz_order)
    mat = _assemble(comp)
    mat = _rotate_back(mat, phi)
    return DyadicTensor(mat, r1, r2, freq, axis, "scattering", err, dz_order)


def greens_scatter_imag(r1, r2, xi: float, medium: Medium, omega0: float,
                        quad: QuadratureSpec = DEFAULT_QUAD) -> DyadicTensor:
    """Scattering tensor at imaginary frequency i*xi (xi in units of omega0).

    Both points must lie above the surface.  For a lossy Drude medium the
    result is real; it feeds the broadband ground-state shift.
    """
    return _scatter(r1, r2, xi, "imag", medium, omega0, quad, 0)


def greens_scatter_real(r1, r2, omega: float, medium: Medium, omega0: float,
                        quad: QuadratureSpec = DEFAULT_QUAD) -> DyadicTensor:
    """Scattering tensor at real frequency (omega in units of omega0).

    Split into the propagating sector (outgoing phase on [0, omega]) and
    the evanescent tail.  The imaginary part feeds decay coefficients, the
    real part feeds the resonant shifts.
    """
    return _scatter(r1, r2, omega, "real", medium, omega0, quad, 0)


def greens_scatter_dz(r1, r2, medium: Medium, omega0: float,
                      omega: float | None = None, xi: float | None = None,
                      quad: QuadratureSpec = DEFAULT_QUAD) -> DyadicTensor:
    """d/dZ of the scattering tensor at fixed lateral separation.

    Z = z1 + z2 is the height sum; differentiating under the integral sign
    multiplies the kernel by -kappa (evanescent/imaginary) or +i k_z
    (propagating).  Frequency tagging as elsewhere.
    """
    if (omega is None) == (xi is None):
        raise ValueError("pass exactly one of omega= or xi=")
    if xi is not None:
        return _scatter(r1, r2, xi, "imag", medium, omega0, quad, 1)
    return _scatter(r1, r2, omega, "real", medium, omega0, quad, 1)


def scatter_zz_real(x12: float, z0: float, medium: Medium, omega0: float,
                    quad: QuadratureSpec = DEFAULT_QUAD,
                    dz0_order: int = 0):
    """zz scattering component at omega0 for two points at equal height z0.

    Cheaper entry point used by the coefficient assembly: returns
    (value, error) of Gzz (units of k0, positions in 1/k0) and, for
    dz0_order = 1, of its derivative with respect to z0*k0 (the height of
    both points, so d/dz0 = 2 d/dZ).
    """
    Z = 2.0 * z0
    if medium.is_vacuum:
        return 0.0 + 0.0j, 0.0
    comp, err = _scatter_components(x12, Z, 1.0, "real", medium, omega0,
                                    quad, dz0_order)
    scale = 2.0**dz0_order
    return scale * comp[2], scale * err


def scatter_zz_imag(x12: float, z0: float, xi: float, medium: Medium,
                    omega0: float, quad: QuadratureSpec = DEFAULT_QUAD,
                    dz0_order: int = 0):
    """zz scattering component at imaginary frequency, equal heights."""
    Z = 2.0 * z0
    if medium.is_vacuum:
        return 0.0 + 0.0j, 0.0
    comp, err = _scatter_components(x12, Z, xi, "imag", medium, omega0,
                                    quad, dz0_order)
    scale = 2.0**dz0_order
    return scale * comp[2], scale * err


class _BatchedZzIntegrand:
    """zz kernel for a whole batch of lateral separations at once.

    The reflection part of the kernel is shared between separations; the
    Bessel factor is an outer product.  Components are laid out as
    [zz(x_0)...zz(x_{n-1}), dzz/dz0(x_0)...dzz/dz0(x_{n-1})], which lets
    one adaptive pass produce a full map row plus its derivatives.
    """

    def __init__(self, sector, x_batch, Z, medium, omega0):
        self.sector = sector  # "evan_tail" | "prop"
        self.x_batch = np.asarray(x_batch, dtype=float)
        self.Z = Z
        self.medium = medium
        self.omega0 = omega0

    def __call__(self, u):
        Z = self.Z
        if self.sector == "evan_tail":
            kappa = np.asarray(u / Z, dtype=complex)
            envelope = np.exp(-u) / Z
        else:
            kappa = -1j * np.asarray(u, dtype=complex)
            envelope = np.exp(1j * u * Z)
        kpar2 = kappa * kappa + 1.0
        kpar = np.sqrt(kpar2).real
        k0_si = self.omega0 / 299792458.0
        pair = fresnel(self.medium, kappa * k0_si, omega=self.omega0)
        common = 2.0 * kpar2 * pair.r_p * envelope
        bess = j0(kpar[:, None] * self.x_batch[None, :])
        vals = common[:, None] * bess
        # d/dZ brings down -kappa; d/dz0 = 2 d/dZ
        dvals = (-2.0 * kappa * common)[:, None] * bess
        return np.concatenate([vals, dvals], axis=1)


def scatter_zz_real_batch(x_batch, z0: float, medium: Medium, omega0: float,
                          quad: QuadratureSpec = DEFAULT_QUAD):
    """zz component and its z0-derivative for many separations at once.

    Returns (values, dvalues, error): complex arrays over the batch of
    lateral separations (units of k0 throughout, both points at height
    z0).  Equivalent to calling :func:`scatter_zz_real` per point but
    sharing the adaptive quadrature across the whole batch.
    """
    x_batch = np.atleast_1d(np.asarray(x_batch, dtype=float))
    n = len(x_batch)
    if medium.is_vacuum:
        zero = np.zeros(n, dtype=complex)
        return zero, zero.copy(), 0.0
    Z = 2.0 * z0
    fn_e = _BatchedZzIntegrand("evan_tail", x_batch, Z, medium, omega0)
    val_e, err_e = integrate(fn_e, 0.0, quad.tail_mult, quad)
    fn_p = _BatchedZzIntegrand("prop", x_batch, Z, medium, omega0)
    val_p, err_p = integrate(fn_p, 0.0, 1.0, quad)
    total = (val_e + 1j * val_p) / (8.0 * np.pi)
    return total[:n], total[n:], err_e + err_p
