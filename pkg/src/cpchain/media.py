"""Material response and planar-interface Fresnel reflection coefficients.

The half-space z < 0 is filled with a Drude metal, the upper half-space is
vacuum.  Everything here works in SI units (rad/s, 1/m); the Green's-tensor
layer converts to dimensionless variables before calling in.

Frequency arguments are tagged by keyword: ``omega=`` selects the real
frequency axis, ``xi=`` the imaginary axis (the frequency is i*xi).  The
imaginary-axis branch is where Drude permittivity is real and larger than
one, which makes every reflection coefficient real there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BranchAmbiguityError

C_LIGHT = 299792458.0


@dataclass(frozen=True)
class Medium:
    """Drude half-space: eps(w) = 1 - wp^2 / (w^2 + i*gamma*w).

    plasma_frequency and loss_rate are angular frequencies in rad/s.
    ``plasma_frequency = 0`` degenerates to vacuum (eps = 1), which is used
    as the no-interface reference throughout the tests.  ``permeability``
    is a constant scalar mu; the Fresnel formulas carry it but the physics
    here never needs mu != 1.
    """

    plasma_frequency: float
    loss_rate: float
    permeability: float = 1.0

    def __post_init__(self):
        if self.plasma_frequency < 0:
            raise ValueError("plasma_frequency must be >= 0")
        if self.loss_rate < 0:
            raise ValueError("loss_rate must be >= 0")

    @property
    def is_vacuum(self) -> bool:
        return self.plasma_frequency == 0.0 and self.permeability == 1.0

    @classmethod
    def vacuum(cls) -> "Medium":
        return cls(0.0, 0.0)

    @classmethod
    def gold(cls) -> "Medium":
        # Drude parameters for gold, rad/s.
        return cls(plasma_frequency=1.36e16, loss_rate=1.04e14)


@dataclass(frozen=True)
class FresnelPair:
    """Reflection amplitudes r_s, r_p with their evaluation point.

    ``kappa_perp`` is the vacuum-side transverse decay constant (1/m); in
    the propagating sector of the real axis it is -i*k_z.  ``freq`` is the
    frequency argument and ``axis`` is "real" or "imag".
    """

    r_s: np.ndarray
    r_p: np.ndarray
    kappa_perp: np.ndarray
    freq: float
    axis: str


def permittivity(medium: Medium, omega: float | None = None,
                 xi: float | None = None):
    """Drude permittivity on the real or imaginary frequency axis.

    Exactly one of ``omega`` (rad/s, nonzero) and ``xi`` (rad/s, > 0) must
    be given.  On the imaginary axis the returned value is a real float
    1 + wp^2/(xi^2 + gamma*xi) > 1; on the real axis it is complex.
    """
    if (omega is None) == (xi is None):
        raise ValueError("pass exactly one of omega= or xi=")
    wp2 = medium.plasma_frequency**2
    if xi is not None:
        if xi <= 0:
            raise ValueError("imaginary-axis frequency xi must be > 0 "
                             "(Drude diverges at xi = 0)")
        return 1.0 + wp2 / (xi**2 + medium.loss_rate * xi)
    if omega == 0:
        raise ValueError("omega = 0 sits on the Drude pole; use the "
                         "imaginary-axis branch for static response")
    return 1.0 - wp2 / (omega**2 + 1j * medium.loss_rate * omega)


def mu_at(medium: Medium, omega: float | None = None,
          xi: float | None = None):
    """Scalar permeability (constant model)."""
    return medium.permeability


def fresnel(medium: Medium, kappa_perp, omega: float | None = None,
            xi: float | None = None) -> FresnelPair:
    """Reflection coefficients of the vacuum/medium interface.

    Parameters
    ----------
    kappa_perp : array_like
        Vacuum-side transverse decay constant in 1/m.  Real >= 0 on the
        imaginary axis and in the evanescent sector of the real axis;
        purely imaginary -i*k_z (k_z in [0, omega/c]) in the propagating
        sector of the real axis.
    omega, xi : float
        Frequency tag, as in :func:`permittivity`.

    Returns
    -------
    FresnelPair
        The square-root branch of the medium-side root q is fixed so the
        transmitted wave decays into the medium: Re q >= 0.  On the
        imaginary axis the root argument is positive real, on the real
        axis the principal root already satisfies Re q >= 0 for a lossy
        medium; a root landing exactly on the cut raises
        BranchAmbiguityError (unreachable for lossy Drude).
    """
    kappa = np.asarray(kappa_perp, dtype=complex)
    if (omega is None) == (xi is None):
        raise ValueError("pass exactly one of omega= or xi=")
    freq = xi if omega is None else omega
    axis = "imag" if omega is None else "real"
    mu = mu_at(medium, omega=omega, xi=xi)
    if medium.is_vacuum:
        zero = np.zeros_like(kappa)
        return FresnelPair(zero, zero.copy(), kappa, float(freq), axis)
    eps = permittivity(medium, omega=omega, xi=xi)
    k2 = (freq / C_LIGHT) ** 2
    if axis == "imag":
        arg = (eps * mu - 1.0) * k2 + kappa**2
    else:
        arg = kappa**2 - (eps * mu - 1.0) * k2
    q = np.sqrt(arg)
    on_cut = (q.real == 0.0) & (q.imag != 0.0)
    if np.any(on_cut):
        raise BranchAmbiguityError(
            "medium-side root is purely imaginary; no decay convention "
            "applies (lossless transparent medium?)"
        )
    r_p = (eps * kappa - q) / (eps * kappa + q)
    r_s = (mu * kappa - q) / (mu * kappa + q)
    return FresnelPair(r_s, r_p, kappa, float(freq), axis)


def image_factor(medium: Medium, omega: float | None = None,
                 xi: float | None = None):
    """Electrostatic image strength (eps - 1)/(eps + 1).

    This is the large-kappa_perp limit of r_p and the kernel of every
    non-retarded closed form.
    """
    eps = permittivity(medium, omega=omega, xi=xi)
    return (eps - 1.0) / (eps + 1.0)
