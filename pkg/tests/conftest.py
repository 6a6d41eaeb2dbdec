import numpy as np
import pytest

from cpchain import EmitterParams, Geometry, Medium


@pytest.fixture(scope="session")
def gold():
    return Medium.gold()


@pytest.fixture(scope="session")
def pec():
    # plasma frequency far above every scale in play: perfect conductor.
    # Lossless, so usable on the imaginary frequency axis only: on the
    # real axis a lossless metal carries an undamped surface-plasmon pole
    # on the integration contour.
    return Medium(plasma_frequency=1e22, loss_rate=0.0)


@pytest.fixture(scope="session")
def mirror():
    # near-perfect mirror for real-frequency tests: the huge loss rate
    # pushes the surface-plasmon pole far off the real axis while |eps|
    # stays large enough that r_p ~ 1 everywhere that matters
    return Medium(plasma_frequency=1e22, loss_rate=1e18)


@pytest.fixture(scope="session")
def emitter_700():
    # nominal visible-band emitter; lifetime only fixes the SI force unit
    return EmitterParams.from_wavelength(700e-9, lifetime=1e-9)


@pytest.fixture(scope="session")
def emitter_siv():
    return EmitterParams.from_wavelength(737e-9, lifetime=1.7e-9)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240811)


def pair_geometry(emitter, x0_k0, z0_k0, n=2):
    return Geometry.from_dimensionless(n, x0_k0, z0_k0, emitter.k0)
