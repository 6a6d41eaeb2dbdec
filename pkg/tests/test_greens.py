import numpy as np
import pytest
from scipy import integrate as scipy_integrate

from cpchain import (GeometryError, Medium, QuadratureSpec, SingularityError,
                     greens_free, greens_scatter_dz, greens_scatter_imag,
                     greens_scatter_real, image_factor)
from cpchain.greens import scatter_zz_imag, scatter_zz_real
from cpchain.media import C_LIGHT


def free_decay_oracle(u):
    # z-dipoles separated along x: cross-decay over the free-space rate
    return 1.5 * (np.sin(u) / u + np.cos(u) / u**2 - np.sin(u) / u**3)


class TestFree:
    def test_cross_decay_closed_form(self):
        for u in (0.05, 0.5, 2.0, 9.0):
            g = greens_free([0, 0, 1.0], [u, 0, 1.0], omega=1.0)
            assert 6 * np.pi * g.matrix[2, 2].imag == pytest.approx(
                free_decay_oracle(u), rel=1e-12)

    def test_dicke_limit_of_cross_decay(self):
        g = greens_free([0, 0, 1.0], [1e-4, 0, 1.0], omega=1.0)
        assert 6 * np.pi * g.matrix[2, 2].imag == pytest.approx(1.0, abs=1e-7)

    def test_reciprocity(self, rng):
        for _ in range(4):
            r1 = rng.uniform(-1, 1, 3) + np.array([0, 0, 1.5])
            r2 = rng.uniform(-1, 1, 3) + np.array([0, 0, 1.5])
            a = greens_free(r1, r2, omega=1.0).matrix
            b = greens_free(r2, r1, omega=1.0).matrix
            assert np.abs(a - b.T).max() < 1e-14 * np.abs(a).max()

    def test_explicit_exponential_suppression(self):
        # the imaginary-axis tensor carries e^{-xi r} exactly
        xi, r = 1.0, 10.0
        g = greens_free([0, 0, 1.0], [r, 0, 1.0], xi=xi)
        envelope = (1 + xi * r + (xi * r) ** 2) / (4 * np.pi * xi**2 * r**3)
        assert abs(g.matrix[1, 1]) == pytest.approx(
            np.exp(-xi * r) * envelope, rel=1e-12)

    def test_coincident_imag_part_only(self):
        g = greens_free([0, 0, 1.0], [0, 0, 1.0], omega=1.0, part="imag")
        assert np.allclose(g.matrix, 1j * np.eye(3) / (6 * np.pi))
        with pytest.raises(SingularityError):
            greens_free([0, 0, 1.0], [0, 0, 1.0], omega=1.0)
        with pytest.raises(SingularityError):
            greens_free([0, 0, 1.0], [0, 0, 1.0], xi=1.0)


class TestScatterImag:
    def test_vacuum_zero(self, emitter_700):
        g = greens_scatter_imag([0, 0, 0.5], [1, 0, 0.5], 1.0,
                                Medium.vacuum(), emitter_700.omega0)
        assert np.all(g.matrix == 0)

    def test_real_valued_for_drude(self, gold, emitter_700):
        g = greens_scatter_imag([0.3, 0.2, 0.4], [0, 0, 0.6], 0.7, gold,
                                emitter_700.omega0)
        assert np.abs(g.matrix.imag).max() == 0.0

    def test_reciprocity(self, gold, emitter_700, rng):
        r1 = np.array([0.25, 0.4, 0.8])
        r2 = np.array([-0.3, 0.1, 0.45])
        a = greens_scatter_imag(r1, r2, 0.6, gold, emitter_700.omega0).matrix
        b = greens_scatter_imag(r2, r1, 0.6, gold, emitter_700.omega0).matrix
        assert np.abs(a - b.T).max() < 1e-12 * np.abs(a).max()

    def test_pec_image_dipole_limit(self, pec, emitter_700):
        # -(xi/c)^2 Gzz -> r_p / (16 pi z0^3) in the electrostatic limit
        z0, s = 1e-3, 1e-4
        g = greens_scatter_imag([0, 0, z0], [0, 0, z0], s, pec,
                                emitter_700.omega0)
        val = -s * s * g.matrix[2, 2].real
        assert val == pytest.approx(1.0 / (16 * np.pi * z0**3), rel=1e-3)

    def test_xz_entry_vanishes_at_zero_lateral_separation(self, gold,
                                                          emitter_700):
        g = greens_scatter_imag([0, 0, 0.3], [0, 0, 0.7], 0.5, gold,
                                emitter_700.omega0)
        assert abs(g.matrix[0, 2]) == 0.0
        assert abs(g.matrix[2, 0]) == 0.0

    def test_xz_antisymmetric_in_lateral_separation(self, gold, emitter_700):
        a = greens_scatter_imag([0.4, 0, 0.5], [0, 0, 0.5], 0.5, gold,
                                emitter_700.omega0).matrix
        b = greens_scatter_imag([-0.4, 0, 0.5], [0, 0, 0.5], 0.5, gold,
                                emitter_700.omega0).matrix
        assert abs(a[0, 2] + b[0, 2]) < 1e-12 * abs(a[0, 2])

    def test_below_surface_rejected(self, gold, emitter_700):
        with pytest.raises(GeometryError):
            greens_scatter_imag([0, 0, -0.1], [0, 0, 0.5], 1.0, gold,
                                emitter_700.omega0)


class TestScatterReal:
    def test_vacuum_zero(self, emitter_700):
        g = greens_scatter_real([0, 0, 0.5], [1, 0, 0.5], 1.0,
                                Medium.vacuum(), emitter_700.omega0)
        assert np.all(g.matrix == 0)

    def test_single_emitter_decay_against_supplementary_split(
            self, gold, emitter_700):
        # independent scipy evaluation of the two-sector decay integral
        w0 = emitter_700.omega0
        k0 = w0 / C_LIGHT
        z0 = 0.01

        def rp(kappa_k0):
            eps = 1 - 1.36e16**2 / (w0**2 + 1j * 1.04e14 * w0)
            q = np.sqrt(kappa_k0**2 - (eps - 1) + 0j)
            return (eps * kappa_k0 - q) / (eps * kappa_k0 + q)

        def prop(t):
            val = (1j * np.exp(2j * t * z0) * (1 - t * t) * rp(-1j * t))
            return val

        def evan(k):
            return (1 + k * k) * np.exp(-2 * k * z0) * rp(k)

        prop_im = scipy_integrate.quad(lambda t: prop(t).imag, 0, 1,
                                       limit=200)[0]
        evan_im = scipy_integrate.quad(lambda k: evan(k).imag, 0, 4000,
                                       limit=400)[0]
        oracle = 1.5 * (prop_im + evan_im)
        gzz, _ = scatter_zz_real(0.0, z0, gold, w0)
        assert 6 * np.pi * gzz.imag == pytest.approx(oracle, rel=1e-7)

    def test_decay_magnitude_near_field(self, gold, emitter_700):
        # surface-enhanced rate ~ image-dipole value at close range
        z0 = 0.01
        gzz, _ = scatter_zz_real(0.0, z0, gold, emitter_700.omega0)
        rate = 6 * np.pi * gzz.imag
        oracle = 3 / (8 * z0**3) * image_factor(
            gold, omega=emitter_700.omega0).imag
        assert rate == pytest.approx(oracle, rel=0.01)
        assert 1e3 < rate < 2e3

    def test_mirror_standing_wave_period(self, mirror, emitter_700):
        # far-zone zz response repeats with period pi in k0*z0
        vals = []
        for z0 in (30.0, 30.0 + np.pi / 2, 30.0 + np.pi):
            gzz, _ = scatter_zz_real(0.0, z0, mirror, emitter_700.omega0)
            vals.append(gzz.imag * z0)  # compensate the 1/z0 envelope
        assert abs(vals[2] - vals[0]) < 0.2 * abs(vals[1] - vals[0])

    def test_reciprocity(self, gold, emitter_700):
        r1 = np.array([0.3, -0.2, 0.6])
        r2 = np.array([-0.1, 0.25, 0.35])
        a = greens_scatter_real(r1, r2, 1.0, gold, emitter_700.omega0).matrix
        b = greens_scatter_real(r2, r1, 1.0, gold, emitter_700.omega0).matrix
        assert np.abs(a - b.T).max() < 1e-12 * np.abs(a).max()

    def test_yy_block_decouples(self, gold, emitter_700):
        g = greens_scatter_real([0.7, 0, 0.5], [0, 0, 0.5], 1.0, gold,
                                emitter_700.omega0).matrix
        assert g[0, 1] == 0 and g[1, 0] == 0
        assert g[1, 2] == 0 and g[2, 1] == 0


class TestScatterDz:
    def test_matches_finite_difference(self, gold, emitter_700):
        # central difference with step 1e-4 (in 1/k0) on the height sum
        h = 1e-4
        for z0, x in ((0.1, 0.3), (0.05, 0.0)):
            d = greens_scatter_dz([x, 0, z0], [0, 0, z0], gold,
                                  emitter_700.omega0, omega=1.0).matrix
            gp = greens_scatter_real([x, 0, z0 + h / 2], [0, 0, z0 + h / 2],
                                     1.0, gold, emitter_700.omega0).matrix
            gm = greens_scatter_real([x, 0, z0 - h / 2], [0, 0, z0 - h / 2],
                                     1.0, gold, emitter_700.omega0).matrix
            fd = (gp - gm) / (2 * h)
            assert np.abs(d - fd).max() < 1e-5 * np.abs(fd).max()

    def test_matches_finite_difference_imag_axis(self, gold, emitter_700):
        h = 1e-4
        z0 = 0.08
        d = greens_scatter_dz([0.2, 0, z0], [0, 0, z0], gold,
                              emitter_700.omega0, xi=0.9).matrix
        gp = greens_scatter_imag([0.2, 0, z0 + h / 2], [0, 0, z0 + h / 2],
                                 0.9, gold, emitter_700.omega0).matrix
        gm = greens_scatter_imag([0.2, 0, z0 - h / 2], [0, 0, z0 - h / 2],
                                 0.9, gold, emitter_700.omega0).matrix
        fd = (gp - gm) / (2 * h)
        assert np.abs(d - fd).max() < 1e-5 * np.abs(fd).max()

    def test_vacuum_zero(self, emitter_700):
        d = greens_scatter_dz([0, 0, 0.5], [0, 0, 0.5], Medium.vacuum(),
                              emitter_700.omega0, omega=1.0)
        assert np.all(d.matrix == 0)

    def test_near_field_power_law(self, pec, emitter_700):
        # 1/Z^3 image form: dG/dZ = -3 G / Z at close range
        z0 = 0.003
        g, _ = scatter_zz_imag(0.0, z0, 1e-4, pec, emitter_700.omega0)
        d, _ = scatter_zz_imag(0.0, z0, 1e-4, pec, emitter_700.omega0,
                               dz0_order=1)
        # both are d/dz0 quantities here: dG/dz0 = -3 G/z0 at leading order
        assert d.real == pytest.approx(-3 * g.real / z0, rel=1e-3)


def test_off_diagonal_entries_never_reach_z_dipole_coefficients(
        gold, emitter_700):
    # for z-aligned dipoles every coefficient is the zz projection;
    # perturbing the xz/zx entries must leave it untouched
    g = greens_scatter_real([0.4, 0, 0.3], [0, 0, 0.3], 1.0, gold,
                            emitter_700.omega0)
    ez = np.array([0.0, 0.0, 1.0])
    before = ez @ g.matrix @ ez
    g.matrix[0, 2] += 1e6
    g.matrix[2, 0] -= 1e6
    after = ez @ g.matrix @ ez
    assert after == before


def test_quadrature_error_estimate_attached(gold, emitter_700):
    w0 = emitter_700.omega0
    g = greens_scatter_real([0.3, 0, 0.2], [0, 0, 0.2], 1.0, gold, w0)
    assert g.error > 0
    tight = QuadratureSpec(rel_tol=1e-11)
    g2 = greens_scatter_real([0.3, 0, 0.2], [0, 0, 0.2], 1.0, gold, w0,
                             quad=tight)
    assert np.abs(g.matrix - g2.matrix).max() <= max(g.error, 1e-13)
