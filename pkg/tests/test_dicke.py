import itertools

import numpy as np
import pytest

from cpchain import (QuantumState, SpinOps, dicke_state, pair_correlator,
                     subradiant_basis, subradiant_dimension)


class TestSpinOps:
    def test_ladder_adjointness(self):
        ops = SpinOps(3)
        for site in (1, 2, 3):
            sm = ops.sigma_minus(site).toarray()
            sp = ops.sigma_plus(site).toarray()
            assert np.array_equal(sm.conj().T, sp)

    def test_two_level_completeness(self):
        # sigma+ sigma- + sigma- sigma+ = identity on each emitter factor
        ops = SpinOps(4)
        eye = np.eye(16)
        for site in range(1, 5):
            sm = ops.sigma_minus(site)
            total = (sm.T @ sm + sm @ sm.T).toarray()
            assert np.allclose(total, eye)

    def test_collective_commutators(self):
        ops = SpinOps(3)
        jz, jp, jm = (ops.j_z.toarray(), ops.j_plus.toarray(),
                      ops.j_minus.toarray())
        assert np.allclose(jz @ jp - jp @ jz, jp)
        assert np.allclose(jz @ jm - jm @ jz, -jm)
        j2 = ops.j_squared.toarray()
        assert np.allclose(j2 @ jz, jz @ j2)

    def test_basis_ordering_msb_first(self):
        # emitter 1 is the most significant bit: |eg> has index 0b10
        st = QuantumState.from_bits("eg")
        assert st.vector[0b10] == 1.0
        ops = SpinOps(2)
        assert st.expectation(ops.number_op(1)).real == pytest.approx(1.0)
        assert st.expectation(ops.number_op(2)).real == pytest.approx(0.0)


class TestDickeStates:
    def test_two_emitter_symmetric(self):
        st = dicke_state(2, 1, 0)
        expect = np.zeros(4)
        expect[0b01] = expect[0b10] = 1 / np.sqrt(2)
        assert np.allclose(st.vector, expect)

    def test_four_emitter_half_filled_amplitudes(self):
        st = dicke_state(4, 2, 0)
        nonzero = st.vector[np.abs(st.vector) > 0]
        assert len(nonzero) == 6
        assert np.allclose(np.abs(nonzero), 1 / np.sqrt(6))

    def test_collective_eigenvalues(self):
        ops = SpinOps(6)
        st = dicke_state(6, 3, 0)
        v = st.vector
        assert np.vdot(v, ops.j_squared @ v).real == pytest.approx(12.0,
                                                                   abs=1e-10)
        assert abs(np.vdot(v, ops.j_z @ v)) < 1e-12

    def test_rejects_lower_ladders(self):
        with pytest.raises(ValueError):
            dicke_state(4, 1, 0)
        with pytest.raises(ValueError):
            dicke_state(2, 1, 0.5)


class TestPairCorrelator:
    def test_symmetric_antisymmetric(self):
        sup = dicke_state(2, 1, 0)
        sub = QuantumState(np.array([0, 1, -1, 0]) / np.sqrt(2))
        assert pair_correlator(sup, 1, 2) == pytest.approx(1.0)
        assert pair_correlator(sub, 1, 2) == pytest.approx(-1.0)

    @pytest.mark.parametrize("n", [2, 4, 6, 8])
    def test_half_filled_dicke_value(self, n):
        # brute-force expectation agrees with N / (2 (N-1))
        st = dicke_state(n, n / 2, 0)
        for (m, l) in [(1, 2), (1, n), (2, n - 1)][: n // 2]:
            if m == l:
                continue
            assert pair_correlator(st, m, l) == pytest.approx(
                n / (2 * (n - 1)), rel=1e-12)

    def test_shared_excitation_angle_dependence(self):
        for theta, phi in [(0.3, 0.0), (np.pi / 4, 1.2), (1.1, np.pi)]:
            st = QuantumState.shared_excitation(theta, phi)
            assert pair_correlator(st, 1, 2) == pytest.approx(
                np.sin(2 * theta) * np.cos(phi), rel=1e-12, abs=1e-12)

    def test_relabeling_invariance_for_symmetric_states(self):
        st = dicke_state(5, 2.5, -0.5)
        vals = [pair_correlator(st, m, l)
                for m, l in itertools.combinations(range(1, 6), 2)]
        assert np.ptp(vals) < 1e-12

    def test_distinct_emitters_required(self):
        with pytest.raises(ValueError):
            pair_correlator(dicke_state(2, 1, 0), 1, 1)


class TestSubradiantBasis:
    @pytest.mark.parametrize("n,expected", [(2, 1), (4, 2), (6, 5)])
    def test_dimension(self, n, expected):
        assert subradiant_dimension(n) == expected
        assert len(subradiant_basis(n)) == expected

    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_fully_annihilated(self, n):
        ops = SpinOps(n)
        for st in subradiant_basis(n):
            v = st.vector
            for op in (ops.j_minus, ops.j_plus, ops.j_z):
                assert np.linalg.norm(op @ v) < 1e-10
            assert np.linalg.norm(ops.j_squared @ v) < 1e-10

    def test_orthonormal(self):
        basis = subradiant_basis(6)
        gram = np.array([[np.vdot(a.vector, b.vector) for b in basis]
                         for a in basis])
        assert np.abs(gram - np.eye(len(basis))).max() < 1e-12

    def test_two_emitter_recovers_antisymmetric(self):
        (st,) = subradiant_basis(2)
        overlap = abs(np.vdot(st.vector,
                              np.array([0, 1, -1, 0]) / np.sqrt(2)))
        assert overlap == pytest.approx(1.0, abs=1e-12)

    def test_deterministic_gauge(self):
        a = subradiant_basis(6)
        b = subradiant_basis(6)
        for x, y in zip(a, b):
            assert np.array_equal(x.vector, y.vector)

    def test_odd_rejected(self):
        with pytest.raises(ValueError):
            subradiant_basis(3)
        with pytest.raises(ValueError):
            subradiant_dimension(5)


class TestQuantumState:
    def test_norm_validation(self):
        with pytest.raises(ValueError):
            QuantumState(np.array([1.0, 1.0]))

    def test_density_matrix_validation(self):
        bad = np.array([[0.7, 0.5], [0.5, 0.3]])  # not PSD
        with pytest.raises(ValueError):
            QuantumState(bad)

    def test_maximally_mixed(self):
        st = QuantumState.maximally_mixed(3)
        assert np.trace(st.density_matrix()).real == pytest.approx(1.0)
