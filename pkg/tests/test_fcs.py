"""Tests for finitely correlated states and the valence-bond chain."""

import numpy as np
import pytest

from spinlab.fcs import (
    CpUnitalMap,
    FcsTriple,
    Isometry,
    aklt_isometry,
    aklt_triple,
    block_expectation,
    correlation_length,
    export_isometry_csv,
    fcs_expectation,
    import_isometry_csv,
    invariant_state,
    make_pure_map,
    two_point_function,
)
from spinlab.spinops import SpinValue, aklt_edge_term, spin_matrices

# Valence-bond isometry entries written out independently of the library,
# from the Clebsch-Gordan table for 1 (x) 1/2 -> 1/2 (Condon-Shortley):
#   |1/2, +1/2> = sqrt(2/3)|1,+1>|-1/2> - sqrt(1/3)|1,0>|+1/2>
#   |1/2, -1/2> = sqrt(1/3)|1,0>|-1/2> - sqrt(2/3)|1,-1>|+1/2>
R13 = np.sqrt(1.0 / 3.0)
R23 = np.sqrt(2.0 / 3.0)
V_REF = np.zeros((6, 2), dtype=complex)
V_REF[1, 0] = R23    # |1> (x) |-1/2>
V_REF[2, 0] = -R13   # |0> (x) |1/2>
V_REF[3, 1] = R13    # |0> (x) |-1/2>
V_REF[4, 1] = -R23   # |-1> (x) |1/2>


def reference_transfer(v):
    """Transfer matrix of B -> V*(1 (x) B)V computed from scratch."""
    k = v.shape[1]
    n = v.shape[0] // k
    t = np.zeros((k * k, k * k), dtype=complex)
    for p in range(k):
        for q in range(k):
            unit = np.zeros((k, k), dtype=complex)
            unit[p, q] = 1.0
            out = v.conj().T @ np.kron(np.eye(n), unit) @ v
            t[:, p * k + q] = out.reshape(-1)
    return t


def random_isometry(rng, n, k):
    mat = rng.normal(size=(n * k, k)) + 1j * rng.normal(size=(n * k, k))
    q, _ = np.linalg.qr(mat)
    return Isometry(q[:, :k], n, k)


class TestIsometry:
    def test_aklt_entries_exact(self):
        v = aklt_isometry()
        assert v.n == 3 and v.k == 2
        assert np.max(np.abs(v.matrix - V_REF)) < 1e-15

    def test_isometry_property(self):
        v = aklt_isometry()
        assert np.max(np.abs(v.matrix.conj().T @ v.matrix - np.eye(2))) <= 1e-12

    def test_aklt_intertwines_su2(self):
        """V S_aux^i = (S_phys^i (x) 1 + 1 (x) S_aux^i) V for i = 1, 2, 3."""
        v = aklt_isometry().matrix
        phys = spin_matrices(SpinValue(2))
        aux = spin_matrices(SpinValue(1))
        for s_p, s_a in zip(phys, aux):
            joint = np.kron(s_p, np.eye(2)) + np.kron(np.eye(3), s_a)
            assert np.max(np.abs(v @ s_a - joint @ v)) < 1e-12

    def test_non_isometry_rejected(self):
        with pytest.raises(ValueError):
            Isometry(np.ones((6, 2)), 3, 2)


class TestCpUnitalMap:
    def test_unitality(self):
        cp = make_pure_map(aklt_isometry())
        out = cp.apply(np.eye(3), np.eye(2))
        assert np.max(np.abs(out - np.eye(2))) <= 1e-12

    def test_transfer_matches_reference(self):
        cp = make_pure_map(aklt_isometry())
        assert np.max(np.abs(cp.transfer_matrix() - reference_transfer(V_REF))) < 1e-14

    def test_non_unital_kraus_rejected(self):
        with pytest.raises(ValueError):
            CpUnitalMap((0.5 * aklt_isometry().matrix,), 3, 2)

    def test_random_maps_spectral_radius(self):
        """Transfer eigenvalues of a unital CP map lie in the closed unit disc."""
        rng = np.random.default_rng(2)
        for _ in range(6):
            n = int(rng.integers(2, 4))
            k = int(rng.integers(2, 4))
            cp = make_pure_map(random_isometry(rng, n, k))
            moduli = np.abs(np.linalg.eigvals(cp.transfer_matrix()))
            assert np.max(moduli) <= 1.0 + 1e-12


class TestInvariantState:
    def test_aklt_state_is_maximally_mixed(self):
        cp = make_pure_map(aklt_isometry())
        res = invariant_state(cp)
        assert res.unique
        assert np.max(np.abs(res.rho - np.eye(2) / 2.0)) < 1e-12
        assert res.fixed_point_defect <= 1e-10

    def test_random_maps_fixed_point(self):
        rng = np.random.default_rng(9)
        for _ in range(6):
            cp = make_pure_map(random_isometry(rng, 3, 3))
            res = invariant_state(cp)
            rho = res.rho
            assert abs(np.trace(rho) - 1.0) <= 1e-10
            assert np.min(np.linalg.eigvalsh(rho)) >= -1e-10
            assert res.fixed_point_defect <= 1e-9

    def test_degenerate_fixed_point_flagged(self):
        """A trivial physical leg makes the transfer the identity map."""
        cp = make_pure_map(Isometry(np.eye(2, dtype=complex), 1, 2))
        res = invariant_state(cp)
        assert not res.unique


class TestExpectations:
    def setup_method(self):
        self.triple = aklt_triple()
        self.sz = np.diag([1.0, 0.0, -1.0]).astype(complex)
        self.eye3 = np.eye(3, dtype=complex)

    def test_normalization(self):
        for n_sites in (1, 2, 5):
            val = fcs_expectation(self.triple, [self.eye3] * n_sites)
            assert abs(val - 1.0) <= 1e-12

    def test_single_site_magnetization_vanishes(self):
        assert abs(fcs_expectation(self.triple, [self.sz])) <= 1e-12

    def test_edge_term_expectation_vanishes(self):
        """The state is a ground state of the valence-bond chain: omega(h) = 0."""
        h = aklt_edge_term()
        for pad_left in range(4):
            op = h
            for _ in range(pad_left):
                op = np.kron(self.eye3, op)
            val = block_expectation(self.triple, op, width=pad_left + 2)
            assert abs(val) <= 1e-12

    def test_block_route_matches_product_route(self):
        """Expanding a two-site operator in matrix units reproduces block values."""
        rng = np.random.default_rng(4)
        a = rng.normal(size=(9, 9))
        op = (a + a.T) / 2.0
        direct = block_expectation(self.triple, op, width=2)
        t4 = op.reshape(3, 3, 3, 3)
        expanded = 0.0
        for i in range(3):
            for j in range(3):
                for p in range(3):
                    for q in range(3):
                        e1 = np.zeros((3, 3))
                        e1[i, p] = 1.0
                        e2 = np.zeros((3, 3))
                        e2[j, q] = 1.0
                        expanded += t4[i, j, p, q] * fcs_expectation(self.triple, [e1, e2])
        assert abs(direct - expanded) <= 1e-10

    def test_two_point_values_and_ratios(self):
        """<S3_0 S3_r> = (4/3)(-1/3)^r; successive ratios are exactly -1/3."""
        rs = np.arange(1, 9)
        vals = two_point_function(self.triple, self.sz, self.sz, rs).real
        expected = (4.0 / 3.0) * (-1.0 / 3.0) ** rs
        assert np.max(np.abs(vals - expected)) < 1e-12
        ratios = vals[1:] / vals[:-1]
        assert np.max(np.abs(ratios + 1.0 / 3.0)) <= 1e-10

    def test_translation_invariance(self):
        left = fcs_expectation(self.triple, [self.sz, self.eye3, self.eye3])
        mid = fcs_expectation(self.triple, [self.eye3, self.sz, self.eye3])
        right = fcs_expectation(self.triple, [self.eye3, self.eye3, self.sz])
        assert abs(left - mid) <= 1e-12 and abs(mid - right) <= 1e-12

    def test_positivity(self):
        """omega(A* A) >= 0 for random block operators."""
        rng = np.random.default_rng(6)
        for width in (1, 2, 3):
            a = rng.normal(size=(3 ** width, 3 ** width)) \
                + 1j * rng.normal(size=(3 ** width, 3 ** width))
            val = block_expectation(self.triple, a.conj().T @ a, width)
            assert val.real >= -1e-10
            assert abs(val.imag) <= 1e-10

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError):
            fcs_expectation(self.triple, [np.eye(2)])


class TestCorrelationLength:
    def test_aklt_spectrum_and_length(self):
        """Transfer eigenvalues {1, -1/3 x3} against a from-scratch oracle."""
        oracle = np.sort_complex(np.linalg.eigvals(reference_transfer(V_REF)))
        cp = make_pure_map(aklt_isometry())
        res = correlation_length(cp)
        assert np.max(np.abs(np.sort_complex(res.eigenvalues) - oracle)) < 1e-13
        assert abs(res.eigenvalues[0] - 1.0) <= 1e-12
        assert np.allclose(res.eigenvalues[1:], -1.0 / 3.0, atol=1e-12)
        assert abs(res.subleading_modulus - 1.0 / 3.0) <= 1e-12
        assert abs(res.xi - 1.0 / np.log(3.0)) <= 1e-12
        assert not res.dominant_degenerate

    def test_trivial_auxiliary_space(self):
        v = Isometry(np.array([[1.0], [0.0]], dtype=complex), 2, 1)
        res = correlation_length(make_pure_map(v))
        assert res.xi == 0.0

    def test_degenerate_dominant_flagged(self):
        cp = make_pure_map(Isometry(np.eye(2, dtype=complex), 1, 2))
        res = correlation_length(cp)
        assert res.dominant_degenerate


class TestIsometryCsv:
    def test_round_trip(self, tmp_path):
        path = str(tmp_path / "v.csv")
        export_isometry_csv(aklt_isometry(), path)
        back = import_isometry_csv(path)
        assert back.n == 3 and back.k == 2
        assert np.max(np.abs(back.matrix - aklt_isometry().matrix)) == 0.0

    def test_random_round_trip(self, tmp_path):
        rng = np.random.default_rng(13)
        v = random_isometry(rng, 2, 3)
        path = str(tmp_path / "v.csv")
        export_isometry_csv(v, path)
        back = import_isometry_csv(path)
        assert np.max(np.abs(back.matrix - v.matrix)) == 0.0
