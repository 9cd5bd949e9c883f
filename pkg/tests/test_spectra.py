"""Tests for sector spectra, spin-level tables, and ordering checks."""

import numpy as np
import pytest

from spinlab.spinops import (
    ModelSpec,
    SpinGraph,
    SpinValue,
    build_hamiltonian,
    magnetization_sectors,
)
from spinlab.spectra import (
    NonCommutingError,
    eigen_spectrum,
    foel_check,
    lieb_mattis_check,
    perturbed_gap_scan,
    sector_gap,
    spin_level_table,
)


def xxx_chain(length, twice_s=1, coupling=1.0):
    g = SpinGraph.chain(length, twice_s=twice_s, coupling=coupling)
    return g, build_hamiltonian(g, ModelSpec.xxx())


class TestEigenSpectrum:
    def test_two_site_full_spectrum(self):
        _, h = xxx_chain(2, coupling=1.0)
        res = eigen_spectrum(h)
        assert np.allclose(res.eigenvalues, [-0.25, -0.25, -0.25, 0.75], atol=1e-12)
        assert res.residual_max <= 1e-9 * 0.75

    def test_sector_restriction(self):
        _, h = xxx_chain(2)
        res = eigen_spectrum(h, sector=0.0)
        assert np.allclose(res.eigenvalues, [-0.25, 0.75], atol=1e-12)
        res_top = eigen_spectrum(h, sector=1.0)
        assert np.allclose(res_top.eigenvalues, [-0.25], atol=1e-12)

    def test_sector_union_equals_full_spectrum(self):
        """Eigenvalues collected sector by sector match the full diagonalization."""
        g, h = xxx_chain(5, twice_s=1, coupling=[1.0, 0.3, 0.3, 1.7])
        full = np.sort(eigen_spectrum(h).eigenvalues)
        pieces = [eigen_spectrum(h, sector=m).eigenvalues
                  for m in magnetization_sectors(g)]
        union = np.sort(np.concatenate(pieces))
        assert np.allclose(full, union, atol=1e-9)

    def test_lowest_eigenpairs_iterative(self):
        _, h = xxx_chain(8)
        dense = eigen_spectrum(h).eigenvalues
        res = eigen_spectrum(h, k=3)
        assert np.allclose(res.eigenvalues, dense[:3], atol=1e-8)

    def test_ferro_ground_is_fully_polarized(self):
        """All-up product state is an exact eigenvector at the ground energy."""
        g, h = xxx_chain(5, coupling=[1.0, 2.0, 0.5, 1.5])
        v = np.zeros(h.dim)
        v[0] = 1.0  # first basis state: every site at m = +s
        e_ground = eigen_spectrum(h).eigenvalues[0]
        resid = np.linalg.norm(h.matrix @ v - e_ground * v)
        assert resid <= 1e-12
        assert np.isclose(e_ground, -(1.0 + 2.0 + 0.5 + 1.5) / 4.0, atol=1e-12)

    def test_unknown_sector_rejected(self):
        _, h = xxx_chain(2)
        with pytest.raises(ValueError):
            eigen_spectrum(h, sector=7.0)

    def test_dense_cap(self):
        _, h = xxx_chain(8)
        with pytest.raises(ValueError):
            eigen_spectrum(h, dense_cap=100)


class TestSpinLevelTable:
    def test_two_site_table(self):
        g, h = xxx_chain(2, coupling=1.0)
        table = spin_level_table(h, g)
        assert np.isclose(table.energy(1.0), -0.25, atol=1e-12)
        assert np.isclose(table.energy(0.0), 0.75, atol=1e-12)
        assert table.multiplets == {1.0: 1, 0.0: 1}

    def test_casimir_and_highest_weight_agree(self):
        """The two table constructions are independent routes to E(H, S)."""
        rng = np.random.default_rng(3)
        for _ in range(4):
            js = rng.uniform(0.2, 2.0, size=4)
            g, h = xxx_chain(5, coupling=list(js))
            t1 = spin_level_table(h, g, method="casimir")
            t2 = spin_level_table(h, g, method="highest_weight")
            assert set(t1.energies) == set(t2.energies)
            for s in t1.energies:
                assert np.isclose(t1.energies[s], t2.energies[s], atol=1e-9)
                assert t1.multiplets[s] == t2.multiplets[s]

    def test_spin_one_chain_multiplet_count(self):
        g, h = xxx_chain(5, twice_s=2)
        table = spin_level_table(h, g)
        assert table.s_max == 5.0 and table.s_min == 0.0
        total = sum(int(2 * s + 1) * n for s, n in table.multiplets.items())
        assert total == 243

    def test_ferro_ground_sits_at_max_spin(self):
        g, h = xxx_chain(4, coupling=[1.0, 0.7, 1.3])
        table = spin_level_table(h, g)
        ground_spin = min(table.energies, key=table.energies.get)
        assert ground_spin == table.s_max
        assert np.isclose(table.energy(2.0), -(1.0 + 0.7 + 1.3) / 4.0, atol=1e-12)

    def test_xxz_refused(self):
        g = SpinGraph.chain(3, twice_s=1)
        h = build_hamiltonian(g, ModelSpec.xxz(2.0))
        with pytest.raises(NonCommutingError):
            spin_level_table(h, g)


class TestFoel:
    def test_five_site_spin_one_ordered(self):
        g, h = xxx_chain(5, twice_s=2)
        report = foel_check(spin_level_table(h, g))
        assert report.ordered
        assert not report.inconclusive
        for _, _, margin in report.margins:
            assert margin > 1e-6

    def test_random_couplings_ordered(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            js = rng.uniform(0.1, 2.0, size=5)
            g, h = xxx_chain(6, coupling=list(js))
            report = foel_check(spin_level_table(h, g))
            assert report.ordered, "ordering failed for couplings %s" % js

    def test_antiferro_chain_not_foel_ordered(self):
        """With J < 0 the ground state is not fully polarized."""
        g, h = xxx_chain(4, coupling=-1.0)
        report = foel_check(spin_level_table(h, g))
        assert not report.ordered

    def test_margin_values_match_table(self):
        g, h = xxx_chain(3, twice_s=2)
        table = spin_level_table(h, g)
        report = foel_check(table)
        for s_high, s_low, margin in report.margins:
            assert np.isclose(margin, table.energy(s_low) - table.energy(s_high))


class TestLiebMattis:
    def test_two_site_antiferromagnet(self):
        g = SpinGraph.chain(2, twice_s=1)
        report = lieb_mattis_check(g, [0], [1])
        assert report.expected_ground_spin == 0.0
        assert report.ground_ok and report.ordering_ok

    def test_four_site_chain(self):
        g = SpinGraph.chain(4, twice_s=1)
        report = lieb_mattis_check(g, [0, 2], [1, 3])
        assert report.s_a == 1.0 and report.s_b == 1.0
        assert report.ground_ok and report.ordering_ok
        assert report.ground_spin == 0.0
        for _, _, margin in report.margins:
            assert margin > 1e-6

    def test_five_site_spin_one_chain(self):
        """S_A = 3, S_B = 2: the antiferromagnetic ground state has spin 1."""
        g = SpinGraph.chain(5, twice_s=2)
        report = lieb_mattis_check(g, [0, 2, 4], [1, 3])
        assert report.expected_ground_spin == 1.0
        assert report.ground_ok and report.ordering_ok

    def test_unbalanced_spins(self):
        sites = ((0, SpinValue(2)), (1, SpinValue(1)))
        g = SpinGraph(sites, ((0, 1, 1.0),))
        report = lieb_mattis_check(g, [0], [1])
        assert report.expected_ground_spin == 0.5
        assert report.ground_ok

    def test_partition_validation(self):
        g = SpinGraph.chain(3, twice_s=1)
        with pytest.raises(ValueError):
            lieb_mattis_check(g, [0, 1], [1, 2])
        with pytest.raises(ValueError):
            lieb_mattis_check(g, [0], [1])

    def test_negative_coupling_rejected(self):
        g = SpinGraph.chain(2, twice_s=1, coupling=-1.0)
        with pytest.raises(ValueError):
            lieb_mattis_check(g, [0], [1])


class TestSectorGap:
    def test_three_site_path_gap(self):
        """Single-particle sector of the J = 2 chain: path Laplacian {0, 1, 3}."""
        g, h = xxx_chain(3, coupling=2.0)
        res = sector_gap(h, particles=1)
        assert res.defined
        assert np.isclose(res.gap, 1.0, atol=1e-10)
        evals = eigen_spectrum(h, sector=res.sector).eigenvalues
        assert np.allclose(evals - evals[0], [0.0, 1.0, 3.0], atol=1e-10)

    def test_spin_flip_symmetry(self):
        g, h = xxx_chain(5, coupling=[1.0, 0.4, 1.1, 0.9])
        for n in range(1, 5):
            a = sector_gap(h, particles=n)
            b = sector_gap(h, particles=5 - n)
            assert np.isclose(a.gap, b.gap, atol=1e-10)

    def test_fully_polarized_sector_has_no_gap(self):
        _, h = xxx_chain(3)
        res = sector_gap(h, particles=0)
        assert not res.defined and res.gap is None
        assert res.sector_dim == 1

    def test_sector_by_magnetization(self):
        _, h = xxx_chain(3, coupling=2.0)
        res = sector_gap(h, sector=-0.5)
        assert np.isclose(res.gap, 1.0, atol=1e-10)

    def test_argument_validation(self):
        _, h = xxx_chain(2)
        with pytest.raises(ValueError):
            sector_gap(h)
        with pytest.raises(ValueError):
            sector_gap(h, sector=0.0, particles=1)


class TestPerturbedGapScan:
    def test_aklt_chain_stays_gapped(self):
        g = SpinGraph.chain(5, twice_s=2)
        sz = np.diag([1.0, 0.0, -1.0]).astype(complex)
        term = np.kron(sz, sz)
        lambdas = np.linspace(-0.2, 0.2, 9)
        scan = perturbed_gap_scan(g, ModelSpec.aklt(), term, lambdas)
        assert scan.band_dim == 4  # open-chain ground space
        assert np.all(scan.gaps > 0)
        assert scan.positive_interval[0] <= -0.2 and scan.positive_interval[1] >= 0.2

    def test_zero_coupling_matches_unperturbed(self):
        g = SpinGraph.chain(4, twice_s=2)
        h = build_hamiltonian(g, ModelSpec.aklt())
        evals = np.linalg.eigvalsh(h.toarray())
        gap0 = evals[4] - evals[3]
        sz = np.diag([1.0, 0.0, -1.0]).astype(complex)
        scan = perturbed_gap_scan(g, ModelSpec.aklt(), np.kron(sz, sz), [-0.1, 0.0, 0.1])
        assert np.isclose(scan.gap_at(0.0), gap0, atol=1e-12)

    def test_curve_is_continuous(self):
        g = SpinGraph.chain(4, twice_s=2)
        sz = np.diag([1.0, 0.0, -1.0]).astype(complex)
        lambdas = np.linspace(-0.3, 0.3, 13)
        scan = perturbed_gap_scan(g, ModelSpec.aklt(), np.kron(sz, sz), lambdas)
        steps = np.abs(np.diff(scan.gaps))
        # eigenvalue curves are 1-Lipschitz in the perturbation strength
        # up to the perturbation norm; the translated sum has norm <= L
        lip = 2.0 * g.n_sites * np.max(np.diff(lambdas))
        assert np.all(steps <= lip)

    def test_slope_stable_under_refinement(self):
        g = SpinGraph.chain(4, twice_s=2)
        sz = np.diag([1.0, 0.0, -1.0]).astype(complex)
        term = np.kron(sz, sz)

        def slope(h):
            scan = perturbed_gap_scan(g, ModelSpec.aklt(), term, [-h, 0.0, h])
            return (scan.gaps[2] - scan.gaps[0]) / (2 * h)

        s1, s2 = slope(0.02), slope(0.01)
        assert abs(s1 - s2) <= 0.02 * max(1.0, abs(s2))

    def test_grid_must_contain_zero(self):
        g = SpinGraph.chain(3, twice_s=2)
        sz = np.diag([1.0, 0.0, -1.0]).astype(complex)
        with pytest.raises(ValueError):
            perturbed_gap_scan(g, ModelSpec.aklt(), np.kron(sz, sz), [0.1, 0.2])
