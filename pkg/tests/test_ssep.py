"""Tests for the exclusion process and its spin-model equivalence."""

import numpy as np
import pytest
import scipy.linalg

from spinlab.spinops import SpinGraph, SpinValue
from spinlab.ssep import (
    aldous_scan,
    configurations,
    heisenberg_equivalence_check,
    random_walk_generator,
    ssep_generator,
    swap_operator,
)

SZ = np.diag([0.5, -0.5])
SX = np.array([[0.0, 0.5], [0.5, 0.0]])
SY = np.array([[0.0, -0.5j], [0.5j, 0.0]])


def rate_graph(n_sites, edges):
    sites = tuple((i, SpinValue(1)) for i in range(n_sites))
    return SpinGraph(sites, tuple(edges))


def random_connected_graph(rng, n_sites):
    """A random spanning tree with a few extra edges and random rates."""
    edges = {}
    for new in range(1, n_sites):
        anchor = int(rng.integers(0, new))
        edges[(anchor, new)] = float(rng.uniform(0.2, 2.0))
    extras = int(rng.integers(0, n_sites))
    for _ in range(extras):
        x, y = sorted(rng.choice(n_sites, size=2, replace=False).tolist())
        if (x, y) not in edges:
            edges[(x, y)] = float(rng.uniform(0.2, 2.0))
    return rate_graph(n_sites, [(x, y, r) for (x, y), r in edges.items()])


class TestConfigurations:
    def test_counts(self):
        from math import comb

        for n_sites in (3, 5):
            for n in range(n_sites + 1):
                assert len(configurations(n_sites, n)) == comb(n_sites, n)

    def test_lexicographic_order(self):
        assert configurations(4, 2) == (
            (1, 1, 0, 0),
            (1, 0, 1, 0),
            (1, 0, 0, 1),
            (0, 1, 1, 0),
            (0, 1, 0, 1),
            (0, 0, 1, 1),
        )

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            configurations(3, 4)


class TestGenerator:
    def test_path_random_walk_is_hand_written_laplacian(self):
        graph = rate_graph(3, [(0, 1, 1.0), (1, 2, 1.0)])
        gen = random_walk_generator(graph)
        expected = np.array([[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]])
        assert np.array_equal(gen, expected)
        evals = np.linalg.eigvalsh(gen)
        assert np.max(np.abs(evals - np.array([0.0, 1.0, 3.0]))) <= 1e-12

    def test_complete_graph_gap(self):
        graph = rate_graph(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)])
        evals = np.linalg.eigvalsh(random_walk_generator(graph))
        assert np.max(np.abs(evals - np.array([0.0, 3.0, 3.0]))) <= 1e-12

    def test_generator_structure(self):
        rng = np.random.default_rng(5)
        graph = random_connected_graph(rng, 5)
        gen, configs = ssep_generator(graph, 2)
        assert gen.shape == (10, 10)
        assert np.max(np.abs(gen - gen.T)) == 0.0
        assert np.max(np.abs(gen.sum(axis=1))) <= 1e-12
        off = gen - np.diag(np.diag(gen))
        assert np.max(off) <= 0.0
        assert np.linalg.eigvalsh(gen)[0] >= -1e-12

    def test_semigroup_is_stochastic(self):
        graph = rate_graph(4, [(0, 1, 0.7), (1, 2, 1.3), (2, 3, 0.4)])
        gen, configs = ssep_generator(graph, 2)
        kernel = scipy.linalg.expm(-0.8 * gen)
        assert np.max(np.abs(kernel.sum(axis=1) - 1.0)) <= 1e-12
        assert np.min(kernel) >= -1e-14
        uniform = np.full(len(configs), 1.0 / len(configs))
        assert np.max(np.abs(uniform @ kernel - uniform)) <= 1e-12

    def test_bad_graphs_rejected(self):
        sites = ((0, SpinValue(2)), (1, SpinValue(2)))
        with pytest.raises(ValueError):
            ssep_generator(SpinGraph(sites, ((0, 1, 1.0),)), 1)
        with pytest.raises(ValueError):
            ssep_generator(rate_graph(2, [(0, 1, -1.0)]), 1)
        disconnected = rate_graph(4, [(0, 1, 1.0), (2, 3, 1.0)])
        with pytest.raises(ValueError):
            ssep_generator(disconnected, 1)


class TestExchangeIdentity:
    def test_swap_from_spin_operators(self):
        """1 - t = 1/2 - 2 S.S on a pair of spin-1/2 sites."""
        heis = sum(np.kron(a, a) for a in (SX, SY, SZ))
        left = np.eye(4) - swap_operator()
        right = 0.5 * np.eye(4) - 2.0 * heis
        assert np.max(np.abs(left - right)) <= 1e-15


class TestEquivalence:
    def test_small_explicit_case(self):
        graph = rate_graph(3, [(0, 1, 1.0), (1, 2, 1.0)])
        report = heisenberg_equivalence_check(graph, 1)
        assert report.sector == -0.5
        assert report.dimension == 3
        assert abs(report.shift - 1.0) <= 1e-15
        assert report.ok

    def test_random_graphs_all_fillings(self):
        rng = np.random.default_rng(17)
        for _ in range(10):
            n_sites = int(rng.integers(3, 7))
            graph = random_connected_graph(rng, n_sites)
            n = int(rng.integers(0, n_sites + 1))
            report = heisenberg_equivalence_check(graph, n)
            assert report.max_abs_difference <= 1e-12
            assert report.sector == n - n_sites / 2.0

    def test_full_and_empty_sectors(self):
        graph = rate_graph(3, [(0, 1, 0.9), (1, 2, 1.1)])
        for n in (0, 3):
            report = heisenberg_equivalence_check(graph, n)
            assert report.dimension == 1
            assert report.ok


class TestAldousScan:
    def test_unit_rate_path(self):
        graph = rate_graph(5, [(i, i + 1, 1.0) for i in range(4)])
        table = aldous_scan(graph)
        assert table.uniform_across_sectors
        assert table.particle_hole_symmetric
        expected = 2.0 * (1.0 - np.cos(np.pi / 5.0))
        assert abs(table.one_particle - expected) <= 1e-12

    def test_random_rates(self):
        rng = np.random.default_rng(23)
        for n_sites in (4, 5, 6):
            graph = random_connected_graph(rng, n_sites)
            table = aldous_scan(graph)
            assert table.uniform_across_sectors
            assert table.particle_hole_symmetric
            assert set(table.gaps) == set(range(1, n_sites))

    def test_ring(self):
        graph = rate_graph(6, [(i, (i + 1) % 6, 1.0) for i in range(6)])
        table = aldous_scan(graph)
        assert table.uniform_across_sectors
        assert abs(table.one_particle - 1.0) <= 1e-12
