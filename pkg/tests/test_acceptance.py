"""Acceptance suite: one test per criterion, one verdict line each.

Every criterion from the package contract is checked here at its stated
tolerance and runtime budget.  Run with `pytest -s tests/test_acceptance.py`
to see the per-criterion verdict lines.
"""

import time

import numpy as np
from scipy.linalg import expm

from spinlab.climit import effective_upper_constant, sandwich_check
from spinlab.fcs import aklt_triple, block_expectation, correlation_length, two_point_function
from spinlab.gapbound import aklt_chain, certify_gap, martingale_projectors
from spinlab.locality import (
    SpectralEvolver,
    clustering_rate_floor,
    correlation_scan,
    dynamic_commutator_profile,
    fit_decay,
    lieb_robinson_envelope,
)
from spinlab.spectra import foel_check, lieb_mattis_check, spin_level_table
from spinlab.spinops import (
    ModelSpec,
    SpinGraph,
    SpinValue,
    aklt_edge_term,
    build_hamiltonian,
    interaction_from_model,
    interaction_norm,
    magnetization_sectors,
    spin_matrices,
)
from spinlab.ssep import aldous_scan, heisenberg_equivalence_check, ssep_generator


def run_criterion(number, label, body, budget=None):
    started = time.perf_counter()
    try:
        body()
        elapsed = time.perf_counter() - started
        if budget is not None and elapsed > budget:
            raise AssertionError("runtime %.1f s exceeds the %.0f s budget"
                                 % (elapsed, budget))
    except BaseException:
        print("criterion %02d FAIL  %s" % (number, label))
        raise
    print("criterion %02d PASS  %s  (%.1f s)" % (number, label, elapsed))


def random_rate_graph(rng, n_sites):
    """Connected spin-1/2 graph with positive exchange rates."""
    edges = []
    seen = set()
    order = rng.permutation(n_sites)
    for a, b in zip(order[:-1], order[1:]):
        edges.append((int(a), int(b), float(rng.uniform(0.2, 2.0))))
        seen.add(frozenset((int(a), int(b))))
    extra = rng.integers(0, n_sites)
    for _ in range(extra):
        a, b = rng.choice(n_sites, size=2, replace=False)
        key = frozenset((int(a), int(b)))
        if key not in seen:
            seen.add(key)
            edges.append((int(a), int(b), float(rng.uniform(0.2, 2.0))))
    sites = tuple((i, SpinValue(1)) for i in range(n_sites))
    return SpinGraph(sites, tuple(edges))


def test_criterion_01_two_site_valence_bond_spectrum():
    def body():
        graph = SpinGraph.chain(2, twice_s=2)
        ham = build_hamiltonian(graph, ModelSpec.aklt())
        evals = np.sort(np.linalg.eigvalsh(ham.matrix.toarray()))
        expected = np.array([0.0] * 4 + [1.0] * 5)
        assert np.max(np.abs(evals - expected)) < 1e-10

    run_criterion(1, "two-site valence bond spectrum {0 x4, 1 x5}", body,
                  budget=1.0)


def test_criterion_02_ferromagnetic_level_ordering():
    def body():
        # (a) the 5-site spin-1 uniform ferromagnetic chain
        graph = SpinGraph.chain(5, twice_s=2)
        ham = build_hamiltonian(graph, ModelSpec.xxx())
        report = foel_check(spin_level_table(ham, graph))
        assert report.ordered
        assert min(m for _, _, m in report.margins) > 1e-6
        # (b) twenty random positive-coupling spin-1/2 chains of length 6
        rng = np.random.default_rng(20)
        for _ in range(20):
            couplings = rng.uniform(0.1, 2.0, size=5)
            sites = tuple((i, SpinValue(1)) for i in range(6))
            edges = tuple((i, i + 1, float(j)) for i, j in enumerate(couplings))
            chain = SpinGraph(sites, edges)
            h = build_hamiltonian(chain, ModelSpec.xxx())
            rep = foel_check(spin_level_table(h, chain))
            assert rep.ordered and not rep.inconclusive

    run_criterion(2, "ferromagnetic ordering of energy levels", body,
                  budget=30.0)


def test_criterion_03_antiferromagnetic_ground_spin():
    def body():
        graph = SpinGraph.chain(4, twice_s=1)
        report = lieb_mattis_check(graph, (0, 2), (1, 3))
        assert report.expected_ground_spin == 0.0
        assert report.ground_ok and report.ordering_ok
        e = report.table.energies
        assert e[0.0] < e[1.0] < e[2.0]
        assert min(m for _, _, m in report.margins) > 1e-6

    run_criterion(3, "bipartite antiferromagnet ground spin and ordering",
                  body)


def test_criterion_04_martingale_certificates():
    def body():
        spec = aklt_chain()
        for length in range(4, 9):
            cert = certify_gap(spec, length)
            assert cert.assumption_holds
            assert cert.epsilon < 1.0 / np.sqrt(2.0)
            assert cert.basic_bound is not None
            assert cert.basic_bound <= cert.refined_bound
            assert cert.refined_bound <= cert.exact_lambda1 + 1e-9
            assert 1.0 < cert.improvement_ratio <= 2.0

    run_criterion(4, "martingale gap certificates, lengths 4..8", body,
                  budget=120.0)


def test_criterion_05_finitely_correlated_state():
    def body():
        triple = aklt_triple()
        term = aklt_edge_term()
        eye3 = np.eye(3)
        for width, offset in ((2, 0), (3, 0), (3, 1), (4, 0), (4, 1), (4, 2)):
            op = term
            for _ in range(offset):
                op = np.kron(eye3, op)
            for _ in range(width - 2 - offset):
                op = np.kron(op, eye3)
            assert abs(block_expectation(triple, op, width=width)) < 1e-12
        spectrum = correlation_length(triple.cp_map)
        assert np.max(np.abs(spectrum.eigenvalues[1:] - (-1.0 / 3.0))) < 1e-12
        s3 = spin_matrices(SpinValue(2))[2]
        curve = two_point_function(triple, s3, s3, range(1, 9)).real
        ratios = curve[1:] / curve[:-1]
        assert np.max(np.abs(ratios - (-1.0 / 3.0))) < 1e-10

    run_criterion(5, "valence bond state: frustration freeness and decay",
                  body, budget=1.0)


def test_criterion_06_propagation_bound_soundness():
    def body():
        graph = SpinGraph.chain(8, twice_s=1)
        model = ModelSpec.xxx()
        b_site = 7
        b_op = spin_matrices(SpinValue(1))[2]
        b_norm = 0.5
        times = np.linspace(0.0, 3.0, 7)
        lambdas = (0.5, 1.0)
        for probe in graph.site_ids:
            profile = dynamic_commutator_profile(
                graph, model, probe, b_site, b_op, times,
                n_directions=16, seed=0, polish=False)
            envelopes = [
                lieb_robinson_envelope(graph, model, lam, probe, (b_site,),
                                       b_norm, times)
                for lam in lambdas
            ]
            for j in range(len(times)):
                bound = min(env.values[j] for env in envelopes)
                assert profile.values[j] <= bound + 1e-9

    run_criterion(6, "commutator growth below the propagation bound", body,
                  budget=120.0)


def test_criterion_07_exponential_clustering():
    def body():
        graph = SpinGraph.ring(9, twice_s=2)
        model = ModelSpec.aklt()
        s3 = spin_matrices(SpinValue(2))[2]
        targets = [site for site in graph.site_ids if site != 0]
        scan = correlation_scan(graph, model, s3, 0, targets, sector=0.0)
        near = [(d, c) for d, c in zip(scan.distances, scan.connected) if d <= 3]
        fit = fit_decay([d for d, _ in near], [c for _, c in near])
        assert abs(fit.rate - np.log(3.0)) / np.log(3.0) < 0.05
        lam = 0.4
        phi_norm = interaction_norm(graph, interaction_from_model(graph, model), lam)
        mu = clustering_rate_floor(scan.sector_gap, phi_norm, lam)
        assert fit.rate >= mu > 0.0

    run_criterion(7, "clustering rate against the transfer operator", body)


def test_criterion_08_exclusion_process_equivalence():
    def body():
        rng = np.random.default_rng(8)
        for _ in range(10):
            n_sites = int(rng.integers(3, 7))
            graph = random_rate_graph(rng, n_sites)
            for n in range(n_sites + 1):
                report = heisenberg_equivalence_check(graph, n)
                assert report.max_abs_difference <= 1e-12
        test_graphs = (
            [SpinGraph.chain(n, twice_s=1) for n in range(2, 8)]
            + [SpinGraph.ring(n, twice_s=1) for n in range(3, 8)]
            + [SpinGraph.complete(n, twice_s=1) for n in range(3, 8)]
            + [random_rate_graph(np.random.default_rng(800 + k), 7)
               for k in range(3)]
        )
        for graph in test_graphs:
            table = aldous_scan(graph)
            assert table.max_rel_deviation <= 1e-8
            assert table.uniform_across_sectors

    run_criterion(8, "exclusion process equals the spin sector", body)


def test_criterion_09_classical_limit_lower_bound():
    def body():
        model = ModelSpec.xxx()
        betas = (0.5, 1.0, 2.0, 4.0)
        constants = []
        for twice_s in (1, 2, 3, 4, 5):
            graph = SpinGraph.chain(2, twice_s=twice_s)
            report = sandwich_check(graph, model, betas)
            assert min(report.lower_margins) >= 0.0
            constants.append(effective_upper_constant(graph, model, 1.0))
        assert all(0.0 < c < 4.0 for c in constants)

    run_criterion(9, "classical partition function lower bound", body,
                  budget=60.0)


def test_criterion_10_structural_invariants():
    def body():
        # Hermiticity of assembled Hamiltonians
        cases = (
            (SpinGraph.chain(5, twice_s=1), ModelSpec.xxx()),
            (SpinGraph.chain(4, twice_s=2), ModelSpec.aklt()),
            (SpinGraph.ring(4, twice_s=1), ModelSpec.xxz(1.5)),
        )
        for graph, model in cases:
            h = build_hamiltonian(graph, model).matrix.toarray()
            assert np.max(np.abs(h - h.conj().T)) < 1e-12
        # magnetization sector block structure
        graph = SpinGraph.chain(5, twice_s=1)
        ham = build_hamiltonian(graph, ModelSpec.xxx())
        sectors = magnetization_sectors(ham)
        dense = ham.matrix.toarray()
        labels = np.empty(dense.shape[0])
        for m_val, idx in sectors.items():
            labels[idx] = m_val
        off = np.abs(labels[:, None] - labels[None, :]) > 1e-12
        assert np.max(np.abs(dense[off])) < 1e-12
        # resolution of identity for the martingale projections
        spec = aklt_chain()
        projectors = martingale_projectors(spec, 5)
        total = sum(projectors)
        assert np.max(np.abs(total - np.eye(total.shape[0]))) < 1e-10
        # edge term dominates gamma2 times the complement of its kernel
        kd = spec.kernel_data(2)
        g = kd.basis @ kd.basis.conj().T
        term = aklt_edge_term()
        w = np.linalg.eigvalsh(term - spec.gamma2 * (np.eye(9) - g))
        assert w[0] >= -1e-10
        # Heisenberg evolution is a one-parameter group
        evolver = SpectralEvolver(build_hamiltonian(SpinGraph.chain(4, twice_s=1),
                                                    ModelSpec.xxx()))
        rng = np.random.default_rng(3)
        a = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
        once = evolver.evolve(evolver.evolve(a, 0.7), 0.4)
        direct = evolver.evolve(a, 1.1)
        assert np.max(np.abs(once - direct)) < 1e-12
        # the exclusion semigroup is stochastic
        path = SpinGraph.chain(4, twice_s=1)
        gen, _ = ssep_generator(path, 2)
        semigroup = expm(-0.7 * gen)
        assert np.min(semigroup) > -1e-12
        assert np.max(np.abs(semigroup.sum(axis=1) - 1.0)) < 1e-12

    run_criterion(10, "structural invariant suite", body)
