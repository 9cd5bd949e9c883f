"""The symmetric simple exclusion process and its spin chain double.

A configuration places n indistinguishable particles on the vertices of
a graph, at most one per vertex.  The process exchanges the contents of
the two ends of each edge with that edge's rate.  Its generator, as a
matrix on functions of configurations, is positive semidefinite, kills
constants, and generates a stochastic semigroup exp(-tL).

The generator is unitarily equivalent to a sector of the ferromagnetic
Heisenberg model.  A configuration maps to the product basis vector with
spin up (local index 0) on occupied sites; n particles land in the
magnetization sector M = n - |V|/2, and with couplings equal to twice
the rates the restricted Hamiltonian equals the generator up to the
constant shift (sum of rates) / 2.  The exchange identity behind this is
1 - t_xy = 1/2 - 2 S_x . S_y on a pair of spin-1/2 sites.

Rates are read from the edge couplings of a `SpinGraph` whose sites all
carry spin 1/2; they must be strictly positive.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .spinops import SpinGraph, ModelSpec, build_hamiltonian, magnetization_sectors

GENERATOR_CAP = 20000
ALDOUS_REL_TOL = 1e-8
EQUIVALENCE_TOL = 1e-12

__all__ = [
    "configurations",
    "ssep_generator",
    "random_walk_generator",
    "swap_operator",
    "EquivalenceReport",
    "heisenberg_equivalence_check",
    "SectorGapTable",
    "aldous_scan",
]


def _check_rate_graph(graph: SpinGraph) -> None:
    for sid, spin in graph.sites:
        if spin.twice_s != 1:
            raise ValueError("exclusion dynamics needs spin-1/2 at every site")
    if not graph.edges:
        raise ValueError("the graph has no edges")
    for x, y, rate in graph.edges:
        if rate <= 0.0:
            raise ValueError("rate on edge (%r, %r) must be positive" % (x, y))
    if not np.all(np.isfinite(graph.distance_matrix())):
        raise ValueError("the graph must be connected")


def configurations(n_sites: int, n_particles: int):
    """All occupancy vectors with `n_particles` ones, in lexicographic
    order of the occupied position tuples."""
    if not 0 <= n_particles <= n_sites:
        raise ValueError("particle number out of range")
    configs = []
    for occupied in itertools.combinations(range(n_sites), n_particles):
        eta = [0] * n_sites
        for pos in occupied:
            eta[pos] = 1
        configs.append(tuple(eta))
    return tuple(configs)


def ssep_generator(graph: SpinGraph, n_particles: int):
    """Generator matrix L and the configuration list indexing it.

    L[i, i] sums the rates of edges whose endpoints differ in config i;
    L[i, j] = -rate when configs i and j differ by one exchange.
    """
    _check_rate_graph(graph)
    n_sites = len(graph.sites)
    configs = configurations(n_sites, n_particles)
    dim = len(configs)
    if dim > GENERATOR_CAP:
        raise ValueError("configuration space of size %d is too large" % dim)
    position = {eta: i for i, eta in enumerate(configs)}
    edge_ix = [
        (graph.index(x), graph.index(y), rate) for x, y, rate in graph.edges
    ]
    gen = np.zeros((dim, dim))
    for i, eta in enumerate(configs):
        for ix, iy, rate in edge_ix:
            if eta[ix] == eta[iy]:
                continue
            flipped = list(eta)
            flipped[ix], flipped[iy] = flipped[iy], flipped[ix]
            j = position[tuple(flipped)]
            gen[i, i] += rate
            gen[i, j] -= rate
    return gen, configs


def random_walk_generator(graph: SpinGraph) -> np.ndarray:
    """The one-particle generator: the rate-weighted graph Laplacian."""
    gen, _ = ssep_generator(graph, 1)
    return gen


def swap_operator() -> np.ndarray:
    """The unitary exchanging two spin-1/2 sites."""
    t = np.zeros((4, 4))
    t[0, 0] = t[3, 3] = 1.0
    t[1, 2] = t[2, 1] = 1.0
    return t


@dataclass(frozen=True)
class EquivalenceReport:
    """Entrywise comparison of the generator with a Heisenberg sector."""

    n_particles: int
    sector: float
    dimension: int
    shift: float
    max_abs_difference: float

    @property
    def ok(self) -> bool:
        return bool(self.max_abs_difference <= EQUIVALENCE_TOL)


def heisenberg_equivalence_check(graph: SpinGraph, n_particles: int) -> EquivalenceReport:
    """Compare the n-particle generator with the matching spin sector.

    Builds the isotropic model with couplings 2 r on the same graph,
    restricts it to magnetization M = n - |V|/2, aligns the bases (the
    occupied sites carry local index 0), adds the shift (sum of rates)/2
    and reports the largest entrywise deviation.
    """
    gen, configs = ssep_generator(graph, n_particles)
    n_sites = len(graph.sites)
    doubled = SpinGraph(
        graph.sites, tuple((x, y, 2.0 * rate) for x, y, rate in graph.edges)
    )
    ham = build_hamiltonian(doubled, ModelSpec.xxx())
    sector = n_particles - n_sites / 2.0
    sectors = magnetization_sectors(ham)
    if sector not in sectors:
        raise RuntimeError("sector %r missing from the spin model" % sector)
    indices = sectors[sector]
    block = ham.restrict(indices)
    basis = ham.basis
    tensor_index = np.array(
        [basis.index_of(tuple(1 - occ for occ in eta)) for eta in configs]
    )
    order = {int(ix): row for row, ix in enumerate(indices)}
    perm = np.array([order[int(ix)] for ix in tensor_index])
    block = block[np.ix_(perm, perm)]
    shift = 0.5 * sum(rate for _, _, rate in graph.edges)
    diff = gen - (block + shift * np.eye(len(configs)))
    return EquivalenceReport(
        n_particles=n_particles,
        sector=sector,
        dimension=len(configs),
        shift=float(shift),
        max_abs_difference=float(np.max(np.abs(diff))),
    )


@dataclass(frozen=True)
class SectorGapTable:
    """Relaxation gaps of every particle number on one graph."""

    gaps: dict
    one_particle: float
    max_rel_deviation: float
    uniform_across_sectors: bool
    particle_hole_symmetric: bool


def aldous_scan(graph: SpinGraph, rel_tol: float = ALDOUS_REL_TOL) -> SectorGapTable:
    """Spectral gap of the generator for each n from 1 to |V| - 1.

    For a connected graph each sector has a one-dimensional kernel (the
    uniform measure), so the gap is the second eigenvalue.  The scan
    reports whether all gaps agree with the random walk gap to within
    `rel_tol`, and whether the table is particle-hole symmetric.
    """
    _check_rate_graph(graph)
    n_sites = len(graph.sites)
    if n_sites < 2:
        raise ValueError("need at least two sites")
    gaps = {}
    for n in range(1, n_sites):
        gen, _ = ssep_generator(graph, n)
        evals = np.linalg.eigvalsh(gen)
        scale = max(1.0, float(evals[-1]))
        kernel = np.sum(evals <= 1e-10 * scale)
        if kernel != 1:
            raise RuntimeError(
                "kernel dimension %d in the %d-particle sector" % (kernel, n)
            )
        gaps[n] = float(evals[1])
    one = gaps[1]
    max_rel = max(abs(g - one) / one for g in gaps.values())
    ph = all(
        abs(gaps[n] - gaps[n_sites - n]) <= 1e-10 * max(1.0, gaps[n])
        for n in gaps
    )
    return SectorGapTable(
        gaps=gaps,
        one_particle=one,
        max_rel_deviation=float(max_rel),
        uniform_across_sectors=bool(max_rel <= rel_tol),
        particle_hole_symmetric=bool(ph),
    )
