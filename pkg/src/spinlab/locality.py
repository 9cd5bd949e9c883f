"""Propagation bounds and decay of correlations on finite spin systems.

Three related capabilities live here.  A dense spectral evolver computes
the Heisenberg evolution of observables exactly on systems small enough
to diagonalise.  Commutator profiles measure how fast the support of an
evolved observable spreads, and are compared against Lieb-Robinson
envelopes built from the interaction norm of the model.  Ground state
correlation scans quantify spatial clustering, whose decay rate can be
compared with the guaranteed floor derived from the spectral gap.

Conventions.  The evolution is alpha_t(A) = exp(itH) A exp(-itH).  All
envelope formulas use the decay-weighted interaction norm from
`spinops.interaction_norm`; exponentials are allowed to overflow to
infinity, in which case the trivial commutator bound 2 |A| |B| wins.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.optimize

from .spectra import eigen_spectrum
from .spinops import (
    SparseHermitian,
    build_hamiltonian,
    embed_site_operator,
    interaction_from_model,
    interaction_norm,
    magnetization_sectors,
)

DENSE_EVOLVER_CAP = 4096
HERMITICITY_TOL = 1e-12
DEGENERACY_TOL = 1e-9

__all__ = [
    "SpectralEvolver",
    "su_basis",
    "commutator_norm",
    "CommutatorProfile",
    "dynamic_commutator_profile",
    "LrEnvelope",
    "lieb_robinson_envelope",
    "CorrelationScan",
    "correlation_scan",
    "DecayFit",
    "fit_decay",
    "clustering_rate_floor",
    "imaginary_time_envelope",
]


class SpectralEvolver:
    """Exact Heisenberg dynamics from one dense diagonalisation."""

    def __init__(self, hamiltonian, dense_cap: int = DENSE_EVOLVER_CAP):
        if isinstance(hamiltonian, SparseHermitian):
            mat = hamiltonian.matrix.toarray()
        else:
            mat = np.asarray(hamiltonian, dtype=complex)
        if mat.shape[0] != mat.shape[1]:
            raise ValueError("hamiltonian must be square")
        if mat.shape[0] > dense_cap:
            raise ValueError(
                "dimension %d exceeds the dense cap %d" % (mat.shape[0], dense_cap)
            )
        scale = max(1.0, float(np.max(np.abs(mat))))
        if np.max(np.abs(mat - mat.conj().T)) > HERMITICITY_TOL * scale:
            raise ValueError("hamiltonian must be Hermitian")
        self.energies, self.vectors = np.linalg.eigh(mat)
        self.dim = mat.shape[0]

    @property
    def ground_energy(self) -> float:
        return float(self.energies[0])

    @property
    def ground_state(self) -> np.ndarray:
        return self.vectors[:, 0]

    @property
    def ground_degenerate(self) -> bool:
        if self.dim < 2:
            return False
        spread = max(1.0, float(self.energies[-1] - self.energies[0]))
        return bool(self.energies[1] - self.energies[0] <= DEGENERACY_TOL * spread)

    @property
    def gap(self) -> float:
        return float(self.energies[1] - self.energies[0])

    def evolve(self, operator: np.ndarray, t: float) -> np.ndarray:
        """alpha_t(A) for real t."""
        u = self.vectors
        m = u.conj().T @ np.asarray(operator, dtype=complex) @ u
        phases = np.exp(1j * t * self.energies)
        m = m * np.outer(phases, phases.conj())
        return u @ m @ u.conj().T

    def ground_expectation(self, operator: np.ndarray) -> complex:
        psi = self.ground_state
        return complex(psi.conj() @ (np.asarray(operator, dtype=complex) @ psi))

    def imaginary_time_correlation(self, a, b, btimes, connected=False):
        """<Omega, A exp(-b (H - E0)) B Omega> for each b in `btimes`.

        With `connected` the observable B is centered by its ground state
        expectation first.  Computed in the eigenbasis, so large b only
        ever produces decaying weights.
        """
        a = np.asarray(a, dtype=complex)
        b = np.asarray(b, dtype=complex)
        psi = self.ground_state
        if connected:
            b = b - self.ground_expectation(b) * np.eye(self.dim)
        ca = self.vectors.conj().T @ (a.conj().T @ psi)
        cb = self.vectors.conj().T @ (b @ psi)
        shifts = self.energies - self.ground_energy
        btimes = np.asarray(btimes, dtype=float)
        weights = np.exp(-np.outer(btimes, shifts))
        return weights @ (ca.conj() * cb)


def su_basis(dim: int):
    """Traceless Hermitian basis of the dim x dim matrices (dim^2 - 1 of them)."""
    if dim < 2:
        raise ValueError("need a local dimension of at least 2")
    basis = []
    for j in range(dim):
        for k in range(j + 1, dim):
            sym = np.zeros((dim, dim), dtype=complex)
            sym[j, k] = sym[k, j] = 1.0
            basis.append(sym)
            anti = np.zeros((dim, dim), dtype=complex)
            anti[j, k] = -1j
            anti[k, j] = 1j
            basis.append(anti)
    for level in range(1, dim):
        diag = np.zeros(dim, dtype=complex)
        diag[:level] = 1.0
        diag[level] = -level
        basis.append(np.diag(diag * np.sqrt(2.0 / (level * (level + 1)))))
    return basis


def commutator_norm(a: np.ndarray, b: np.ndarray) -> float:
    """Operator norm of [a, b]."""
    comm = a @ b - b @ a
    herm_defect = np.max(np.abs(comm + comm.conj().T)) if comm.size else 0.0
    if herm_defect <= 1e-10 * max(1.0, float(np.max(np.abs(comm)))):
        return float(np.max(np.abs(np.linalg.eigvalsh(1j * comm))))
    return float(np.linalg.norm(comm, 2))


@dataclass(frozen=True)
class CommutatorProfile:
    """Measured commutator growth sup_A |[alpha_t(A), B]| / |A|."""

    probe_site: object
    b_site: object
    times: tuple
    values: tuple
    b_norm: float


def _maximise_direction(kmats, tmats, n_directions, seed, polish):
    """Maximum of |sum v_i K_i| / |sum v_i T_i| over directions v."""

    def value(v):
        local = sum(c * t for c, t in zip(v, tmats))
        denom = float(np.max(np.abs(np.linalg.eigvalsh(local))))
        if denom <= 1e-14:
            return 0.0
        num = sum(c * k for c, k in zip(v, kmats))
        return float(np.max(np.abs(np.linalg.eigvalsh(1j * num)))) / denom

    rng = np.random.default_rng(seed)
    best_value = 0.0
    best_v = None
    for _ in range(n_directions):
        v = rng.normal(size=len(kmats))
        v /= np.linalg.norm(v)
        cur = value(v)
        if cur > best_value:
            best_value = cur
            best_v = v
    if polish and best_v is not None:
        res = scipy.optimize.minimize(
            lambda v: -value(v),
            best_v,
            method="Nelder-Mead",
            options={"maxiter": 400, "xatol": 1e-8, "fatol": 1e-12},
        )
        best_value = max(best_value, -float(res.fun))
    return best_value


def dynamic_commutator_profile(
    graph,
    model,
    probe_site,
    b_site,
    b_op,
    times,
    n_directions: int = 96,
    seed: int = 0,
    polish: bool = True,
) -> CommutatorProfile:
    """Measure C_B(x, t) with A running over one site's observables.

    The commutator is linear in A, so each time step evolves the local
    operator basis once and the direction search works with precomputed
    commutators.  The result is a lower estimate of the supremum (and an
    excellent one in practice); any valid envelope must dominate it.
    """
    ham = build_hamiltonian(graph, model)
    evolver = SpectralEvolver(ham)
    basis = ham.basis
    site_dims = dict(graph.sites)
    d_probe = site_dims[probe_site].dim
    tmats = su_basis(d_probe)
    embedded = [
        embed_site_operator(basis, probe_site, t).toarray() for t in tmats
    ]
    b_emb = embed_site_operator(basis, b_site, np.asarray(b_op, dtype=complex))
    b_dense = b_emb.toarray()
    b_norm = float(np.linalg.norm(np.asarray(b_op, dtype=complex), 2))
    values = []
    for t in times:
        kmats = []
        for op in embedded:
            evolved = evolver.evolve(op, float(t))
            kmats.append(evolved @ b_dense - b_dense @ evolved)
        values.append(_maximise_direction(kmats, tmats, n_directions, seed, polish))
    return CommutatorProfile(
        probe_site, b_site, tuple(float(t) for t in times), tuple(values), b_norm
    )


@dataclass(frozen=True)
class LrEnvelope:
    """Upper bounds for C_B(x, t) at a fixed probe site.

    `theorem` is the site-resolved sum, `corollary` the coarser form with
    the distance to the whole support, `trivial` the norm bound 2|B|.
    `values` is the pointwise minimum, which is what a measurement has to
    stay below.
    """

    probe_site: object
    b_sites: tuple
    times: tuple
    phi_norm: float
    decay_rate: float
    theorem: tuple
    corollary: tuple
    trivial: float
    values: tuple


def lieb_robinson_envelope(
    graph,
    model,
    lam: float,
    probe_site,
    b_sites,
    b_norm: float,
    times,
    n_param=None,
) -> LrEnvelope:
    """Propagation envelope for a probe site against support `b_sites`.

    Overflowing exponentials are deliberately left as infinity; the
    pointwise minimum with the trivial bound keeps every value finite.
    """
    phi = interaction_from_model(graph, model)
    phi_norm = interaction_norm(graph, phi, lam, n_param=n_param)
    dist = graph.distance_matrix()
    ix = graph.index(probe_site)
    iys = [graph.index(y) for y in b_sites]
    if not iys:
        raise ValueError("the support of B must be non-empty")
    inside = ix in iys
    d_x_to_set = 0.0 if inside else float(min(dist[ix, iy] for iy in iys))
    theorem = []
    corollary = []
    times = [float(t) for t in times]
    with np.errstate(over="ignore"):
        for t in times:
            growth = np.exp(2.0 * abs(t) * phi_norm)
            spread = sum(
                np.exp(-lam * dist[ix, iy]) * (growth - 1.0) * 2.0 * b_norm
                for iy in iys
                if iy != ix
            )
            if inside:
                theorem.append(float(2.0 * b_norm * growth + spread))
                corollary.append(np.inf)
            else:
                theorem.append(float(spread))
                corollary.append(
                    float(
                        2.0
                        * len(iys)
                        * b_norm
                        * (growth - 1.0)
                        * np.exp(-lam * d_x_to_set)
                    )
                )
    trivial = 2.0 * b_norm
    values = tuple(
        float(min(th, co, trivial)) for th, co in zip(theorem, corollary)
    )
    return LrEnvelope(
        probe_site,
        tuple(b_sites),
        tuple(times),
        float(phi_norm),
        float(lam),
        tuple(theorem),
        tuple(corollary),
        float(trivial),
        values,
    )


@dataclass(frozen=True)
class CorrelationScan:
    """Equal-time two-point functions from one ground state."""

    base_site: object
    target_sites: tuple
    distances: tuple
    raw: tuple
    connected: tuple
    ground_energy: float
    sector_gap: float


def _diagonal_site_values(graph, basis, indices, site, diag):
    """Diagonal observable values per basis state, restricted to `indices`."""
    pos = basis.index(site)
    dims = basis.local_dims
    stride = 1
    for d in dims[pos + 1:]:
        stride *= d
    local = (np.asarray(indices) // stride) % dims[pos]
    return diag[local]


def correlation_scan(
    graph,
    model,
    observable,
    base_site,
    target_sites,
    sector=None,
    dense_cap: int = DENSE_EVOLVER_CAP,
) -> CorrelationScan:
    """<O_x O_y> and its connected part in the ground state.

    With a magnetization sector the observable must be diagonal (it then
    preserves the sector and every product reduces to arithmetic on basis
    state labels); the ground state is taken inside that sector.  Raises
    when the bottom of the chosen (sub)spectrum is degenerate, because
    the connected correlation is then ambiguous.
    """
    obs = np.asarray(observable, dtype=complex)
    ham = build_hamiltonian(graph, model)
    basis = ham.basis
    if sector is not None:
        if np.max(np.abs(obs - np.diag(np.diag(obs)))) > 1e-12:
            raise ValueError("sector scans need a diagonal observable")
        spec = eigen_spectrum(ham, sector=sector, k=2)
        indices = magnetization_sectors(ham)[sector]
        psi = spec.eigenvectors[:, 0]
        weights = np.abs(psi) ** 2
        diag = np.real(np.diag(obs))
        base_vals = _diagonal_site_values(graph, basis, indices, base_site, diag)
        raw = []
        connected = []
        base_mean = float(weights @ base_vals)
        for target in target_sites:
            tvals = _diagonal_site_values(graph, basis, indices, target, diag)
            joint = float(weights @ (base_vals * tvals))
            raw.append(joint)
            connected.append(joint - base_mean * float(weights @ tvals))
    else:
        spec = eigen_spectrum(ham, dense_cap=dense_cap)
        vec = spec.eigenvectors[:, 0]
        base_op = embed_site_operator(basis, base_site, obs)
        base_vec = base_op @ vec
        base_mean = float(np.real(vec.conj() @ base_vec))
        raw = []
        connected = []
        for target in target_sites:
            t_op = embed_site_operator(basis, target, obs)
            joint = float(np.real(vec.conj() @ (base_op @ (t_op @ vec))))
            raw.append(joint)
            t_mean = float(np.real(vec.conj() @ (t_op @ vec)))
            connected.append(joint - base_mean * t_mean)
    if spec.eigenvalues.size < 2:
        raise ValueError("need at least two levels to report a gap")
    sector_gap = float(spec.eigenvalues[1] - spec.eigenvalues[0])
    if sector_gap <= DEGENERACY_TOL:
        raise ValueError("degenerate bottom of the spectrum; no unique state")
    dist = graph.distance_matrix()
    ib = graph.index(base_site)
    distances = tuple(float(dist[ib, graph.index(t)]) for t in target_sites)
    return CorrelationScan(
        base_site,
        tuple(target_sites),
        distances,
        tuple(raw),
        tuple(connected),
        float(spec.eigenvalues[0]),
        sector_gap,
    )


@dataclass(frozen=True)
class DecayFit:
    """Least squares fit of log |c| against distance."""

    rate: float
    intercept: float
    r_squared: float
    n_used: int


def fit_decay(distances, values, floor: float = 1e-14) -> DecayFit:
    """Fit |c(r)| ~ exp(intercept - rate r), ignoring values below `floor`."""
    distances = np.asarray(distances, dtype=float)
    values = np.abs(np.asarray(values, dtype=float))
    mask = values > floor
    if mask.sum() < 2:
        raise ValueError("need at least two points above the floor")
    x = distances[mask]
    y = np.log(values[mask])
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    total = float(np.sum((y - np.mean(y)) ** 2))
    resid = float(np.sum((y - fitted) ** 2))
    r_squared = 1.0 if total == 0.0 else 1.0 - resid / total
    return DecayFit(float(-slope), float(intercept), r_squared, int(mask.sum()))


def clustering_rate_floor(gap: float, phi_norm: float, lam: float) -> float:
    """Guaranteed decay rate gap*lam / (4 phi_norm + gap) for gapped systems."""
    if gap <= 0.0:
        raise ValueError("the floor needs a positive gap")
    return float(gap * lam / (4.0 * phi_norm + gap))


def imaginary_time_envelope(a_norm, b_norm, gap, btimes) -> np.ndarray:
    """|A| |B| exp(-gap b): the coarse decay bound in imaginary time."""
    btimes = np.asarray(btimes, dtype=float)
    if np.any(btimes < 0):
        raise ValueError("imaginary times must be non-negative")
    return a_norm * b_norm * np.exp(-gap * btimes)
