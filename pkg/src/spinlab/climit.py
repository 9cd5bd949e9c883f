"""Classical partition functions and the large-spin sandwich.

For models that are multilinear in the spin operators, the quantum
partition function with per-site normalized operators s = S/|S| squeezes
between two classical integrals over products of unit spheres:

    Z_C(beta)  <=  Z_Q(beta, S)  <=  Z_C(beta (1 + c/S))

with Z_Q normalized by the Hilbert space dimension; for bilinear edge
terms the upper bound holds with the explicit scale (1 + 1/S)^2, which
is of the stated form with c = 2 + 1/S.  Both ends are computable here:
the classical side by an adaptively refined product quadrature (small
systems) or by Monte Carlo, the quantum side by exact diagonalisation.

The classical energy of a configuration of unit vectors is the model's
edge sum with spin operators replaced by the vectors, e.g. the isotropic
term -J Omega_x . Omega_y.  Only the isotropic and anisotropic bilinear
models are accepted; anything with higher powers of the spin operators
at one site has no multilinear classical symbol and is refused.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spinops import ModelSpec, SpinGraph, build_hamiltonian, spin_matrices

QUANTUM_DENSE_CAP = 4096
LOWER_REL_SLACK = 1e-6
QUADRATURE_RTOL = 1e-8

__all__ = [
    "SandwichViolationError",
    "sphere_quadrature",
    "classical_energy_function",
    "ClassicalPartition",
    "classical_partition",
    "classical_partition_mc",
    "normalized_model_hamiltonian",
    "quantum_partition",
    "SandwichReport",
    "sandwich_check",
    "effective_upper_constant",
]


class SandwichViolationError(RuntimeError):
    """The rigorous lower bound failed beyond numerical slack."""


def _edge_weights(model: ModelSpec):
    """Coefficients (planar, axial) of the bilinear edge energy."""
    if model.kind == "xxx":
        return 1.0, 1.0
    if model.kind == "xxz":
        return 1.0 / model.delta, 1.0
    raise ValueError(
        "the classical limit needs a bilinear spin model (xxx or xxz)"
    )


def sphere_quadrature(n_polar: int):
    """Product rule on the unit sphere with weights summing to one.

    Gauss-Legendre in the polar cosine, a uniform periodic rule with
    2 n_polar points in the azimuth.
    """
    if n_polar < 2:
        raise ValueError("need at least two polar nodes")
    u, wu = np.polynomial.legendre.leggauss(n_polar)
    n_az = 2 * n_polar
    phi = 2.0 * np.pi * np.arange(n_az) / n_az
    sin_theta = np.sqrt(1.0 - u ** 2)
    points = np.empty((n_polar * n_az, 3))
    points[:, 0] = np.outer(sin_theta, np.cos(phi)).reshape(-1)
    points[:, 1] = np.outer(sin_theta, np.sin(phi)).reshape(-1)
    points[:, 2] = np.outer(u, np.ones(n_az)).reshape(-1)
    weights = np.outer(wu / 2.0, np.full(n_az, 1.0 / n_az)).reshape(-1)
    return points, weights


def classical_energy_function(graph: SpinGraph, model: ModelSpec):
    """Callable evaluating the classical energy of unit vector configs.

    The argument has shape (..., |V|, 3); vectors are assumed unit.
    """
    planar, axial = _edge_weights(model)
    edge_ix = [(graph.index(x), graph.index(y), j) for x, y, j in graph.edges]

    def energy(config):
        config = np.asarray(config, dtype=float)
        total = np.zeros(config.shape[:-2])
        for ix, iy, j in edge_ix:
            a = config[..., ix, :]
            b = config[..., iy, :]
            planar_part = a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1]
            axial_part = a[..., 2] * b[..., 2]
            total = total - j * (planar * planar_part + axial * axial_part)
        return total

    return energy


@dataclass(frozen=True)
class ClassicalPartition:
    value: float
    n_polar: int
    converged: bool
    last_change: float


def _contract(graph, model, beta, n_polar):
    planar, axial = _edge_weights(model)
    points, weights = sphere_quadrature(n_polar)
    n_sites = len(graph.sites)
    letters = "abc"
    operands = []
    subs = []
    for i in range(n_sites):
        operands.append(weights)
        subs.append(letters[i])
    planar_dot = points[:, :2] @ points[:, :2].T
    axial_dot = np.outer(points[:, 2], points[:, 2])
    for x, y, j in graph.edges:
        kernel = np.exp(beta * j * (planar * planar_dot + axial * axial_dot))
        operands.append(kernel)
        subs.append(letters[graph.index(x)] + letters[graph.index(y)])
    expr = ",".join(subs) + "->"
    return float(np.einsum(expr, *operands, optimize=True))


def classical_partition(
    graph: SpinGraph,
    model: ModelSpec,
    beta: float,
    n_start: int = None,
    rtol: float = QUADRATURE_RTOL,
    max_doublings: int = 4,
) -> ClassicalPartition:
    """Sphere-product integral of exp(-beta H_cl), refined by doubling.

    Quadrature is kept for up to three sites; larger systems should use
    the Monte Carlo variant.
    """
    n_sites = len(graph.sites)
    if n_sites > 3:
        raise ValueError("quadrature is limited to three sites; use Monte Carlo")
    if n_sites == 0:
        raise ValueError("empty graph")
    if n_start is None:
        n_start = 12 if n_sites <= 2 else 8
    cap = 96 if n_sites <= 2 else 32
    n = n_start
    value = _contract(graph, model, beta, n)
    change = np.inf
    for _ in range(max_doublings):
        if 2 * n > cap:
            break
        n *= 2
        refined = _contract(graph, model, beta, n)
        change = abs(refined - value) / max(abs(refined), 1e-300)
        value = refined
        if change <= rtol:
            return ClassicalPartition(value, n, True, float(change))
    return ClassicalPartition(value, n, False, float(change))


def classical_partition_mc(
    graph: SpinGraph,
    model: ModelSpec,
    beta: float,
    n_samples: int = 200_000,
    seed: int = 0,
):
    """Monte Carlo estimate of the classical integral with standard error."""
    energy = classical_energy_function(graph, model)
    rng = np.random.default_rng(seed)
    n_sites = len(graph.sites)
    raw = rng.normal(size=(n_samples, n_sites, 3))
    raw /= np.linalg.norm(raw, axis=-1, keepdims=True)
    values = np.exp(-beta * energy(raw))
    mean = float(np.mean(values))
    stderr = float(np.std(values, ddof=1) / np.sqrt(n_samples))
    return mean, stderr


def normalized_model_hamiltonian(graph: SpinGraph, model: ModelSpec):
    """The model Hamiltonian built from s = S/|S| at every site."""
    planar, axial = _edge_weights(model)
    spins = dict(graph.sites)
    matrices = {sid: spin_matrices(spin) for sid, spin in spins.items()}
    terms = {}
    for x, y, _j in graph.edges:
        sx = spins[x].s
        sy = spins[y].s
        ax = matrices[x]
        ay = matrices[y]
        term = -(
            planar * (np.kron(ax[0], ay[0]) + np.kron(ax[1], ay[1]))
            + axial * np.kron(ax[2], ay[2])
        ) / (sx * sy)
        terms[(x, y)] = term
    return build_hamiltonian(graph, ModelSpec.custom(terms))


def quantum_partition(
    graph: SpinGraph,
    model: ModelSpec,
    beta: float,
    normalized_trace: bool = True,
    dense_cap: int = QUANTUM_DENSE_CAP,
) -> float:
    """Tr exp(-beta H) for the normalized-operator model.

    With `normalized_trace` the trace is divided by the Hilbert space
    dimension, which is the convention under which the classical
    sandwich holds; the raw trace equals the dimension at beta = 0.
    """
    ham = normalized_model_hamiltonian(graph, model)
    dim = ham.matrix.shape[0]
    if dim > dense_cap:
        raise ValueError("dimension %d exceeds the dense cap" % dim)
    evals = np.linalg.eigvalsh(ham.matrix.toarray())
    value = float(np.sum(np.exp(-beta * evals)))
    if normalized_trace:
        value /= dim
    return value


def _uniform_spin(graph: SpinGraph):
    values = {spin.twice_s for _, spin in graph.sites}
    if len(values) != 1:
        raise ValueError("the sandwich check needs one spin magnitude")
    return values.pop() / 2.0


@dataclass(frozen=True)
class SandwichReport:
    """Classical bounds against the quantum values on one beta grid."""

    s: float
    betas: tuple
    z_classical: tuple
    z_quantum: tuple
    z_upper: tuple
    lower_margins: tuple
    upper_margins: tuple

    @property
    def ok(self) -> bool:
        return bool(
            all(m >= 0.0 for m in self.lower_margins)
            and all(m >= 0.0 for m in self.upper_margins)
        )


def sandwich_check(graph: SpinGraph, model: ModelSpec, betas) -> SandwichReport:
    """Verify Z_C(beta) <= Z_Q <= Z_C(beta (1+1/S)^2) on a beta grid.

    Raises SandwichViolationError when the rigorous lower bound fails
    beyond the quadrature slack; the upper margin is reported but a
    failure there raises as well, since for bilinear terms the scaled
    classical integral is a theorem, not a heuristic.
    """
    s = _uniform_spin(graph)
    scale = (1.0 + 1.0 / s) ** 2
    z_c = []
    z_q = []
    z_u = []
    lower = []
    upper = []
    for beta in betas:
        beta = float(beta)
        zc = classical_partition(graph, model, beta).value
        zq = quantum_partition(graph, model, beta)
        zu = classical_partition(graph, model, beta * scale).value
        z_c.append(zc)
        z_q.append(zq)
        z_u.append(zu)
        lower.append(zq - zc)
        upper.append(zu - zq)
        if zq - zc < -LOWER_REL_SLACK * zc:
            raise SandwichViolationError(
                "lower bound failed at beta %g: Z_C %.12g > Z_Q %.12g"
                % (beta, zc, zq)
            )
        if zu - zq < -LOWER_REL_SLACK * zq:
            raise SandwichViolationError(
                "upper bound failed at beta %g: Z_Q %.12g > %.12g"
                % (beta, zq, zu)
            )
    return SandwichReport(
        s=float(s),
        betas=tuple(float(b) for b in betas),
        z_classical=tuple(z_c),
        z_quantum=tuple(z_q),
        z_upper=tuple(z_u),
        lower_margins=tuple(lower),
        upper_margins=tuple(upper),
    )


def effective_upper_constant(
    graph: SpinGraph,
    model: ModelSpec,
    beta: float,
    c_max: float = 8.0,
    tol: float = 1e-6,
) -> float:
    """Smallest c with Z_Q(beta) <= Z_C(beta (1 + c/S)), by bisection.

    Well-defined because the classical integral grows with its argument
    on these models; c_max bounds the search.
    """
    s = _uniform_spin(graph)
    zq = quantum_partition(graph, model, beta)

    def excess(c):
        return classical_partition(graph, model, beta * (1.0 + c / s)).value - zq

    lo, hi = 0.0, c_max
    if excess(hi) < 0.0:
        raise ValueError("c_max too small to bracket the crossing")
    if excess(lo) >= 0.0:
        return 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if excess(mid) >= 0.0:
            hi = mid
        else:
            lo = mid
    return float(hi)
