"""Finitely correlated states on spin chains.

A translation-invariant state is described by a completely positive
unital map E acting on B(C^n (x) C^k) -> B(C^k) together with a density
matrix rho on the auxiliary space C^k fixed by B -> E(1 (x) B).
Expectations of strictly local observables come from iterating the map:

    omega(A_1 (x) ... (x) A_N) = Tr[ rho E_{A_1}(E_{A_2}(... E_{A_N}(1)))]

For pure maps E(X) = V* X V with an isometry V: C^k -> C^n (x) C^k.
The spin-1 chain admits the valence-bond isometry with n = 3, k = 2
whose induced state is the AKLT ground state; its transfer operator has
eigenvalues {1, -1/3, -1/3, -1/3}, hence correlation length 1/ln 3.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ISOMETRY_TOL = 1e-12


@dataclass(eq=False)
class Isometry:
    """A linear map V: C^k -> C^n (x) C^k stored as an (n k, k) matrix.

    The tensor factor ordering is physical-major: row p * k + a is the
    basis vector |p> (x) |a>.
    """

    matrix: np.ndarray
    n: int
    k: int

    def __post_init__(self):
        v = np.asarray(self.matrix, dtype=complex)
        if v.shape != (self.n * self.k, self.k):
            raise ValueError("isometry must be an (n k, k) = (%d, %d) matrix, got %s"
                             % (self.n * self.k, self.k, v.shape))
        defect = np.max(np.abs(v.conj().T @ v - np.eye(self.k)))
        if defect > ISOMETRY_TOL:
            raise ValueError("V*V differs from the identity by %.3e" % defect)
        object.__setattr__(self, "matrix", v)


@dataclass(eq=False)
class CpUnitalMap:
    """A completely positive unital map E: B(C^n (x) C^k) -> B(C^k).

    Stored through Kraus pieces: E(X) = sum_i V_i* X V_i with
    sum_i V_i* V_i = 1.  A single isometric piece gives a pure map.
    """

    kraus: tuple
    n: int
    k: int

    def __post_init__(self):
        pieces = tuple(np.asarray(v, dtype=complex) for v in self.kraus)
        if not pieces:
            raise ValueError("a CP map needs at least one Kraus piece")
        for v in pieces:
            if v.shape != (self.n * self.k, self.k):
                raise ValueError("Kraus piece has shape %s, expected (%d, %d)"
                                 % (v.shape, self.n * self.k, self.k))
        unit = sum(v.conj().T @ v for v in pieces)
        defect = np.max(np.abs(unit - np.eye(self.k)))
        if defect > 1e-10:
            raise ValueError("map is not unital: sum V_i* V_i deviates by %.3e" % defect)
        object.__setattr__(self, "kraus", pieces)

    @property
    def pure(self) -> bool:
        return len(self.kraus) == 1

    def apply(self, a, b) -> np.ndarray:
        """E(A (x) B) for A on the physical and B on the auxiliary factor."""
        x = np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))
        return sum(v.conj().T @ x @ v for v in self.kraus)

    def transfer_matrix(self, a=None) -> np.ndarray:
        """Matrix of B -> E(A (x) B) acting on row-major vec(B); A defaults to 1."""
        if a is None:
            a = np.eye(self.n)
        k = self.k
        t = np.empty((k * k, k * k), dtype=complex)
        for p in range(k):
            for q in range(k):
                unit = np.zeros((k, k), dtype=complex)
                unit[p, q] = 1.0
                t[:, p * k + q] = self.apply(a, unit).reshape(-1)
        return t


def make_pure_map(v) -> CpUnitalMap:
    """Wrap an isometry V into the pure CP unital map X -> V* X V."""
    if not isinstance(v, Isometry):
        v = np.asarray(v, dtype=complex)
        nk, k = v.shape
        if nk % k != 0:
            raise ValueError("matrix shape %s is not (n k, k)" % (v.shape,))
        v = Isometry(v, nk // k, k)
    return CpUnitalMap((v.matrix,), v.n, v.k)


def aklt_isometry() -> Isometry:
    """The valence-bond isometry V: C^2 -> C^3 (x) C^2 of the spin-1 chain.

    V embeds the auxiliary spin-1/2 into the spin-1/2 subrepresentation of
    (spin 1) (x) (spin 1/2), with Condon-Shortley Clebsch-Gordan phases:

    V|1/2>  = sqrt(2/3) |1>(x)|-1/2> - sqrt(1/3) |0>(x)|1/2>
    V|-1/2> = sqrt(1/3) |0>(x)|-1/2> - sqrt(2/3) |-1>(x)|1/2>

    Physical basis |1>, |0>, |-1>; auxiliary basis |1/2>, |-1/2>.
    """
    r13 = np.sqrt(1.0 / 3.0)
    r23 = np.sqrt(2.0 / 3.0)
    v = np.zeros((6, 2), dtype=complex)
    v[0 * 2 + 1, 0] = r23   # |1> (x) |-1/2>
    v[1 * 2 + 0, 0] = -r13  # |0> (x) |1/2>
    v[1 * 2 + 1, 1] = r13   # |0> (x) |-1/2>
    v[2 * 2 + 0, 1] = -r23  # |-1> (x) |1/2>
    return Isometry(v, 3, 2)


@dataclass(eq=False)
class FcsTriple:
    """(E, rho) with rho the invariant auxiliary state; n and k for bookkeeping."""

    cp_map: CpUnitalMap
    rho: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        k = self.cp_map.k
        if rho.shape != (k, k):
            raise ValueError("rho must be %d x %d" % (k, k))
        if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
            raise ValueError("rho must be Hermitian")
        if abs(np.trace(rho) - 1.0) > 1e-10:
            raise ValueError("rho must have unit trace")
        object.__setattr__(self, "rho", rho)


@dataclass(eq=False)
class InvariantStateResult:
    rho: np.ndarray
    unique: bool
    fixed_point_defect: float


def invariant_state(cp_map: CpUnitalMap, tol=1e-10) -> InvariantStateResult:
    """The auxiliary state rho with Tr[rho E(1 (x) B)] = Tr[rho B] for all B.

    Computed as the fixed point of the adjoint transfer operator,
    Hermitized and trace-normalized.  When the eigenvalue 1 of the
    transfer operator is degenerate (within ``tol``), the returned state
    comes from the dominant eigenspace and the result is flagged as
    non-unique.
    """
    t = cp_map.transfer_matrix()
    evals, evecs = np.linalg.eig(t.conj().T)
    dist = np.abs(evals - 1.0)
    best = int(np.argmin(dist))
    if dist[best] > 1e-8:
        raise ValueError("transfer operator has no fixed point: nearest eigenvalue %r"
                         % evals[best])
    unique = int(np.sum(dist <= tol)) == 1
    k = cp_map.k
    rho = evecs[:, best].reshape(k, k)
    rho = (rho + rho.conj().T) / 2.0
    tr = np.trace(rho).real
    if abs(tr) < 1e-12:
        raise ValueError("fixed point has vanishing trace; cannot normalize")
    rho = rho / tr
    w = np.linalg.eigvalsh(rho)
    if w.min() < -1e-10:
        raise ValueError("fixed point is not positive semidefinite (min eigenvalue %.3e)"
                         % w.min())
    defect = float(np.max(np.abs(cp_map.transfer_matrix().conj().T @ rho.reshape(-1)
                                 - rho.reshape(-1))))
    return InvariantStateResult(rho, unique, defect)


def aklt_triple() -> FcsTriple:
    """The spin-1 valence-bond triple (pure map, rho = 1/2)."""
    cp_map = make_pure_map(aklt_isometry())
    res = invariant_state(cp_map)
    return FcsTriple(cp_map, res.rho)


def fcs_expectation(triple: FcsTriple, observables) -> complex:
    """omega(A_1 (x) ... (x) A_N) for a list of single-site observables.

    Evaluated right to left: B <- E(A_j (x) B) starting from B = 1.
    """
    cp_map = triple.cp_map
    b = np.eye(cp_map.k, dtype=complex)
    for a in reversed(list(observables)):
        a = np.asarray(a, dtype=complex)
        if a.shape != (cp_map.n, cp_map.n):
            raise ValueError("observable shape %s does not match physical dimension %d"
                             % (a.shape, cp_map.n))
        b = cp_map.apply(a, b)
    return complex(np.trace(triple.rho @ b))


def blocked_kraus(cp_map: CpUnitalMap, width: int):
    """Kraus pieces of the map for a block of ``width`` consecutive sites.

    For a pure map with isometry V this is the iterated isometry
    V_m = (1_{n^{m-1}} (x) V) ... (1_n (x) V) V mapping C^k into
    (C^n)^{(x) m} (x) C^k.
    """
    if width < 1:
        raise ValueError("width must be >= 1")
    n, k = cp_map.n, cp_map.k
    pieces = list(cp_map.kraus)
    for m in range(2, width + 1):
        grown = []
        for left in cp_map.kraus:
            lift = np.kron(np.eye(n ** (m - 1), dtype=complex), left)
            for right in pieces:
                grown.append(lift @ right)
        pieces = grown
    return tuple(pieces)


def block_expectation(triple: FcsTriple, operator, width: int) -> complex:
    """omega(O) for an arbitrary operator O on ``width`` consecutive sites."""
    cp_map = triple.cp_map
    n, k = cp_map.n, cp_map.k
    operator = np.asarray(operator, dtype=complex)
    if operator.shape != (n ** width, n ** width):
        raise ValueError("operator shape %s does not match %d sites of dimension %d"
                         % (operator.shape, width, n))
    lifted = np.kron(operator, np.eye(k, dtype=complex))
    acc = np.zeros((k, k), dtype=complex)
    for piece in blocked_kraus(cp_map, width):
        acc += piece.conj().T @ lifted @ piece
    return complex(np.trace(triple.rho @ acc))


def two_point_function(triple: FcsTriple, a, b, separations) -> np.ndarray:
    """omega(A_0 B_r) - omega(A) omega(B) for the listed separations r >= 1."""
    cp_map = triple.cp_map
    eye = np.eye(cp_map.n, dtype=complex)
    mean_a = fcs_expectation(triple, [a]).real
    mean_b = fcs_expectation(triple, [b]).real
    out = []
    for r in separations:
        if r < 1:
            raise ValueError("separations must be >= 1")
        obs = [a] + [eye] * (r - 1) + [b]
        out.append(fcs_expectation(triple, obs) - mean_a * mean_b)
    return np.asarray(out)


@dataclass(eq=False)
class CorrelationLengthResult:
    eigenvalues: np.ndarray      # transfer spectrum, sorted by descending modulus
    subleading_modulus: float
    xi: float
    dominant_degenerate: bool


def correlation_length(cp_map: CpUnitalMap, tol=1e-10) -> CorrelationLengthResult:
    """Correlation length from the transfer spectrum: xi = -1 / ln |lambda_2|.

    Requires the dominant eigenvalue 1 to be simple; a degenerate
    dominant eigenvalue is flagged.  A map with trivial auxiliary space
    (k = 1) has no subleading eigenvalue and returns xi = 0.
    """
    t = cp_map.transfer_matrix()
    evals = np.linalg.eigvals(t)
    order = np.argsort(-np.abs(evals))
    evals = evals[order]
    if abs(abs(evals[0]) - 1.0) > 1e-8:
        raise ValueError("dominant transfer eigenvalue has modulus %r, expected 1"
                         % abs(evals[0]))
    if len(evals) == 1:
        return CorrelationLengthResult(evals, 0.0, 0.0, False)
    degenerate = bool(np.abs(np.abs(evals[1]) - np.abs(evals[0])) <= tol)
    mu2 = float(np.abs(evals[1]))
    if degenerate or mu2 >= 1.0:
        xi = np.inf
    elif mu2 <= 0.0:
        xi = 0.0
    else:
        xi = -1.0 / np.log(mu2)
    return CorrelationLengthResult(evals, mu2, float(xi), degenerate)


# ---------------------------------------------------------------------------
# CSV import/export of isometries
# ---------------------------------------------------------------------------


def export_isometry_csv(v: Isometry, path):
    """Write an isometry as row-major complex entries with an (n, k) header."""
    with open(path, "w") as fh:
        fh.write("# n=%d k=%d\n" % (v.n, v.k))
        fh.write("re,im\n")
        for value in v.matrix.reshape(-1):
            fh.write("%s,%s\n" % (repr(float(value.real)), repr(float(value.imag))))


def import_isometry_csv(path) -> Isometry:
    """Read an isometry written by :func:`export_isometry_csv`."""
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("# n="):
            raise ValueError("missing isometry CSV header")
        fields = dict(part.split("=", 1) for part in header[2:].split(" "))
        n, k = int(fields["n"]), int(fields["k"])
        fh.readline()
        values = []
        for line in fh:
            re_part, im_part = line.strip().split(",")
            values.append(float(re_part) + 1j * float(im_part))
    if len(values) != n * k * k:
        raise ValueError("expected %d entries, found %d" % (n * k * k, len(values)))
    return Isometry(np.asarray(values).reshape(n * k, k), n, k)
