"""Dense complex linear algebra and multipartite state construction.

Matrices are plain ``numpy`` complex128 arrays (row-major, dense). Party
indices are 1-based everywhere in the public API.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadPartySet,
    BadShape,
    InvariantViolation,
    NoConvergence,
    NonHermitian,
    ShapeMismatch,
    SingularMap,
)

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
PSD_FLOOR = -1e-10
MAX_TOTAL_DIM = 256


@dataclass(frozen=True)
class SystemShape:
    """Party dimension vector ``(d_1, ..., d_n)``."""

    dims: tuple[int, ...]

    def __init__(self, dims: Iterable[int]):
        dims = tuple(int(d) for d in dims)
        if len(dims) < 1:
            raise BadShape("a system needs at least one party")
        if any(d < 2 for d in dims):
            raise BadShape(f"every party dimension must be >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims, dtype=object))

    def require_dense(self) -> None:
        """Refuse shapes too large for dense matrices."""
        if self.total_dim > MAX_TOTAL_DIM:
            raise BadShape(f"total dimension {self.total_dim} exceeds {MAX_TOTAL_DIM}")

    def dim(self, k: int) -> int:
        """Dimension of party ``k`` (1-based)."""
        check_parties(self, [k])
        return self.dims[k - 1]

    def restrict(self, parties: Iterable[int]) -> "SystemShape":
        return SystemShape(self.dims[k - 1] for k in sorted(set(parties)))

    def __iter__(self):
        return iter(self.dims)

    def __len__(self):
        return len(self.dims)


def as_shape(shape) -> SystemShape:
    return shape if isinstance(shape, SystemShape) else SystemShape(shape)


def check_parties(shape: SystemShape, parties: Iterable[int], proper: bool = False) -> tuple[int, ...]:
    """Validate a 1-based party set; return it sorted and de-duplicated."""
    ps = tuple(sorted(set(int(k) for k in parties)))
    if not ps:
        raise BadPartySet("party set is empty")
    if ps[0] < 1 or ps[-1] > shape.n:
        raise BadPartySet(f"party indices {ps} out of range 1..{shape.n}")
    if proper and len(ps) == shape.n:
        raise BadPartySet(f"party set {ps} must be a proper subset")
    return ps


# ---------------------------------------------------------------------------
# norms and basic checks


def hs_norm(a: np.ndarray) -> float:
    """Hilbert-Schmidt (Frobenius) norm sqrt(tr(A^dag A))."""
    return float(np.linalg.norm(a, "fro"))


def op_norm(a: np.ndarray) -> float:
    """Operator (largest singular value) norm."""
    return float(np.linalg.norm(a, 2))


def is_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return hs_norm(a - a.conj().T) <= tol * max(1.0, hs_norm(a))


def hermitize(a: np.ndarray) -> np.ndarray:
    return (a + a.conj().T) / 2


# ---------------------------------------------------------------------------
# eigensolver


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def hermitian_eig(m: np.ndarray, tol: float = 1e-10, max_sweeps: int | None = None) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Pairs ``(p, q)`` are visited in row-cyclic order, so the result is fully
    deterministic. Iteration stops once the off-diagonal Frobenius mass drops
    below ``1e-14 * ||M||_F``; ``max_sweeps`` defaults to
    ``100 * d``.

    Raises
    ------
    NonHermitian
        If ``||M - M^dag|| > tol * max(1, ||M||)``.
    NoConvergence
        If the sweep cap is reached.
    """
    a = np.array(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got shape {a.shape}")
    if not is_hermitian(a, tol):
        raise NonHermitian("matrix is not Hermitian within tolerance")
    d = a.shape[0]
    a = hermitize(a)
    v = np.eye(d, dtype=complex)
    cap = 100 * d if max_sweeps is None else max_sweeps
    scale = hs_norm(a)
    target = 1e-14 * scale
    offmask = ~np.eye(d, dtype=bool)
    sweeps = 0
    while True:
        off = float(np.linalg.norm(a[offmask]))
        if off <= target:
            break
        if sweeps >= cap:
            raise NoConvergence(f"Jacobi did not converge in {cap} sweeps (off-diagonal {off:.3e})")
        sweeps += 1
        for p in range(d - 1):
            for q in range(p + 1, d):
                b = a[p, q]
                ab = abs(b)
                if ab <= 1e-18 * scale:
                    a[p, q] = a[q, p] = 0.0
                    continue
                app, aqq = a[p, p].real, a[q, q].real
                theta = (aqq - app) / (2.0 * ab)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                elif theta == 0.0:
                    t = 1.0
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                e = np.conj(b) / ab
                g = np.array([[c, s], [-s * e, c * e]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                v[:, idx] = v[:, idx] @ g
    w = np.diag(a).real.copy()
    order = np.argsort(w, kind="stable")
    return EigenDecomposition(w[order], v[:, order], sweeps)


def eigvalsh(m: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix (LAPACK path for hot loops)."""
    return np.linalg.eigvalsh(hermitize(np.asarray(m, dtype=complex)))


def min_eigenvalue(m: np.ndarray) -> float:
    return float(eigvalsh(m)[0])


# ---------------------------------------------------------------------------
# states


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(vec) > 1e-12)
    if nz.size == 0:
        return vec
    a = vec[nz[0]]
    if a.imag == 0.0 and a.real > 0.0:
        return vec
    out = vec * (abs(a) / a)
    out[nz[0]] = abs(a)
    return out


@dataclass(frozen=True)
class PureState:
    """Normalized state vector on a multipartite system.

    The first amplitude with modulus above 1e-12 is rotated to be real and
    nonnegative, so two states equal up to global phase compare equal.
    """

    shape: SystemShape
    amplitudes: np.ndarray = field(repr=False)

    def __init__(self, shape, amplitudes, normalize: bool = False):
        shape = as_shape(shape)
        shape.require_dense()
        vec = np.array(amplitudes, dtype=complex).reshape(-1)
        if vec.size != shape.total_dim:
            raise ShapeMismatch(f"{vec.size} amplitudes for total dimension {shape.total_dim}")
        if not np.all(np.isfinite(vec)):
            raise InvariantViolation("amplitudes must be finite")
        nrm = np.linalg.norm(vec)
        if normalize:
            if nrm == 0.0:
                raise InvariantViolation("cannot normalize the zero vector")
            vec = vec / nrm
        elif abs(nrm**2 - 1.0) > NORM_TOL:
            raise InvariantViolation(f"state is not normalized: <psi|psi> = {nrm**2!r}")
        vec = _fix_phase(vec)
        vec.setflags(write=False)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "amplitudes", vec)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.shape.dims)

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.shape, np.outer(self.amplitudes, self.amplitudes.conj()))

    def __eq__(self, other):
        return (
            isinstance(other, PureState)
            and self.shape == other.shape
            and np.array_equal(self.amplitudes, other.amplitudes)
        )

    def __hash__(self):
        return hash((self.shape, self.amplitudes.tobytes()))


@dataclass(frozen=True)
class DensityMatrix:
    """Unit-trace positive semidefinite operator on a multipartite system."""

    shape: SystemShape
    matrix: np.ndarray = field(repr=False)

    def __init__(self, shape, matrix, validate: bool = True):
        shape = as_shape(shape)
        shape.require_dense()
        m = np.array(matrix, dtype=complex)
        D = shape.total_dim
        if m.shape != (D, D):
            raise ShapeMismatch(f"matrix shape {m.shape} does not match total dimension {D}")
        if validate:
            if hs_norm(m - m.conj().T) > HERMITIAN_TOL:
                raise NonHermitian("density matrix is not Hermitian")
            tr = np.trace(m).real
            if abs(tr - 1.0) > NORM_TOL:
                raise InvariantViolation(f"density matrix trace {tr!r} != 1")
            lo = min_eigenvalue(m)
            if lo < PSD_FLOOR:
                raise InvariantViolation(f"density matrix has negative eigenvalue {lo:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_operator(cls, shape, op: np.ndarray) -> "DensityMatrix":
        """Hermitize and trace-normalize ``op`` before validating."""
        op = hermitize(np.asarray(op, dtype=complex))
        return cls(shape, op / np.trace(op).real)

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))

    def eigenvalues(self) -> np.ndarray:
        return eigvalsh(self.matrix)

    def __eq__(self, other):
        return (
            isinstance(other, DensityMatrix)
            and self.shape == other.shape
            and np.array_equal(self.matrix, other.matrix)
        )

    def __hash__(self):
        return hash((self.shape, self.matrix.tobytes()))


def as_density(state) -> DensityMatrix:
    return state.density() if isinstance(state, PureState) else state


# ---------------------------------------------------------------------------
# tensor structure


def kron(*mats: np.ndarray) -> np.ndarray:
    """Kronecker product, block layout ``(A ⊗ B)[i*p + k, j*q + l] = A[i, j] B[k, l]``."""
    if not mats:
        raise ValueError("kron needs at least one factor")
    return reduce(np.kron, (np.asarray(m, dtype=complex) for m in mats))


def partial_trace(rho, keep: Iterable[int]) -> DensityMatrix:
    """Trace out every party not in ``keep`` (1-based)."""
    rho = as_density(rho)
    shape = rho.shape
    keep = check_parties(shape, keep)
    red = reduced_matrix(rho.matrix, shape, keep)
    return DensityMatrix(shape.restrict(keep), hermitize(red), validate=False)


def reduced_matrix(m: np.ndarray, shape: SystemShape, keep: Sequence[int]) -> np.ndarray:
    n = shape.n
    t = np.asarray(m).reshape(shape.dims * 2)
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    row = list(letters[:n])
    col = list(letters[n : 2 * n])
    for k in range(1, n + 1):
        if k not in keep:
            col[k - 1] = row[k - 1]
    out = "".join(row[k - 1] for k in keep) + "".join(col[k - 1] for k in keep)
    red = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    dk = int(np.prod([shape.dims[k - 1] for k in keep]))
    return red.reshape(dk, dk)


def partial_transpose_matrix(m: np.ndarray, shape: SystemShape, subset: Iterable[int]) -> np.ndarray:
    """Partial transpose of any square operator; ``(|ij><kl|)^Γ1 = |kj><il|``."""
    n = shape.n
    t = np.asarray(m).reshape(shape.dims * 2)
    axes = list(range(2 * n))
    for k in subset:
        axes[k - 1], axes[n + k - 1] = axes[n + k - 1], axes[k - 1]
    D = shape.total_dim
    return t.transpose(axes).reshape(D, D)


def partial_transpose(rho, subset: Iterable[int]) -> np.ndarray:
    """Partial transpose over a proper, nonempty party subset (1-based)."""
    rho = as_density(rho)
    subset = check_parties(rho.shape, subset, proper=True)
    return partial_transpose_matrix(rho.matrix, rho.shape, subset)


def apply_slocc(rho, maps: Sequence[np.ndarray]) -> DensityMatrix:
    """Return ``(⊗A_k) ρ (⊗A_k)^dag`` renormalized to unit trace."""
    rho = as_density(rho)
    shape = rho.shape
    if len(maps) != shape.n:
        raise ShapeMismatch(f"{len(maps)} local maps for {shape.n} parties")
    mats = []
    for k, (a, d) in enumerate(zip(maps, shape.dims), start=1):
        a = np.asarray(a, dtype=complex)
        if a.shape != (d, d):
            raise ShapeMismatch(f"map for party {k} has shape {a.shape}, expected {(d, d)}")
        if np.linalg.svd(a, compute_uv=False)[-1] <= 1e-10:
            raise SingularMap(f"map for party {k} is singular")
        mats.append(a)
    big = kron(*mats)
    out = big @ rho.matrix @ big.conj().T
    return DensityMatrix.from_operator(shape, out)


# ---------------------------------------------------------------------------
# standard states


def ket(d: int, i: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[i] = 1.0
    return v


PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)


def product_vector(*vecs: np.ndarray) -> np.ndarray:
    return reduce(np.kron, (np.asarray(v, dtype=complex) for v in vecs))


def bell() -> PureState:
    """(|00> + |11>)/sqrt(2)."""
    return ghz(2)


def ghz(n: int) -> PureState:
    if n < 2:
        raise BadShape("GHZ needs n >= 2")
    shape = SystemShape([2] * n)
    v = np.zeros(shape.total_dim, dtype=complex)
    v[0] = v[-1] = 1 / np.sqrt(2)
    return PureState(shape, v, normalize=True)


def w(n: int) -> PureState:
    if n < 2:
        raise BadShape("W needs n >= 2")
    shape = SystemShape([2] * n)
    v = np.zeros(shape.total_dim, dtype=complex)
    for k in range(n):
        v[1 << k] = 1.0
    return PureState(shape, v, normalize=True)


def maximally_mixed(shape) -> DensityMatrix:
    shape = as_shape(shape)
    D = shape.total_dim
    return DensityMatrix(shape, np.eye(D) / D)


def basis_pure(shape, index: int) -> PureState:
    shape = as_shape(shape)
    return PureState(shape, ket(shape.total_dim, index))


def make_rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_vector(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unit vector: normalized i.i.d. standard complex Gaussians."""
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_pure(shape, seed=None) -> PureState:
    shape = as_shape(shape)
    rng = make_rng(seed)
    return PureState(shape, random_vector(shape.total_dim, rng), normalize=True)


def random_product(shape, seed=None) -> PureState:
    shape = as_shape(shape)
    rng = make_rng(seed)
    return PureState(shape, product_vector(*(random_vector(d, rng) for d in shape.dims)), normalize=True)


def random_density(shape, seed=None, rank: int | None = None) -> DensityMatrix:
    """Induced-measure mixed state ``G G^dag / tr`` with a ``D x rank`` Ginibre ``G``."""
    shape = as_shape(shape)
    rng = make_rng(seed)
    D = shape.total_dim
    r = D if rank is None else rank
    g = rng.standard_normal((D, r)) + 1j * rng.standard_normal((D, r))
    return DensityMatrix.from_operator(shape, g @ g.conj().T)


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + g.conj().T) / 2


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def upb_shifts_vectors() -> list[np.ndarray]:
    """The four product vectors |0,1,+>, |1,+,0>, |+,0,1>, |-,-,->."""
    k0, k1 = ket(2, 0), ket(2, 1)
    return [
        product_vector(k0, k1, PLUS),
        product_vector(k1, PLUS, k0),
        product_vector(PLUS, k0, k1),
        product_vector(MINUS, MINUS, MINUS),
    ]


def upb_shifts_state() -> DensityMatrix:
    """(I - sum_i |phi_i><phi_i|) / 4 on three qubits."""
    proj = sum(np.outer(v, v.conj()) for v in upb_shifts_vectors())
    return DensityMatrix(SystemShape((2, 2, 2)), (np.eye(8) - proj) / 4)

