"""Separability tests and ground-truth oracles.

PPT and partial-transpose invariance for mixed states, Schmidt rank and
reduced-purity product tests for pure states, seesaw maximization of product
overlap with a projector, and the finest product factorization of pure states.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

import numpy as np

from .errors import BadPartySet, NotProjector, TooManyParties
from .qcore import (
    DensityMatrix,
    PureState,
    SystemShape,
    as_density,
    as_shape,
    check_parties,
    eigvalsh,
    hs_norm,
    make_rng,
    partial_transpose_matrix,
    product_vector,
    random_vector,
    reduced_matrix,
)


@dataclass(frozen=True)
class Bipartition:
    left: tuple[int, ...]
    right: tuple[int, ...]

    @classmethod
    def of(cls, shape, left: Iterable[int]) -> "Bipartition":
        shape = as_shape(shape)
        left = check_parties(shape, left, proper=True)
        right = tuple(k for k in range(1, shape.n + 1) if k not in left)
        return cls(left, right)

    def to_json(self) -> list[list[int]]:
        return [list(self.left), list(self.right)]


def bipartitions(shape) -> list[Bipartition]:
    """All bipartitions with party 1 on the left, smallest left blocks first."""
    shape = as_shape(shape)
    n = shape.n
    out = []
    for size in range(1, n):
        for rest in combinations(range(2, n + 1), size - 1):
            out.append(Bipartition.of(shape, (1,) + rest))
    return out


# ---------------------------------------------------------------------------
# mixed-state tests


def min_pt_eigenvalue(rho, subset: Iterable[int]) -> float:
    rho = as_density(rho)
    return float(eigvalsh(partial_transpose_matrix(rho.matrix, rho.shape, tuple(subset)))[0])


def is_ppt(rho, bip: Bipartition | Iterable[int] | None = None, tol: float = 1e-10) -> tuple[bool, float]:
    """PPT test across a bipartition; returns ``(ppt, min eigenvalue of ρ^Γ)``.

    ``bip=None`` means party 1 against the rest. The transpose is taken on
    the left block; the right block has the same spectrum.
    """
    rho = as_density(rho)
    if bip is None:
        bip = Bipartition.of(rho.shape, [1])
    elif not isinstance(bip, Bipartition):
        bip = Bipartition.of(rho.shape, bip)
    lo = min_pt_eigenvalue(rho, bip.left)
    return lo >= -tol, lo


def is_ppt_all(rho, tol: float = 1e-10) -> tuple[bool, float]:
    """PPT across every bipartition; returns the worst min eigenvalue."""
    rho = as_density(rho)
    worst = min(min_pt_eigenvalue(rho, b.left) for b in bipartitions(rho.shape))
    return worst >= -tol, worst


def pt_invariant(rho, party: int, tol: float = 1e-12) -> bool:
    """True iff ``||ρ^Γ_party - ρ||_HS <= tol``."""
    rho = as_density(rho)
    check_parties(rho.shape, [party])
    return hs_norm(partial_transpose_matrix(rho.matrix, rho.shape, (party,)) - rho.matrix) <= tol


def random_separable(shape, seed=None, components: int | None = None) -> DensityMatrix:
    """Dirichlet-weighted mixture of ``2 D^2`` random product pure states."""
    shape = as_shape(shape)
    rng = make_rng(seed)
    D = shape.total_dim
    m = 2 * D * D if components is None else components
    weights = rng.dirichlet(np.ones(m))
    rho = np.zeros((D, D), dtype=complex)
    for wt in weights:
        v = product_vector(*(random_vector(d, rng) for d in shape.dims))
        rho += wt * np.outer(v, v.conj())
    return DensityMatrix.from_operator(shape, rho)


# ---------------------------------------------------------------------------
# pure-state tests


def _amplitude_matrix(psi: PureState, left: tuple[int, ...]) -> np.ndarray:
    shape = psi.shape
    right = [k for k in range(1, shape.n + 1) if k not in left]
    t = psi.tensor().transpose([k - 1 for k in list(left) + right])
    dl = int(np.prod([shape.dims[k - 1] for k in left]))
    return t.reshape(dl, -1)


def schmidt_coefficients(psi: PureState, bip: Bipartition | Iterable[int]) -> np.ndarray:
    left = bip.left if isinstance(bip, Bipartition) else Bipartition.of(psi.shape, bip).left
    return np.linalg.svd(_amplitude_matrix(psi, left), compute_uv=False)


def schmidt_rank(psi: PureState, bip: Bipartition | Iterable[int], tol: float = 1e-8) -> int:
    """Number of singular values above ``tol`` times the largest one."""
    sv = schmidt_coefficients(psi, bip)
    return int(np.sum(sv > tol * sv[0]))


def reduced_purities(psi: PureState) -> list[float]:
    rho = np.outer(psi.amplitudes, psi.amplitudes.conj())
    out = []
    for k in range(1, psi.shape.n + 1):
        r = reduced_matrix(rho, psi.shape, (k,))
        out.append(float(np.real(np.vdot(r, r))))
    return out


def pure_is_product(psi: PureState, tol: float = 1e-9) -> bool:
    """Fully product iff every single-party reduced state has purity >= 1 - tol."""
    return all(p >= 1.0 - tol for p in reduced_purities(psi))


# ---------------------------------------------------------------------------
# seesaw


@dataclass(frozen=True)
class SeesawConfig:
    restarts: int = 64
    max_iters: int = 500
    tol_gain: float = 1e-12
    seed: int = 0


@dataclass(frozen=True)
class SeesawResult:
    best_overlap: float
    best_product: tuple[np.ndarray, ...] = field(repr=False)
    restarts: int = 0
    iterations_per_restart: tuple[int, ...] = ()
    converged: tuple[bool, ...] = ()
    best_restart: int = 0
    history: tuple[tuple[float, ...], ...] = field(default=(), repr=False)

    def to_json(self) -> dict:
        return {
            "best_overlap": float(self.best_overlap),
            "best_product": [[[float(z.real), float(z.imag)] for z in v] for v in self.best_product],
            "restarts": self.restarts,
            "iterations_per_restart": list(self.iterations_per_restart),
            "converged": list(self.converged),
            "best_restart": self.best_restart,
        }


def product_overlap(p: np.ndarray, vecs) -> float:
    v = product_vector(*vecs)
    return float(np.real(np.vdot(v, p @ v)))


def _environment(pt: np.ndarray, vecs: list[np.ndarray], k: int) -> np.ndarray:
    """<a_others| P |a_others> as a d_k x d_k matrix; ``pt`` has 2n axes."""
    n = len(vecs)
    t = pt
    # contract bra-side axes (n..2n-1) with a, ket-side axes (0..n-1) with conj(a)
    for j in reversed(range(n)):
        if j == k:
            continue
        t = np.tensordot(t, vecs[j], axes=([n + j], [0]))
    for j in reversed(range(n)):
        if j == k:
            continue
        t = np.tensordot(vecs[j].conj(), t, axes=([0], [j]))
    return t


def max_product_overlap(p: np.ndarray, shape, cfg: SeesawConfig = SeesawConfig()) -> SeesawResult:
    """Maximize <a_1...a_n|P|a_1...a_n> over product unit vectors by alternating eigen-steps.

    Restart ``r`` draws its start from ``default_rng([cfg.seed, r])``, so the
    result does not depend on execution order. Ties go to the lowest restart.
    """
    shape = as_shape(shape)
    p = np.asarray(p, dtype=complex)
    D = shape.total_dim
    if p.shape != (D, D) or hs_norm(p - p.conj().T) > 1e-10 or hs_norm(p @ p - p) > 1e-10:
        raise NotProjector("operator is not a Hermitian idempotent")
    pt = p.reshape(shape.dims * 2)
    n = shape.n
    best = (-1.0, None, 0)
    iters, conv, hist = [], [], []
    for r in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed, r])
        vecs = [random_vector(d, rng) for d in shape.dims]
        val = product_overlap(p, vecs)
        trace = [val]
        done = False
        it = 0
        while it < cfg.max_iters:
            it += 1
            for k in range(n):
                m = _environment(pt, vecs, k)
                w, v = np.linalg.eigh((m + m.conj().T) / 2)
                vecs[k] = v[:, -1]
            new = product_overlap(p, vecs)
            trace.append(new)
            gain = new - val
            val = new
            if gain < cfg.tol_gain:
                done = True
                break
        iters.append(it)
        conv.append(done)
        hist.append(tuple(trace))
        if val > best[0]:
            best = (val, tuple(v.copy() for v in vecs), r)
    return SeesawResult(
        best_overlap=best[0],
        best_product=best[1],
        restarts=cfg.restarts,
        iterations_per_restart=tuple(iters),
        converged=tuple(conv),
        best_restart=best[2],
        history=tuple(hist),
    )


def range_projector(rho, tol: float = 1e-10) -> np.ndarray:
    """Orthogonal projector onto the support of a density matrix."""
    m = as_density(rho).matrix
    w, v = np.linalg.eigh(m)
    keep = v[:, w > tol]
    return keep @ keep.conj().T


# ---------------------------------------------------------------------------
# entanglement depth


@dataclass(frozen=True)
class DepthReport:
    partition: tuple[tuple[int, ...], ...]
    depth: int

    def to_json(self) -> dict:
        return {"partition": [list(b) for b in self.partition], "depth": self.depth}


def _split(vec: np.ndarray, parties: tuple[int, ...], dims: dict[int, int], tol: float):
    """Return the finest factorization blocks of a state vector on ``parties``."""
    if len(parties) == 1:
        return [parties]
    t = vec.reshape([dims[k] for k in parties])
    first, rest = parties[0], parties[1:]
    for size in range(0, len(rest)):
        for extra in combinations(rest, size):
            left = (first,) + extra
            right = tuple(k for k in parties if k not in left)
            li = [parties.index(k) for k in left]
            ri = [parties.index(k) for k in right]
            dl = int(np.prod([dims[k] for k in left]))
            mat = t.transpose(li + ri).reshape(dl, -1)
            u, sv, vh = np.linalg.svd(mat, full_matrices=False)
            if np.sum(sv > tol * sv[0]) == 1:
                a = u[:, 0] * sv[0]
                b = vh[0, :]
                return _split(a, left, dims, tol) + _split(b, right, dims, tol)
    return [parties]


def pure_entanglement_depth(psi: PureState, tol: float = 1e-8) -> DepthReport:
    """Finest product factorization of a pure state and its largest block size."""
    n = psi.shape.n
    if n > 10:
        raise TooManyParties(f"depth search supports at most 10 parties, got {n}")
    dims = {k: d for k, d in enumerate(psi.shape.dims, start=1)}
    blocks = _split(psi.amplitudes, tuple(range(1, n + 1)), dims, tol)
    blocks = tuple(sorted(tuple(sorted(b)) for b in blocks))
    return DepthReport(blocks, max(len(b) for b in blocks))


def check_partition(blocks, n: int) -> None:
    flat = sorted(k for b in blocks for k in b)
    if flat != list(range(1, n + 1)):
        raise BadPartySet(f"blocks {blocks} do not partition 1..{n}")
