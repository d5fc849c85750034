"""Indistinguishability witnesses for informationally-incomplete observable sets.

Any Hermitian direction orthogonal (in Hilbert-Schmidt sense) to every
measured observable and to the identity is invisible to the measurements.
Moving a full-rank state along such a direction, within its positivity
radius, gives states with identical statistics; if a state property flips
along the way, the pair proves the observable set cannot decide it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ICError, NotFound, NotStrictlyPositive, ShapeMismatch
from .measure import Observable, ic_budget
from .qcore import (
    DensityMatrix,
    SystemShape,
    as_shape,
    hermitize,
    hs_norm,
    maximally_mixed,
    op_norm,
    partial_transpose_matrix,
    random_vector,
)
from .separability import bipartitions, is_ppt_all

RANK_TOL = 1e-10
STAT_GAP_TOL = 1e-9


# ---------------------------------------------------------------------------
# Hermitian matrices as a real inner-product space


def herm_to_real(h: np.ndarray) -> np.ndarray:
    """Isometry from Hermitian D x D matrices to R^(D^2): tr(AB) = <vec A, vec B>."""
    h = np.asarray(h)
    iu = np.triu_indices(h.shape[0], 1)
    off = h[iu]
    return np.concatenate([h.diagonal().real, np.sqrt(2) * off.real, np.sqrt(2) * off.imag])


def real_to_herm(v: np.ndarray, d: int) -> np.ndarray:
    iu = np.triu_indices(d, 1)
    m = len(iu[0])
    h = np.zeros((d, d), dtype=complex)
    h[np.diag_indices(d)] = v[:d]
    off = (v[d : d + m] + 1j * v[d + m :]) / np.sqrt(2)
    h[iu] = off
    h[(iu[1], iu[0])] = off.conj()
    return h


def span_rank(observables: Sequence[Observable], with_identity: bool = True) -> int:
    cols = _columns(observables, with_identity)
    sv = np.linalg.svd(cols, compute_uv=False)
    return int(np.sum(sv > RANK_TOL * np.max(np.linalg.norm(cols, axis=0))))


def _columns(observables: Sequence[Observable], with_identity: bool) -> np.ndarray:
    D = observables[0].shape.total_dim
    mats = ([np.eye(D)] if with_identity else []) + [o.matrix for o in observables]
    return np.column_stack([herm_to_real(m) for m in mats])


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FreeDirection:
    H: np.ndarray = field(repr=False)
    shape: SystemShape = None
    hs_norm: float = 1.0


def _check_observables(observables: Sequence[Observable], shape: SystemShape) -> None:
    if not observables:
        raise ValueError("need at least one observable")
    for o in observables:
        if o.shape != shape:
            raise ShapeMismatch(f"observable {o.label!r} has shape {o.shape.dims}, expected {shape.dims}")


def free_directions(observables: Sequence[Observable], shape) -> list[FreeDirection]:
    """HS-orthonormal basis of Hermitians orthogonal to the identity and every observable."""
    shape = as_shape(shape)
    _check_observables(observables, shape)
    D = shape.total_dim
    cols = _columns(observables, with_identity=True)
    u, sv, _ = np.linalg.svd(cols, full_matrices=True)
    rank = int(np.sum(sv > RANK_TOL * np.max(np.linalg.norm(cols, axis=0))))
    out = []
    for v in u[:, rank:].T:
        h = real_to_herm(v, D)
        out.append(FreeDirection(h, shape, hs_norm(h)))
    return out


def positivity_radius(rho: DensityMatrix, H: FreeDirection | np.ndarray) -> float:
    """Largest r with ρ + r'H >= 0 for every |r'| <= r.

    Uses the extreme eigenvalues of ρ^{-1/2} H ρ^{-1/2}. The result is never
    below ``a / (2 ||H||_op)`` with ``a`` the smallest eigenvalue of ρ.
    """
    h = H.H if isinstance(H, FreeDirection) else np.asarray(H, dtype=complex)
    w, v = np.linalg.eigh(rho.matrix)
    a = w[0]
    if a <= 1e-8:
        raise NotStrictlyPositive(f"smallest eigenvalue {a:.3e} <= 1e-8")
    isqrt = (v / np.sqrt(w)) @ v.conj().T
    mu = np.linalg.eigvalsh(hermitize(isqrt @ h @ isqrt))
    lo, hi = mu[0], mu[-1]
    bounds = [1.0 / -lo if lo < 0 else np.inf, 1.0 / hi if hi > 0 else np.inf]
    return float(min(bounds))


# ---------------------------------------------------------------------------
# properties


@dataclass(frozen=True)
class PropertyOracle:
    name: str
    test: Callable[[DensityMatrix], bool] = field(repr=False)
    shapes: Callable[[SystemShape], bool] = field(default=lambda s: True, repr=False)

    def __call__(self, rho: DensityMatrix) -> bool:
        return bool(self.test(rho))


def _ppt(rho: DensityMatrix) -> bool:
    return is_ppt_all(rho, tol=1e-12)[0]


PPT = PropertyOracle("ppt", _ppt, lambda s: s.n >= 2)
SEPARABLE_2XN = PropertyOracle(
    "separable2xN",
    _ppt,
    lambda s: s.n == 2 and sorted(s.dims) in ([2, 2], [2, 3]),
)
PROPERTIES = {p.name: p for p in (PPT, SEPARABLE_2XN)}


def get_property(name: str | PropertyOracle) -> PropertyOracle:
    if isinstance(name, PropertyOracle):
        return name
    try:
        return PROPERTIES[name]
    except KeyError:
        raise ValueError(f"unknown property {name!r}; choose from {sorted(PROPERTIES)}") from None


# ---------------------------------------------------------------------------
# search


@dataclass(frozen=True)
class SearchConfig:
    num_base: int = 4
    num_random: int = 16
    seed: int = 0
    grid_points: int = 24

    def to_json(self) -> dict:
        return {"num_base": self.num_base, "num_random": self.num_random, "seed": self.seed}


@dataclass(frozen=True)
class WitnessPair:
    rho: DensityMatrix
    sigma: DensityMatrix
    max_stat_gap: float
    property_name: str
    observable_count: int
    base_index: int = 0
    direction_index: int = 0
    step: float = 0.0

    def report(self) -> dict:
        return {
            "max_stat_gap": float(self.max_stat_gap),
            "property": self.property_name,
            "observable_count": self.observable_count,
        }


def max_stat_gap(observables: Sequence[Observable], rho: DensityMatrix, sigma: DensityMatrix) -> float:
    diff = rho.matrix - sigma.matrix
    gaps = [abs(np.trace(diff).real)]
    gaps += [abs(np.sum(o.matrix * diff.T)) for o in observables]
    return float(max(gaps))


def base_states(shape: SystemShape, cfg: SearchConfig) -> list[DensityMatrix]:
    """Maximally mixed state plus ``num_base`` random full-rank states near the PPT boundary.

    Each random base is ``p I/D + (1-p)|ψ><ψ|`` for a Haar-random ``ψ``. The
    worst partial-transpose eigenvalue is affine in ``p``, vanishing at
    ``p*``; bases alternate between just above and just below ``p*`` (relative
    offset uniform on [0.01, 0.2]) so small invisible steps can cross the
    boundary.
    """
    D = shape.total_dim
    out = [maximally_mixed(shape)]
    for i in range(cfg.num_base):
        rng = np.random.default_rng([cfg.seed, 1, i])
        psi = random_vector(D, rng)
        pure = np.outer(psi, psi.conj())
        lam = min(float(np.linalg.eigvalsh(partial_transpose_matrix(pure, shape, b.left))[0]) for b in bipartitions(shape))
        u = rng.uniform(0.01, 0.2)
        if lam < 0:
            p_star = -lam / (1.0 / D - lam)
            sign = 1.0 if i % 2 == 0 else -1.0
            p = p_star + sign * u * min(p_star, 1.0 - p_star)
        else:
            p = u
        out.append(DensityMatrix.from_operator(shape, p * np.eye(D) / D + (1 - p) * pure))
    return out


def search_directions(free: list[FreeDirection], cfg: SearchConfig) -> list[np.ndarray]:
    dirs = [f.H for f in free]
    rng = np.random.default_rng([cfg.seed, 2])
    for _ in range(cfg.num_random):
        c = rng.standard_normal(len(free))
        c /= np.linalg.norm(c)
        h = sum(ci * f.H for ci, f in zip(c, free))
        dirs.append(h / hs_norm(h))
    return dirs


def indistinguishable_pair(
    observables: Sequence[Observable],
    shape,
    prop: str | PropertyOracle = "ppt",
    cfg: SearchConfig = SearchConfig(),
) -> WitnessPair:
    """Search for states with identical statistics on ``observables`` but opposite ``prop``.

    Raises
    ------
    ICError
        If ``len(observables) >= ic_budget(shape)``.
    NotFound
        If no flip was found in the searched slice; ``exc.report`` holds the
        per-base diagnostics.
    """
    shape = as_shape(shape)
    prop = get_property(prop)
    _check_observables(observables, shape)
    t = ic_budget(shape)
    s = len(observables)
    if s >= t:
        raise ICError(f"{s} observables >= t = {t}: the set may be informationally complete")
    if not prop.shapes(shape):
        raise ValueError(f"property {prop.name!r} has no decidable ground truth at shape {shape.dims}")
    free = free_directions(observables, shape)
    if not free:
        raise ICError(f"observables span all Hermitians on shape {shape.dims} (t = {t})")
    dirs = search_directions(free, cfg)
    steps = [2.0**-i for i in range(cfg.grid_points)]
    report = {"directions": len(dirs), "bases": [], "grid_points": cfg.grid_points}
    for bi, rho0 in enumerate(base_states(shape, cfg)):
        p0 = prop(rho0)
        radii = []
        for di, h in enumerate(dirs):
            r_star = positivity_radius(rho0, h)
            radii.append(r_star)
            for f in steps:
                for sign in (1.0, -1.0):
                    r = sign * f * r_star
                    cand = DensityMatrix(shape, hermitize(rho0.matrix + r * h))
                    if prop(cand) != p0:
                        rho, sigma = (rho0, cand) if p0 else (cand, rho0)
                        gap = max_stat_gap(observables, rho, sigma)
                        if gap <= STAT_GAP_TOL:
                            return WitnessPair(rho, sigma, gap, prop.name, s, bi, di, r)
        report["bases"].append({"index": bi, "property": p0, "radii": radii})
    raise NotFound(f"no {prop.name} flip found over {len(report['bases'])} bases x {len(dirs)} directions", report)


def conservative_radius(rho: DensityMatrix, H: FreeDirection | np.ndarray) -> float:
    """Lower bound a / (2 ||H||_op) on the positivity radius."""
    h = H.H if isinstance(H, FreeDirection) else np.asarray(H)
    return float(np.linalg.eigvalsh(rho.matrix)[0] / (2 * op_norm(h)))
