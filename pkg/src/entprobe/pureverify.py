"""Adaptive local-measurement test of whether a pure multipartite state is product.

Each party k >= 2 is probed on its own: a diagonal scan finds the first level
``l`` with nonzero population, then one real and one imaginary coherence probe
per higher level recover the candidate amplitudes of a pure local factor. The
state is product iff every such candidate is normalized. Party 1 is never
measured; under the purity promise it is forced to be pure once the others are.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadShape, NoSupportFound, NotPureInput
from .measure import StateOracle, embed_local, expectation, probe_diag, probe_im, probe_re
from .qcore import PureState, SystemShape, check_parties, product_vector


@dataclass(frozen=True)
class VerifyConfig:
    epsilon_norm: float = 1e-9
    tau_zero: float = 1e-9

    def __post_init__(self):
        for name in ("epsilon_norm", "tau_zero"):
            v = getattr(self, name)
            if not 0.0 < v < 1e-2:
                raise ValueError(f"{name} must lie in (0, 1e-2), got {v!r}")


@dataclass(frozen=True)
class PartyReconstruction:
    k: int
    l: int
    alphas: np.ndarray = field(repr=False)  # amplitudes for levels l..d_k-1
    s: float = 0.0
    observables_used: int = 0

    def factor(self, d: int) -> np.ndarray:
        """Candidate local vector sum_j alpha_j |j>, zero below level l."""
        v = np.zeros(d, dtype=complex)
        v[self.l :] = self.alphas
        return v

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "l": self.l,
            "s": float(self.s),
            "alphas": [[float(a.real), float(a.imag)] for a in self.alphas],
        }


@dataclass(frozen=True)
class Verdict:
    b: int
    reconstructions: tuple[PartyReconstruction, ...]
    total_observables: int
    reconstructed_state: PureState | None = None

    @property
    def is_product(self) -> bool:
        return self.b == 0

    def to_json(self) -> dict:
        return {
            "b": self.b,
            "total_observables": self.total_observables,
            "parties": [r.to_json() for r in self.reconstructions],
        }


def reconstruct_party(oracle: StateOracle, k: int, cfg: VerifyConfig = VerifyConfig()) -> PartyReconstruction:
    """Recover the candidate pure factor of party ``k`` from local expectations."""
    shape = oracle.shape
    check_parties(shape, [k])
    if k < 2:
        raise ValueError("party 1 is never probed")
    d = shape.dims[k - 1]
    before = oracle.ledger.count

    l = None
    for m in range(d):
        p = expectation(oracle, embed_local(probe_diag(m, d), k, shape))
        if p > cfg.tau_zero:
            l = m
            break
    if l is None:
        raise NoSupportFound(f"party {k}: all {d} diagonal probes at or below tau_zero={cfg.tau_zero}")

    alphas = np.zeros(d - l, dtype=complex)
    alphas[0] = np.sqrt(p)
    for j in range(l + 1, d):
        x = expectation(oracle, embed_local(probe_re(l, j, d), k, shape))
        y = expectation(oracle, embed_local(probe_im(l, j, d), k, shape))
        alphas[j - l] = (x + 1j * y) / (2 * alphas[0].real)
    s = float(np.sum(np.abs(alphas) ** 2))
    return PartyReconstruction(k, l, alphas, s, oracle.ledger.count - before)


def verify_pure_product(oracle: StateOracle, cfg: VerifyConfig = VerifyConfig()) -> Verdict:
    """Decide product (b=0) vs entangled (b=1) for a pure hidden state.

    Stops at the first party whose reconstructed norm differs from 1 by more
    than ``cfg.epsilon_norm``. On b=0 the returned state is the normalized
    product of the recovered factors for parties 2..n (party 1 is not
    reconstructed).
    """
    if not oracle.is_pure:
        raise NotPureInput("oracle holds a mixed state; the product test assumes a pure input")
    shape = oracle.shape
    if shape.n < 2:
        raise BadShape("the product test needs at least two parties")
    recs: list[PartyReconstruction] = []
    b = 0
    for k in range(2, shape.n + 1):
        rec = reconstruct_party(oracle, k, cfg)
        recs.append(rec)
        if abs(rec.s - 1.0) > cfg.epsilon_norm:
            b = 1
            break
    total = sum(r.observables_used for r in recs)
    state = None
    if b == 0:
        vec = product_vector(*(r.factor(d) for r, d in zip(recs, shape.dims[1:])))
        state = PureState(SystemShape(shape.dims[1:]), vec, normalize=True)
    return Verdict(b, tuple(recs), total, state)
