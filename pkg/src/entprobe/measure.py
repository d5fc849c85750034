"""Exact-expectation measurement model, local probes and observable budgets."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BadShape, IndexOutOfRange, NonHermitian, ShapeMismatch
from .qcore import (
    HERMITIAN_TOL,
    DensityMatrix,
    PureState,
    SystemShape,
    as_shape,
    check_parties,
    hs_norm,
    kron,
)

IMAG_TOL = 1e-10


@dataclass(frozen=True)
class Observable:
    """Hermitian operator tagged with a label used for ledger accounting."""

    shape: SystemShape
    matrix: np.ndarray = field(repr=False)
    label: str = ""

    def __init__(self, shape, matrix, label: str = ""):
        shape = as_shape(shape)
        shape.require_dense()
        m = np.array(matrix, dtype=complex)
        D = shape.total_dim
        if m.shape != (D, D):
            raise ShapeMismatch(f"observable of shape {m.shape} on total dimension {D}")
        if hs_norm(m - m.conj().T) > HERMITIAN_TOL * max(1.0, hs_norm(m)):
            raise NonHermitian(f"observable {label!r} is not Hermitian")
        m.setflags(write=False)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "label", label)

    def __add__(self, other: "Observable") -> "Observable":
        if self.shape != other.shape:
            raise ShapeMismatch("cannot add observables on different shapes")
        return Observable(self.shape, self.matrix + other.matrix, f"({self.label}+{other.label})")

    def scaled(self, a: float) -> "Observable":
        return Observable(self.shape, a * self.matrix, f"{a!r}*{self.label}")


class MeasurementLedger:
    """Append-only record of ``(label, value)`` measurements.

    ``count`` is the number of distinct labels, which is what observable
    budgets refer to; re-measuring a label is free.
    """

    def __init__(self):
        self._entries: list[tuple[str, float]] = []
        self._labels: set[str] = set()

    def append(self, label: str, value: float) -> None:
        self._entries.append((label, float(value)))
        self._labels.add(label)

    @property
    def entries(self) -> tuple[tuple[str, float], ...]:
        return tuple(self._entries)

    @property
    def count(self) -> int:
        return len(self._labels)

    @property
    def labels(self) -> frozenset[str]:
        return frozenset(self._labels)

    def to_json(self) -> list[dict]:
        return [{"label": label, "value": value} for label, value in self._entries]

    def __len__(self):
        return len(self._entries)


class StateOracle:
    """Black-box access to a hidden state through expectation values only."""

    __slots__ = ("_state", "_shape", "_ledger", "_is_pure")

    def __init__(self, state: PureState | DensityMatrix, purity_tol: float = 1e-9):
        if isinstance(state, PureState):
            self._state = state.amplitudes
            self._is_pure = True
        elif isinstance(state, DensityMatrix):
            self._state = state.matrix
            self._is_pure = state.purity() >= 1.0 - purity_tol
        else:
            raise TypeError(f"expected PureState or DensityMatrix, got {type(state).__name__}")
        self._shape = state.shape
        self._ledger = MeasurementLedger()

    @property
    def shape(self) -> SystemShape:
        return self._shape

    @property
    def ledger(self) -> MeasurementLedger:
        return self._ledger

    @property
    def is_pure(self) -> bool:
        """Boundary flag set at construction; not derived from measurements."""
        return self._is_pure

    def _trace(self, op: np.ndarray) -> complex:
        s = self._state
        if s.ndim == 1:
            return np.vdot(s, op @ s)
        # tr(O rho) = sum_ij O_ij rho_ji
        return np.sum(op * s.T)

    def expectation(self, obs: Observable) -> float:
        return expectation(self, obs)


def expectation(oracle: StateOracle, obs: Observable) -> float:
    """Return tr(O rho) and record it in the oracle's ledger."""
    if obs.shape != oracle.shape:
        raise ShapeMismatch(f"observable shape {obs.shape.dims} != oracle shape {oracle.shape.dims}")
    val = oracle._trace(obs.matrix)
    if abs(val.imag) > IMAG_TOL:
        raise NonHermitian(f"expectation of {obs.label!r} has imaginary part {val.imag:.3e}")
    oracle._ledger.append(obs.label, val.real)
    return float(val.real)


def embed_local(obs: Observable | np.ndarray, k: int, shape, label: str | None = None) -> Observable:
    """Embed a single-party observable at party ``k``: I ⊗ ... ⊗ O_k ⊗ ... ⊗ I."""
    shape = as_shape(shape)
    check_parties(shape, [k])
    if isinstance(obs, Observable):
        local, base = obs.matrix, obs.label
    else:
        local, base = np.asarray(obs, dtype=complex), "O"
    dk = shape.dims[k - 1]
    if local.shape != (dk, dk):
        raise ShapeMismatch(f"local observable {local.shape} does not fit party {k} of dimension {dk}")
    factors = [np.eye(d) for d in shape.dims]
    factors[k - 1] = local
    return Observable(shape, kron(*factors), label if label is not None else f"{base}@{k}")


def _check_level(d: int, *levels: int) -> None:
    for m in levels:
        if not 0 <= m <= d - 1:
            raise IndexOutOfRange(f"level {m} outside 0..{d - 1}")


def probe_diag(m: int, d: int) -> Observable:
    """E_m = |m><m|."""
    _check_level(d, m)
    mat = np.zeros((d, d), dtype=complex)
    mat[m, m] = 1.0
    return Observable((d,), mat, f"E_{m}")


def probe_re(l: int, j: int, d: int) -> Observable:
    """|j><l| + |l><j|."""
    _check_level(d, l, j)
    if l == j:
        raise IndexOutOfRange("probe levels must differ")
    mat = np.zeros((d, d), dtype=complex)
    mat[j, l] = mat[l, j] = 1.0
    return Observable((d,), mat, f"ReProbe_{l}_{j}")


def probe_im(l: int, j: int, d: int) -> Observable:
    """i(|j><l| - |l><j|)."""
    _check_level(d, l, j)
    if l == j:
        raise IndexOutOfRange("probe levels must differ")
    mat = np.zeros((d, d), dtype=complex)
    mat[j, l] = 1j
    mat[l, j] = -1j
    return Observable((d,), mat, f"ImProbe_{l}_{j}")


def ic_budget(shape) -> int:
    """Number of observables beyond normalization needed for full tomography."""
    shape = as_shape(shape)
    return int(np.prod([d * d for d in shape.dims], dtype=object)) - 1


def pure_budgets(shape) -> tuple[int, int, int]:
    """(adaptive upper bound, adaptive lower bound, non-adaptive lower bound).

    All three are sums over parties 2..n of ``2d-1``, ``2(d-1)`` and ``4d-5``.
    """
    shape = as_shape(shape)
    if shape.n < 2:
        raise BadShape("observable budgets need at least two parties")
    rest = shape.dims[1:]
    return (
        sum(2 * d - 1 for d in rest),
        sum(2 * (d - 1) for d in rest),
        sum(4 * d - 5 for d in rest),
    )
