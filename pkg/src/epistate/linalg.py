"""Dense complex linear algebra for small (<= 16 dimensional) systems.

State vectors carry their basis labels so that tensor products and
measurement records stay readable. Matrices are plain ``numpy`` arrays;
the ``unitary``/``hermitian``/``projector`` constructors validate the
property they claim.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol, Sequence

import numpy as np

NORM_TOL = 1e-10
ZERO_BRANCH_TOL = 1e-12
MAX_DIM = 16


class ContractViolation(ValueError):
    """An operation was called with inputs outside its contract."""


class UniformSource(Protocol):
    def random(self) -> float: ...


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size == 0 or amps.size > MAX_DIM:
            raise ContractViolation(f"dimension {amps.size} outside 1..{MAX_DIM}")
        if not np.all(np.isfinite(amps)):
            raise ContractViolation("amplitudes must be finite")
        labels = tuple(self.labels) or tuple(str(i) for i in range(amps.size))
        if len(labels) != amps.size:
            raise ContractViolation("one label per amplitude required")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "labels", labels)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalize(self) -> "StateVector":
        n = self.norm()
        if n < ZERO_BRANCH_TOL:
            raise ContractViolation("cannot normalize a zero vector")
        return StateVector(self.amplitudes / n, self.labels)

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm() - 1.0) < tol

    def __getitem__(self, label: str) -> complex:
        return complex(self.amplitudes[self.labels.index(label)])


def basis_state(dim: int, index: int, labels: Sequence[str] = ()) -> StateVector:
    amps = np.zeros(dim, dtype=complex)
    amps[index] = 1.0
    return StateVector(amps, tuple(labels))


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Kronecker product; labels are concatenated in the same order."""
    if a.dim * b.dim > MAX_DIM:
        raise ContractViolation(f"tensor dimension {a.dim * b.dim} exceeds {MAX_DIM}")
    labels = tuple(la + lb for la in a.labels for lb in b.labels)
    return StateVector(np.kron(a.amplitudes, b.amplitudes), labels)


def apply(m: np.ndarray, v: StateVector) -> StateVector:
    """Matrix-vector product. The result is not renormalized."""
    m = np.asarray(m)
    if m.shape != (v.dim, v.dim):
        raise ContractViolation(f"matrix shape {m.shape} does not act on dim {v.dim}")
    return StateVector(m @ v.amplitudes, v.labels)


def inner(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in ``a``."""
    if a.dim != b.dim:
        raise ContractViolation(f"dimension mismatch {a.dim} vs {b.dim}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.asarray(m)).T


def _near(a: np.ndarray, b, tol: float) -> bool:
    return bool(np.abs(a - b).max(initial=0.0) <= tol)


def is_hermitian(m: np.ndarray, tol: float = NORM_TOL) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and _near(m, dagger(m), tol)


def is_unitary(m: np.ndarray, tol: float = NORM_TOL) -> bool:
    m = np.asarray(m)
    return (
        m.ndim == 2
        and m.shape[0] == m.shape[1]
        and _near(dagger(m) @ m, np.eye(m.shape[0]), tol)
    )


def is_projector(m: np.ndarray, tol: float = NORM_TOL) -> bool:
    m = np.asarray(m)
    return is_hermitian(m, tol) and _near(m @ m, m, tol)


def hermitian(m) -> np.ndarray:
    m = np.array(m, dtype=complex)
    if not is_hermitian(m):
        raise ContractViolation("matrix is not Hermitian")
    return m


def unitary(m) -> np.ndarray:
    m = np.array(m, dtype=complex)
    if not is_unitary(m):
        raise ContractViolation("matrix is not unitary")
    return m


def projector(m) -> np.ndarray:
    m = np.array(m, dtype=complex)
    if not is_projector(m):
        raise ContractViolation("matrix is not an orthogonal projector")
    return m


def ket_projector(v: StateVector) -> np.ndarray:
    a = v.amplitudes
    return np.outer(a, np.conj(a))


def check_resolution(projectors: Sequence[np.ndarray], tol: float = NORM_TOL) -> None:
    """Raise unless the projectors are orthogonal and sum to the identity."""
    if not projectors:
        raise ContractViolation("empty projector set")
    dim = np.asarray(projectors[0]).shape[0]
    total = np.zeros((dim, dim), dtype=complex)
    for j, p in enumerate(projectors):
        p = np.asarray(p)
        if not is_projector(p, tol):
            raise ContractViolation(f"element {j} is not a projector")
        for q in projectors[j + 1:]:
            if not _near(p @ np.asarray(q), 0, tol):
                raise ContractViolation("projectors are not pairwise orthogonal")
        total = total + p
    if not _near(total, np.eye(dim), tol):
        raise ContractViolation("projectors do not sum to the identity")


def born_weights(v: StateVector, projectors: Sequence[np.ndarray]) -> np.ndarray:
    """<v|P_k|v> per projector, with branches below ZERO_BRANCH_TOL set to 0."""
    w = np.array([np.vdot(v.amplitudes, np.asarray(p) @ v.amplitudes).real for p in projectors])
    w[w < ZERO_BRANCH_TOL] = 0.0
    return w


def cumulative(weights: Sequence[float]) -> tuple[np.ndarray, int]:
    """Normalized running sum of ``weights`` and the last nonzero index.

    Shot kernels select with ``u < cum[k]`` against this exact table, so
    vectorized and per-shot sampling agree bit for bit.
    """
    w = np.asarray(weights, dtype=float)
    total = float(w.sum())
    if not total > 0.0:
        raise ContractViolation("weights must have positive mass")
    cum = np.empty(w.size)
    acc = 0.0
    last = 0
    for k, wk in enumerate(w):
        if wk > 0.0:
            acc += wk / total
            last = k
        cum[k] = acc
    return cum, last


def pick_index(weights: Sequence[float], u: float) -> int:
    """Inverse-CDF selection of a category from one uniform draw in [0, 1)."""
    cum, last = cumulative(weights)
    for k in range(cum.size):
        if u < cum[k]:
            return k
    return last


def born_sample(
    v: StateVector, projectors: Sequence[np.ndarray], rng: UniformSource
) -> tuple[int, StateVector]:
    """Projective measurement: returns (outcome index, renormalized post-state).

    Consumes exactly one ``rng.random()`` draw.
    """
    check_resolution(projectors)
    if projectors and np.asarray(projectors[0]).shape[0] != v.dim:
        raise ContractViolation("projectors do not act on the state space")
    weights = born_weights(v, projectors)
    k = pick_index(weights, rng.random())
    post = apply(projectors[k], v)
    if post.norm() < ZERO_BRANCH_TOL:
        raise ContractViolation("selected a zero-probability branch")
    return k, post.normalize()
