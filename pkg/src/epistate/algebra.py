"""Finite matrix *-algebras, commutative contexts, characters and GNS.

Algebra elements are square complex matrices. A ``FiniteAlgebra`` keeps an
orthonormal basis (Hilbert-Schmidt inner product ``tr(A^dagger B)``) of the
unital *-algebra generated by its generators; everything else is expressed
in coordinates on that basis.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .linalg import ContractViolation, StateVector, dagger, is_hermitian, is_projector

SPAN_TOL = 1e-10
MERGE_TOL = 1e-8
NULL_TOL = 1e-10
POSITIVITY_TOL = 1e-8


class InvalidState(ContractViolation):
    """The functional is not positive (or not normalized)."""


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    return complex(np.vdot(a, b))


def _orthonormal_add(basis: list[np.ndarray], m: np.ndarray, tol: float = SPAN_TOL) -> bool:
    """Gram-Schmidt ``m`` against ``basis``; append the residual if it survives."""
    r = np.array(m, dtype=complex)
    for _ in range(2):  # re-orthogonalize once for stability
        for b in basis:
            r = r - hs_inner(b, r) * b
    n = np.linalg.norm(r)
    if n < tol * max(1.0, np.linalg.norm(m)):
        return False
    basis.append(r / n)
    return True


class FiniteAlgebra:
    """The unital *-algebra generated by a list of matrices."""

    def __init__(self, generators: Sequence[np.ndarray], dim: int | None = None):
        gens = [np.array(g, dtype=complex) for g in generators]
        if dim is None:
            if not gens:
                raise ContractViolation("need generators or an explicit dim")
            dim = gens[0].shape[0]
        if any(g.shape != (dim, dim) for g in gens):
            raise ContractViolation("generators must be square and of equal size")
        self.dim = dim
        self.generators = gens
        self.basis = self._close(gens)

    def _close(self, gens: list[np.ndarray]) -> list[np.ndarray]:
        basis: list[np.ndarray] = []
        _orthonormal_add(basis, np.eye(self.dim))
        letters = []
        for g in gens:
            letters += [g, dagger(g)]
        for g in letters:
            _orthonormal_add(basis, g)
        cap = self.dim * self.dim
        grew = True
        while grew and len(basis) < cap:
            grew = False
            for b in list(basis):
                for g in letters:
                    for prod in (b @ g, g @ b):
                        if _orthonormal_add(basis, prod):
                            grew = True
        return basis

    def __len__(self) -> int:
        return len(self.basis)

    def coordinates(self, m: np.ndarray) -> np.ndarray:
        return np.array([hs_inner(b, m) for b in self.basis])

    def project(self, m: np.ndarray) -> np.ndarray:
        c = self.coordinates(m)
        return np.tensordot(c, np.array(self.basis), axes=1)

    def contains(self, m: np.ndarray, tol: float = SPAN_TOL) -> bool:
        m = np.asarray(m, dtype=complex)
        return float(np.linalg.norm(m - self.project(m))) < tol * max(1.0, float(np.linalg.norm(m)))

    def closure_defect(self) -> float:
        """Largest distance of a basis product or adjoint from the span."""
        worst = 0.0
        for a in self.basis:
            worst = max(worst, float(np.linalg.norm(dagger(a) - self.project(dagger(a)))))
            for b in self.basis:
                ab = a @ b
                worst = max(worst, float(np.linalg.norm(ab - self.project(ab))))
        return worst

    def element(self, coeffs: Sequence[complex]) -> np.ndarray:
        return np.tensordot(np.asarray(coeffs, dtype=complex), np.array(self.basis), axes=1)

    def random_element(self, rng: np.random.Generator, hermitian: bool = False) -> np.ndarray:
        c = rng.normal(size=len(self)) + 1j * rng.normal(size=len(self))
        m = self.element(c)
        return (m + dagger(m)) / 2 if hermitian else m


@dataclass
class CommutativeSubalgebra:
    parent: FiniteAlgebra
    generators: list[np.ndarray]
    label: str = ""
    basis: list[np.ndarray] = field(init=False)

    def __post_init__(self):
        self.generators = [np.array(g, dtype=complex) for g in self.generators]
        self.basis = FiniteAlgebra(self.generators, dim=self.parent.dim).basis
        for b in self.basis:
            if not self.parent.contains(b):
                raise ContractViolation(f"subalgebra {self.label!r} is not inside its parent")

    def contains(self, m: np.ndarray, tol: float = SPAN_TOL) -> bool:
        m = np.asarray(m, dtype=complex)
        c = np.array([hs_inner(b, m) for b in self.basis])
        r = m - np.tensordot(c, np.array(self.basis), axes=1)
        return float(np.linalg.norm(r)) < tol * max(1.0, float(np.linalg.norm(m)))

    def element(self, coeffs: Sequence[complex]) -> np.ndarray:
        return np.tensordot(np.asarray(coeffs, dtype=complex), np.array(self.basis), axes=1)

    def max_commutator(self) -> float:
        return max(
            (float(np.linalg.norm(a @ b - b @ a)) for a in self.basis for b in self.basis),
            default=0.0,
        )


def commutant_dimension(q: CommutativeSubalgebra, tol: float = NULL_TOL) -> int:
    """Dimension of {X in parent : [X, q] = 0}, by the null space of ad_q."""
    pb = q.parent.basis
    cols = []
    for p in pb:
        cols.append(np.concatenate([(p @ b - b @ p).reshape(-1) for b in q.basis]))
    m = np.array(cols).T
    s = np.linalg.svd(m, compute_uv=False)
    return int(len(pb) - np.sum(s > tol))


def check_maximal_commutative(q: CommutativeSubalgebra) -> bool:
    """True iff ``q`` is commutative and equal to its own commutant in the parent."""
    if q.max_commutator() >= SPAN_TOL:
        return False
    return commutant_dimension(q) == len(q.basis)


def spectral_decompose(h: np.ndarray) -> list[tuple[float, np.ndarray]]:
    """Eigenvalue/projector pairs, ascending, degenerate values merged."""
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h):
        raise ContractViolation("spectral_decompose needs a Hermitian matrix")
    vals, vecs = np.linalg.eigh(h)
    out: list[tuple[float, np.ndarray]] = []
    start = 0
    for k in range(1, len(vals) + 1):
        if k == len(vals) or vals[k] - vals[k - 1] > MERGE_TOL:
            v = vecs[:, start:k]
            out.append((float(np.mean(vals[start:k])), v @ dagger(v)))
            start = k
    return out


@dataclass(frozen=True)
class Character:
    """A joint-eigenvalue assignment on a commutative subalgebra.

    ``values`` lists the eigenvalue taken by each generator; ``projector``
    is the minimal projection on which the character is supported.
    """

    subalgebra: CommutativeSubalgebra
    values: tuple[float, ...]
    projector: np.ndarray

    def __call__(self, a: np.ndarray) -> complex:
        p = self.projector
        return complex(np.trace(p @ a) / np.trace(p).real)

    def basis_values(self) -> dict[int, complex]:
        return {i: self(b) for i, b in enumerate(self.subalgebra.basis)}


def enumerate_characters(q: CommutativeSubalgebra) -> list[Character]:
    """Characters from simultaneous diagonalization of the generators."""
    spaces = [np.eye(q.parent.dim, dtype=complex)]
    for g in q.generators:
        h = (g + dagger(g)) / 2
        refined = []
        for v in spaces:
            vals, w = np.linalg.eigh(dagger(v) @ h @ v)
            start = 0
            for k in range(1, len(vals) + 1):
                if k == len(vals) or vals[k] - vals[k - 1] > MERGE_TOL:
                    refined.append(v @ w[:, start:k])
                    start = k
        spaces = refined
    chars = []
    for v in spaces:
        p = v @ dagger(v)
        vals = tuple(float(np.real(np.trace(p @ g)) / v.shape[1]) for g in q.generators)
        chars.append(Character(q, tuple(0.0 if abs(x) < MERGE_TOL else x for x in vals), p))
    chars.sort(key=lambda c: c.values)
    return chars


class StateFunctional:
    """A linear functional stored by its values on the algebra basis.

    ``psi(A) = sum_i <B_i, A> psi(B_i)`` for the orthonormal basis ``B_i``.
    """

    def __init__(self, algebra: FiniteAlgebra, values: Sequence[complex], check: bool = True):
        self.algebra = algebra
        self.values = np.asarray(values, dtype=complex)
        if self.values.shape != (len(algebra),):
            raise ContractViolation("one value per basis element required")
        # psi(X) = tr(W X) for X in the algebra
        self._w = np.tensordot(self.values, np.array([dagger(b) for b in algebra.basis]), axes=1)
        if check:
            norm = self(np.eye(algebra.dim))
            if abs(norm - 1.0) > 1e-12:
                raise InvalidState(f"functional is not normalized: psi(I) = {norm}")
            if self.min_form_eigenvalue() < -POSITIVITY_TOL:
                raise InvalidState("functional is not positive")

    @classmethod
    def from_function(cls, algebra: FiniteAlgebra, f: Callable[[np.ndarray], complex], check=True):
        return cls(algebra, [f(b) for b in algebra.basis], check=check)

    @classmethod
    def from_vector(cls, algebra: FiniteAlgebra, v: StateVector):
        a = v.amplitudes
        return cls.from_function(algebra, lambda m: np.vdot(a, m @ a))

    @classmethod
    def normalized_trace(cls, algebra: FiniteAlgebra):
        return cls.from_function(algebra, lambda m: np.trace(m) / algebra.dim)

    def __call__(self, a: np.ndarray) -> complex:
        return complex(np.sum(self._w.T * np.asarray(a)))

    def form(self) -> np.ndarray:
        """Gram matrix G_ij = psi(B_i^dagger B_j) of the GNS sesquilinear form."""
        basis = np.array(self.algebra.basis)
        prods = np.einsum("iba,jbc->ijac", np.conj(basis), basis)
        return np.einsum("ca,ijac->ij", self._w, prods)

    def min_form_eigenvalue(self) -> float:
        g = self.form()
        return float(np.linalg.eigvalsh((g + dagger(g)) / 2)[0])


@dataclass
class GnsRepresentation:
    source: StateFunctional
    rep_dim: int
    cyclic_vector: StateVector
    coefficients: np.ndarray  # algebra-basis coefficients of the orthonormal classes
    rep_map: dict[int, np.ndarray]

    def rep(self, a: np.ndarray) -> np.ndarray:
        """Matrix of left multiplication by ``a`` on the quotient space."""
        psi = self.source
        basis = np.array(psi.algebra.basis)
        c = self.coefficients
        left = np.einsum("ik,iba->kab", np.conj(c), np.conj(basis))  # e_k^dagger
        right = np.einsum("jl,jab->lab", c, basis)  # e_l
        m = psi._w @ left @ np.asarray(a)
        return np.einsum("kab,lba->kl", m, right)

    def expectation(self, a: np.ndarray) -> complex:
        om = self.cyclic_vector.amplitudes
        return complex(np.vdot(om, self.rep(a) @ om))


def gns_construct(psi: StateFunctional) -> GnsRepresentation:
    """Quotient by the null space of psi(U*V), orthonormalize, represent by left product."""
    g = psi.form()
    g = (g + dagger(g)) / 2
    vals, vecs = np.linalg.eigh(g)
    if vals[0] < -POSITIVITY_TOL:
        raise InvalidState(f"GNS form has negative eigenvalue {vals[0]:.3e}")
    keep = vals > NULL_TOL
    c = vecs[:, keep] / np.sqrt(vals[keep])
    basis = psi.algebra.basis
    # Omega_k = (e_k, Phi(I)) = sum_i conj(c_ik) psi(B_i^dagger)
    adj_vals = np.array([psi(dagger(b)) for b in basis])
    omega = np.conj(c).T @ adj_vals
    rep = GnsRepresentation(psi, int(keep.sum()), StateVector(omega), c, {})
    rep.rep_map = {i: rep.rep(b) for i, b in enumerate(basis)}
    return rep


def state_from_projector(p: np.ndarray, algebra: FiniteAlgebra) -> StateFunctional:
    """psi defined by p A p = psi(A) p for a rank-one projector p."""
    p = np.asarray(p, dtype=complex)
    if not is_projector(p):
        raise ContractViolation("p must satisfy p^2 = p = p^dagger")
    tr = np.trace(p).real
    if abs(tr - 1.0) > 1e-8:
        raise ContractViolation(f"p has rank {tr:.6g}; the scalar psi(A) is ill-defined")
    return StateFunctional.from_function(algebra, lambda m: np.trace(p @ m @ p) / tr)
