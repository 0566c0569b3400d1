"""Per-context probability spaces, mean values, and the CHSH joint-measure test.

A measurement context is a commuting set of observables; it induces an
ordinary finite probability space over joint eigenvalue assignments.
Whether the per-context distributions of several contexts are marginals of
one joint distribution is decided exactly with a rational simplex.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence, Union

import numpy as np

from .algebra import CommutativeSubalgebra, StateFunctional, enumerate_characters, spectral_decompose
from .linalg import ContractViolation, StateVector, is_hermitian

State = Union[StateVector, StateFunctional]


def _expect(psi: State, m: np.ndarray) -> float:
    if isinstance(psi, StateVector):
        a = psi.amplitudes
        return float(np.vdot(a, m @ a).real)
    return float(psi(m).real)


@dataclass(frozen=True)
class ContextualProbabilitySpace:
    """Finite outcome set with the power-set sigma-algebra and a measure."""

    context_label: str
    outcomes: tuple
    measure: Mapping

    def __post_init__(self):
        if set(self.measure) != set(self.outcomes):
            raise ContractViolation("measure must be defined on exactly the outcomes")
        probs = np.array([self.measure[o] for o in self.outcomes], dtype=float)
        if np.any(probs < -1e-12) or np.any(probs > 1 + 1e-12):
            raise ContractViolation("probabilities must lie in [0, 1]")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise ContractViolation(f"measure sums to {probs.sum()!r}, not 1")

    def probability(self, event) -> float:
        event = set(event)
        if not event <= set(self.outcomes):
            raise ContractViolation("event is not a subset of the outcome set")
        return float(sum(self.measure[o] for o in event))

    def events(self):
        """Every member of the sigma-algebra (the power set)."""
        for r in range(len(self.outcomes) + 1):
            yield from (frozenset(c) for c in itertools.combinations(self.outcomes, r))

    @classmethod
    def from_context(cls, psi: State, q: CommutativeSubalgebra) -> "ContextualProbabilitySpace":
        """Outcomes are the characters of ``q``; weights are psi of their projectors."""
        chars = enumerate_characters(q)
        weights = np.array([max(_expect(psi, c.projector), 0.0) for c in chars])
        weights /= weights.sum()
        outcomes = tuple(c.values for c in chars)
        return cls(q.label, outcomes, dict(zip(outcomes, weights.tolist())))


def mean_value(psi: State, observable: np.ndarray) -> float:
    """Spectral mean sum_k lambda_k P(k) with Born (or functional) weights."""
    observable = np.asarray(observable, dtype=complex)
    if not is_hermitian(observable):
        raise ContractViolation("observable must be Hermitian")
    return float(sum(lam * _expect(psi, p) for lam, p in spectral_decompose(observable)))


def additivity_check(psi: State, a: np.ndarray, b: np.ndarray) -> float:
    return abs(mean_value(psi, np.asarray(a) + np.asarray(b)) - mean_value(psi, a) - mean_value(psi, b))


def _check_distribution(d, name: str) -> np.ndarray:
    d = np.asarray(d, dtype=float)
    if d.ndim != 1 or np.any(d < -1e-12) or abs(d.sum() - 1.0) > 1e-10:
        raise ContractViolation(f"{name} is not a probability distribution")
    return d


def classical_double_slit(p_pass_a: float, p_pass_b: float, k_given_a, k_given_b) -> np.ndarray:
    """Total-probability mixture of the per-slit momentum distributions.

    With identical slits (``p_pass_a == p_pass_b``) this is the plain
    average of the two conditionals.
    """
    ka = _check_distribution(k_given_a, "k_given_a")
    kb = _check_distribution(k_given_b, "k_given_b")
    if ka.shape != kb.shape:
        raise ContractViolation("conditionals must share one outcome space")
    if not (0 <= p_pass_a <= 1 and 0 <= p_pass_b <= 1) or p_pass_a + p_pass_b <= 0:
        raise ContractViolation("slit passage probabilities must be in [0, 1] and not both 0")
    return (p_pass_a * ka + p_pass_b * kb) / (p_pass_a + p_pass_b)


@dataclass
class CorrelationTable:
    """Pairwise correlations E(x, y) of +-1 outcomes, with optional marginals."""

    settings: list[tuple[str, str]]
    values: dict[tuple[str, str], float]
    marginals: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        for s in self.settings:
            if s not in self.values:
                raise ContractViolation(f"missing correlation for {s}")
            if abs(self.values[s]) > 1 + 1e-12:
                raise ContractViolation(f"correlation {self.values[s]} for {s} outside [-1, 1]")
        for k, m in self.marginals.items():
            if abs(m) > 1 + 1e-12:
                raise ContractViolation(f"marginal {m} for {k} outside [-1, 1]")

    def sides(self) -> tuple[list[str], list[str]]:
        left, right = [], []
        for a, b in self.settings:
            if a not in left:
                left.append(a)
            if b not in right:
                right.append(b)
        return left, right


@dataclass(frozen=True)
class Feasibility:
    feasible: bool
    chsh: float  # largest |CHSH| over the four placements of the minus sign
    combination: str
    weights: dict | None = None

    @property
    def witness(self) -> float | None:
        return None if self.feasible else self.chsh


def chsh_values(table: CorrelationTable) -> dict[str, float]:
    """The four CHSH combinations, keyed by the negated setting pair."""
    (a, a2), (b, b2) = _two_by_two(table)
    e = table.values
    terms = [(a, b), (a, b2), (a2, b), (a2, b2)]
    total = sum(e[t] for t in terms)
    return {f"-E({x},{y})": total - 2 * e[(x, y)] for x, y in terms}


def _two_by_two(table: CorrelationTable):
    left, right = table.sides()
    if len(left) != 2 or len(right) != 2 or len(table.settings) != 4:
        raise ContractViolation("joint_measure_feasible needs exactly 2 settings per side (4 pairs)")
    if any((x, y) not in table.values for x in left for y in right):
        raise ContractViolation("table must hold all four setting pairs")
    return left, right


def _exact(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def phase_one_feasible(a_rows: Sequence[Sequence[Fraction]], b: Sequence[Fraction]):
    """Exact feasibility of ``A x = b, x >= 0`` by a Phase-I simplex with Bland's rule.

    Returns a feasible ``x`` (list of Fractions) or ``None``.
    """
    m, n = len(a_rows), len(a_rows[0])
    rows = []
    for i in range(m):
        r = [_exact(v) for v in a_rows[i]]
        rhs = _exact(b[i])
        if rhs < 0:
            r, rhs = [-v for v in r], -rhs
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        rows.append(r + art + [rhs])
    basis = [n + i for i in range(m)]
    width = n + m
    # objective row: minimize the sum of artificials -> reduced costs
    cost = [Fraction(0)] * (width + 1)
    for r in rows:
        for j in range(width + 1):
            cost[j] -= r[j]
    for j in range(n, width):
        cost[j] += 1
    while True:
        enter = next((j for j in range(width) if cost[j] < 0), None)
        if enter is None:
            break
        best = None
        for i, r in enumerate(rows):
            if r[enter] > 0:
                ratio = r[-1] / r[enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:  # unbounded cannot occur in phase one
            break
        i = best[1]
        piv = rows[i][enter]
        rows[i] = [v / piv for v in rows[i]]
        for k in range(m):
            if k != i and rows[k][enter] != 0:
                f = rows[k][enter]
                rows[k] = [vk - f * vi for vk, vi in zip(rows[k], rows[i])]
        if cost[enter] != 0:
            f = cost[enter]
            cost = [vc - f * vi for vc, vi in zip(cost, rows[i])]
        basis[i] = enter
    if -cost[-1] != 0:
        return None
    x = [Fraction(0)] * width
    for i, j in enumerate(basis):
        x[j] = rows[i][-1]
    return x[:n]


def joint_measure_feasible(table: CorrelationTable) -> Feasibility:
    """Is there one distribution over the 16 deterministic +-1 assignments
    reproducing every correlation (and marginal) in the table?"""
    (a, a2), (b, b2) = _two_by_two(table)
    names = [a, a2, b, b2]
    vertices = list(itertools.product((1, -1), repeat=4))
    rows = [[Fraction(1)] * 16]
    rhs = [Fraction(1)]
    for x, y in [(a, b), (a, b2), (a2, b), (a2, b2)]:
        ix, iy = names.index(x), names.index(y)
        rows.append([Fraction(v[ix] * v[iy]) for v in vertices])
        rhs.append(_exact(table.values[(x, y)]))
    for s in names:
        if s in table.marginals:
            ix = names.index(s)
            rows.append([Fraction(v[ix]) for v in vertices])
            rhs.append(_exact(table.marginals[s]))
    sol = phase_one_feasible(rows, rhs)
    combos = chsh_values(table)
    label = max(combos, key=lambda k: abs(combos[k]))
    weights = None if sol is None else {v: w for v, w in zip(vertices, sol) if w != 0}
    return Feasibility(sol is not None, abs(combos[label]), label, weights)
