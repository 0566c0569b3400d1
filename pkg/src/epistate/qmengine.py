"""Standard-formalism models: Bell states, polarization optics, Mach-Zehnder,
spin teleportation.

Conventions
-----------
* Polarization ``|theta> = cos(theta)|H> + sin(theta)|V>``; two-photon Bell
  states use ``+ = H`` and ``- = V``.
* The simple beam splitter follows ``u -> (u + d)/sqrt2``,
  ``d -> (u - d)/sqrt2`` with polarization untouched. Two photons are
  handled in first quantization on the 16-dim space (mode of photon A) x
  (mode of photon B), always exchange-symmetric.
* The Mach-Zehnder interferometer uses the reflection-phase convention
  instead: reflection multiplies by ``i``, transmission by 1. The two
  conventions are not interchangeable and are kept separate here.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import spin
from .linalg import (
    ContractViolation,
    StateVector,
    UniformSource,
    apply,
    born_sample,
    born_weights,
    inner,
    ket_projector,
    pick_index,
    tensor,
)

SQRT1_2 = 1 / np.sqrt(2)
PM = ("+", "-")


class BellKind(enum.Enum):
    PSI_MINUS = "Psi-"
    PSI_PLUS = "Psi+"
    PHI_MINUS = "Phi-"
    PHI_PLUS = "Phi+"


BELL_ORDER = (BellKind.PSI_MINUS, BellKind.PSI_PLUS, BellKind.PHI_MINUS, BellKind.PHI_PLUS)

_BELL_AMPS = {
    BellKind.PSI_MINUS: (0, 1, -1, 0),
    BellKind.PSI_PLUS: (0, 1, 1, 0),
    BellKind.PHI_MINUS: (1, 0, 0, -1),
    BellKind.PHI_PLUS: (1, 0, 0, 1),
}


def bell_vector(kind: BellKind, labels=PM) -> StateVector:
    """Bell vector over |++>, |+->, |-+>, |-->."""
    two = tuple(x + y for x in labels for y in labels)
    return StateVector(np.array(_BELL_AMPS[kind], dtype=complex) * SQRT1_2, two)


def qubit(alpha: complex, beta: complex, labels=PM) -> StateVector:
    v = StateVector([alpha, beta], labels)
    if not v.is_normalized():
        raise ContractViolation("|alpha|^2 + |beta|^2 must equal 1")
    return v


@dataclass(frozen=True)
class PolarizationState:
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", float(self.theta) % np.pi)

    def vector(self) -> StateVector:
        return StateVector([np.cos(self.theta), np.sin(self.theta)], ("H", "V"))


def polarization_projectors(basis: float) -> tuple[np.ndarray, np.ndarray]:
    """(along basis, orthogonal to basis) projectors in the H/V space."""
    along = PolarizationState(basis).vector()
    ortho = PolarizationState(basis + np.pi / 2).vector()
    return ket_projector(along), ket_projector(ortho)


def pbs_route(photon: PolarizationState, pbs_basis: float, rng: UniformSource):
    """Polarizing beam splitter: ('plus' | 'minus', polarization after the PBS)."""
    k, _ = born_sample(photon.vector(), polarization_projectors(pbs_basis), rng)
    if k == 0:
        return "plus", PolarizationState(pbs_basis)
    return "minus", PolarizationState(pbs_basis + np.pi / 2)


# --- two-photon dual-rail optics -------------------------------------------

MODES = ("uH", "uV", "dH", "dV")
_PATH_BS = np.array([[1, 1], [1, -1]], dtype=complex) * SQRT1_2
SINGLE_PHOTON_BS = np.kron(_PATH_BS, np.eye(2))
TWO_PHOTON_BS = np.kron(SINGLE_PHOTON_BS, SINGLE_PHOTON_BS)
_SWAP = np.zeros((16, 16))
for _i in range(4):
    for _j in range(4):
        _SWAP[4 * _j + _i, 4 * _i + _j] = 1
SYMMETRIZER = (np.eye(16) + _SWAP) / 2
SAME_SIDE = np.diag([float((i < 2) == (j < 2)) for i in range(4) for j in range(4)]).astype(complex)
OPPOSITE_SIDE = np.eye(16) - SAME_SIDE


def two_photon_input(pol_ud) -> StateVector:
    """Symmetrized state of one photon in ``u`` and one in ``d``.

    ``pol_ud`` holds amplitudes c[p, q] (u-photon polarization p, d-photon
    polarization q) over HH, HV, VH, VV; a Bell vector works directly.
    The norm of ``pol_ud`` is carried over unchanged.
    """
    c = np.asarray(pol_ud.amplitudes if isinstance(pol_ud, StateVector) else pol_ud, dtype=complex)
    c = c.reshape(2, 2)
    psi = np.zeros((4, 4), dtype=complex)
    psi[0:2, 2:4] = c
    sym = (psi + psi.T) * SQRT1_2
    return StateVector(sym.reshape(-1), tuple(a + "," + b for a in MODES for b in MODES))


def beamsplitter_transform(state: StateVector) -> StateVector:
    """Apply the simple beam splitter to both photons of a symmetric state."""
    if state.dim != 16:
        raise ContractViolation("expected a 16-dim two-photon mode state")
    return apply(TWO_PHOTON_BS, state)


def side_weights(state: StateVector) -> dict[str, float]:
    a = state.amplitudes
    same = float(np.vdot(a, SAME_SIDE @ a).real)
    opp = float(np.vdot(a, OPPOSITE_SIDE @ a).real)
    return {"same": same, "opposite": opp}


def fock_amplitudes(state: StateVector, tol: float = 1e-12) -> dict[str, complex]:
    """Occupation-number readout, e.g. ``{'uH uV': 0.707, 'dH dV': -0.707}``."""
    psi = state.amplitudes.reshape(4, 4)
    out = {}
    for i in range(4):
        for j in range(i, 4):
            amp = psi[i, i] if i == j else psi[i, j] * np.sqrt(2)
            if abs(amp) > tol:
                out[f"{MODES[i]} {MODES[j]}"] = complex(amp)
    return out


@dataclass(frozen=True)
class OpticalBranches:
    """Outcome weights for one shot of the optical teleportation set-up.

    ``simultaneous`` is indexed (opposite, plus), (opposite, minus),
    (same, plus), (same, minus): BS exit sides of photons {1},{2} and the
    PBS branch of photon {3}. ``distinguishable_plus`` is photon {3}'s
    PBS plus-probability when {1} and {2} do not interfere.
    """

    simultaneous: np.ndarray
    distinguishable_plus: float


def optical_teleport_branches(encoder: float, pbs: float) -> OpticalBranches:
    """Photon {1} at ``encoder``, photons {2},{3} in the singlet."""
    hv = ("H", "V")
    state = tensor(PolarizationState(encoder).vector(), bell_vector(BellKind.PSI_MINUS, hv))
    amps = state.amplitudes.reshape(4, 2)  # (photons 1,2) x photon 3
    joint = np.zeros(4)
    plus = 0.0
    for k in (0, 1):
        # photon 3 found along (k=0) or orthogonal to (k=1) the PBS axis
        along = PolarizationState(pbs + k * np.pi / 2).vector().amplitudes
        c12 = amps @ np.conj(along)
        w = side_weights(beamsplitter_transform(two_photon_input(c12)))
        joint[k] = w["opposite"]
        joint[2 + k] = w["same"]
        if k == 0:
            plus = float(np.vdot(c12, c12).real)
    joint[joint < 1e-12] = 0.0
    return OpticalBranches(joint, plus)


# --- Mach-Zehnder -------------------------------------------------------------

_REFLECT = 1j


def mz_amplitudes(config: str, delta: float = 0.0) -> dict[str, complex]:
    """Detector amplitudes for one photon entering BS_in.

    ``delta`` is an extra phase on arm b (an imperfect recombination).
    """
    if config not in ("open", "closed"):
        raise ContractViolation(f"unknown interferometer config {config!r}")
    arm_a = SQRT1_2 * _REFLECT  # transmitted at BS_in, reflected at M_a
    arm_b = SQRT1_2 * _REFLECT * _REFLECT * np.exp(1j * delta)  # reflected twice
    if config == "open":
        return {"Da": arm_a, "Db": arm_b}
    return {
        "Da": SQRT1_2 * (arm_a + _REFLECT * arm_b),
        "Db": SQRT1_2 * (_REFLECT * arm_a + arm_b),
    }


def mz_probabilities(config: str, delta: float = 0.0) -> np.ndarray:
    amps = mz_amplitudes(config, delta)
    v = StateVector([amps["Da"], amps["Db"]], ("Da", "Db"))
    return born_weights(v, [np.diag([1, 0]), np.diag([0, 1])])


def mach_zehnder(config: str, rng: UniformSource, delta: float = 0.0) -> str:
    amps = mz_amplitudes(config, delta)
    v = StateVector([amps["Da"], amps["Db"]], ("Da", "Db"))
    k, _ = born_sample(v, [np.diag([1.0, 0]), np.diag([0, 1.0])], rng)
    return ("Da", "Db")[k]


# --- EPR singlet --------------------------------------------------------------


def singlet_joint(axis_a, axis_b) -> np.ndarray:
    """Born weights of (++, +-, -+, --) for spin projections along two axes."""
    pa, pb = spin.eigenprojectors(axis_a), spin.eigenprojectors(axis_b)
    v = bell_vector(BellKind.PSI_MINUS)
    return born_weights(v, [np.kron(x, y) for x in pa for y in pb])


# --- teleportation ------------------------------------------------------------

_FLIP_PLUS = np.diag([-1.0, 1.0]).astype(complex)
_SWAP_PM = np.array([[0, 1], [1, 0]], dtype=complex)
CORRECTIONS = {
    BellKind.PSI_MINUS: np.eye(2, dtype=complex),
    BellKind.PSI_PLUS: _FLIP_PLUS,
    BellKind.PHI_MINUS: _SWAP_PM,
    BellKind.PHI_PLUS: _SWAP_PM @ _FLIP_PLUS,
}


@dataclass(frozen=True)
class TeleportResult:
    outcome: BellKind
    bob_state: StateVector  # particle {3} after Bob's correction (or raw)
    fidelity: float


def bell_projectors_12() -> list[np.ndarray]:
    return [np.kron(ket_projector(bell_vector(k)), np.eye(2)) for k in BELL_ORDER]


def _particle3(post: StateVector, kind: BellKind) -> StateVector:
    b = bell_vector(kind).amplitudes
    amps = np.conj(b) @ post.amplitudes.reshape(4, 2)
    return StateVector(amps, PM).normalize()


def teleport_branches(alpha: complex, beta: complex, correct: bool = True):
    """Per Bell outcome: (probability, particle-3 state, fidelity)."""
    psi1 = qubit(alpha, beta)
    full = tensor(psi1, bell_vector(BellKind.PSI_MINUS))
    out = {}
    for kind, p in zip(BELL_ORDER, bell_projectors_12()):
        branch = apply(p, full)
        prob = branch.norm() ** 2
        bob = _particle3(branch.normalize(), kind)
        if correct:
            bob = apply(CORRECTIONS[kind], bob)
        out[kind] = (prob, bob, abs(inner(psi1, bob)) ** 2)
    return out


def teleport(alpha: complex, beta: complex, rng: UniformSource, correct: bool = True) -> TeleportResult:
    """Bell measurement on particles {1},{2}, then Bob's correction on {3}."""
    psi1 = qubit(alpha, beta)
    full = tensor(psi1, bell_vector(BellKind.PSI_MINUS))
    k, post = born_sample(full, bell_projectors_12(), rng)
    kind = BELL_ORDER[k]
    bob = _particle3(post, kind)
    if correct:
        bob = apply(CORRECTIONS[kind], bob)
    return TeleportResult(kind, bob, abs(inner(psi1, bob)) ** 2)


def optical_teleport_shot(branches: OpticalBranches, overlap: float, rng: UniformSource):
    """One shot of the optical set-up: ((side of {1}, side of {2}), PBS branch of {3}).

    With probability ``overlap`` photons {1},{2} reach the BS together and
    the joint weights apply; otherwise each takes a side on its own and {3}
    meets the PBS unpolarized.
    """
    if rng.random() < overlap:
        k = pick_index(branches.simultaneous, rng.random())
        branch = "plus" if k % 2 == 0 else "minus"
        if k < 2:
            return ("up", "down"), branch
        side = "up" if rng.random() < 0.5 else "down"
        return (side, side), branch
    s1 = "up" if rng.random() < 0.5 else "down"
    s2 = "up" if rng.random() < 0.5 else "down"
    plus = [branches.distinguishable_plus, 1.0 - branches.distinguishable_plus]
    branch = "plus" if pick_index(plus, rng.random()) == 0 else "minus"
    return (s1, s2), branch
