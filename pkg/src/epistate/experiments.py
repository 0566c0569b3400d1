"""Experiment runners composing the two engines.

Bulk runs draw one fixed-width row of uniforms per shot (see ``rng``) and
feed it to a shot kernel; the object-level engines can replay any shot from
the same row, so ``trace_*`` helpers reproduce kernel records exactly.
Shots are grouped in blocks of ``BLOCK_SHOTS`` and blocks are spread over
worker threads; results are merged in block order, so counts do not depend
on the shard count.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import essengine as ess
from . import kernels, qmengine as qm, spin
from .algebra import FiniteAlgebra, gns_construct, state_from_projector
from .contextprob import CorrelationTable, classical_double_slit
from .linalg import ContractViolation, born_sample, born_weights, cumulative, tensor
from .rng import BLOCK_SHOTS, BOOTSTRAP_STREAM, RowRng, check_seed, make_rng, shot_draws

ENGINES = ("qm", "ess")

STREAM_MZ = 1
STREAM_EPR = 2
STREAM_TELEPORT = 3
STREAM_OPTICAL = 4
STREAM_DOUBLE_SLIT = 5

WIDTH = {
    ("mz", "qm"): 1,
    ("mz", "ess"): 1,
    ("epr", "qm"): 1,
    ("epr", "ess"): 2,
    ("optical", "qm"): 4,
    ("optical", "ess"): 6,
}

Kernel = Callable[[np.ndarray], np.ndarray]


def stream_id(base: int, index: int = 0) -> int:
    return (base << 16) | int(index)


def _check_engine(engine: str) -> str:
    if engine not in ENGINES:
        raise ContractViolation(f"engine must be one of {ENGINES}, got {engine!r}")
    return engine


def _check_shots(shots: int) -> int:
    shots = int(shots)
    if shots < 0:
        raise ContractViolation("shots must be non-negative")
    return shots


def run_kernel(kernel: Kernel, seed: int, stream: int, start: int, n: int, width: int, shards: int = 1) -> np.ndarray:
    """Record codes of shots ``start .. start+n`` of one stream.

    Work is cut at block boundaries and the pieces are joined in shot
    order, so the output never depends on ``shards``.
    """
    if shards < 1:
        raise ContractViolation("shards must be >= 1")
    stop = start + n
    cuts = list(range(start, stop, BLOCK_SHOTS))
    pieces = []
    for lo in cuts:
        hi = min((lo // BLOCK_SHOTS + 1) * BLOCK_SHOTS, stop)
        pieces.append((lo, hi))

    def work(piece):
        lo, hi = piece
        return kernel(np.ascontiguousarray(shot_draws(seed, stream, lo, hi, width)))

    if not pieces:
        return np.empty(0, dtype=np.uint8)
    if shards == 1 or len(pieces) == 1:
        parts = [work(p) for p in pieces]
    else:
        with ThreadPoolExecutor(max_workers=shards) as pool:
            parts = list(pool.map(work, pieces))
    return np.concatenate(parts)


# --- double slit --------------------------------------------------------------


@dataclass(frozen=True)
class DoubleSlitModel:
    n_sites: int = 64
    slit_a: tuple = (23, 24)
    slit_b: tuple = (39, 40)
    momentum_bins: tuple | None = None  # tuple of index tuples; default one bin per DFT index

    def __post_init__(self):
        if self.n_sites < 2:
            raise ContractViolation("n_sites must be >= 2")
        a, b = set(self.slit_a), set(self.slit_b)
        if not a or not b:
            raise ContractViolation("slit sets must be non-empty")
        if a & b:
            raise ContractViolation("slit sets must be disjoint")
        if not all(0 <= i < self.n_sites for i in a | b):
            raise ContractViolation("slit sites outside the lattice")
        if self.momentum_bins is not None:
            flat = sorted(i for bin_ in self.momentum_bins for i in bin_)
            if flat != list(range(self.n_sites)):
                raise ContractViolation("momentum bins must partition 0..n_sites-1")

    def bins(self) -> tuple:
        if self.momentum_bins is None:
            return tuple((k,) for k in range(self.n_sites))
        return tuple(tuple(b) for b in self.momentum_bins)

    def slit_projector(self, which: str) -> np.ndarray:
        sites = self.slit_a if which == "a" else self.slit_b
        p = np.zeros((self.n_sites, self.n_sites))
        p[list(sites), list(sites)] = 1.0
        return p

    def momentum_basis(self) -> np.ndarray:
        """Columns are the DFT momentum eigenvectors."""
        x = np.arange(self.n_sites)
        return np.exp(2j * np.pi * np.outer(x, x) / self.n_sites) / np.sqrt(self.n_sites)

    def momentum_projectors(self) -> list[np.ndarray]:
        f = self.momentum_basis()
        return [f[:, list(b)] @ f[:, list(b)].conj().T for b in self.bins()]

    def site_projectors(self) -> list[np.ndarray]:
        """Position readout; commutes with both slit projectors."""
        out = []
        for x in range(self.n_sites):
            p = np.zeros((self.n_sites, self.n_sites))
            p[x, x] = 1.0
            out.append(p)
        return out

    def incoming_state(self) -> np.ndarray:
        """Uniform incoming state projected onto the slits and renormalized."""
        v = (self.slit_projector("a") + self.slit_projector("b")) @ np.ones(self.n_sites)
        return v / np.linalg.norm(v)


@dataclass(frozen=True)
class DoubleSlitSpectrum:
    a_term: np.ndarray
    b_term: np.ndarray
    interference: np.ndarray
    p_pass_a: float
    p_pass_b: float
    k_given_a: np.ndarray
    k_given_b: np.ndarray
    classical: np.ndarray
    both_open: bool

    @property
    def total(self) -> np.ndarray:
        return self.a_term + self.b_term + self.interference

    @property
    def distribution(self) -> np.ndarray:
        """Detected distribution: full three-term sum, or the classical mixture."""
        return self.total if self.both_open else self.classical

    def sign_changes(self, tol: float = 1e-12) -> int:
        v = self.interference[np.abs(self.interference) > tol]
        return int(np.count_nonzero(np.diff(np.sign(v)) != 0))


def double_slit_spectrum(model: DoubleSlitModel, both_open: bool = True, projectors=None) -> DoubleSlitSpectrum:
    """Per-bin split of the detection probability into slit-a, slit-b and
    interference terms. ``projectors`` overrides the momentum readout."""
    psi = model.incoming_state().astype(complex)
    psi_a = model.slit_projector("a") @ psi
    psi_b = model.slit_projector("b") @ psi
    ps = model.momentum_projectors() if projectors is None else [np.asarray(p) for p in projectors]
    a = np.array([np.vdot(psi_a, p @ psi_a).real for p in ps])
    b = np.array([np.vdot(psi_b, p @ psi_b).real for p in ps])
    cross = np.array([2 * np.vdot(psi_a, p @ psi_b).real for p in ps])
    pa, pb = float(np.vdot(psi_a, psi_a).real), float(np.vdot(psi_b, psi_b).real)
    ka, kb = a / pa, b / pb
    classical = classical_double_slit(pa, pb, ka, kb)
    return DoubleSlitSpectrum(a, b, cross, pa, pb, ka, kb, classical, both_open)


def sample_double_slit(spectrum: DoubleSlitSpectrum, shots: int, seed: int, shards: int = 1) -> np.ndarray:
    """Per-bin detection counts drawn from ``spectrum.distribution``."""
    w = np.clip(spectrum.distribution, 0.0, None)
    if w.size > 256:
        raise ContractViolation("sampling supports at most 256 bins")
    cum, last = cumulative(w)
    codes = run_kernel(
        lambda d: kernels.categorical(d, cum, last),
        check_seed(seed), stream_id(STREAM_DOUBLE_SLIT), 0, _check_shots(shots), 1, shards,
    )
    return np.bincount(codes, minlength=w.size)


# --- delayed-choice Mach-Zehnder ---------------------------------------------

MZ_CONFIGS = ("open", "closed")


@dataclass
class DelayedChoiceResult:
    engine: str
    shots: int
    schedule: list[tuple[str, str]]
    counts: list[dict[str, int]]
    sequences: list[np.ndarray] = field(repr=False)

    def timing_independent(self) -> bool:
        """Entries sharing a configuration produced identical sequences."""
        by_config: dict[str, np.ndarray] = {}
        for (config, _), seq in zip(self.schedule, self.sequences):
            if config in by_config and not np.array_equal(by_config[config], seq):
                return False
            by_config.setdefault(config, seq)
        return True


def _mz_kernel(config: str, engine: str, delta: float) -> Kernel:
    if engine == "qm":
        cum, last = cumulative(qm.mz_probabilities(config, delta))
        return lambda d: kernels.categorical(d, cum, last)
    closed = int(config == "closed")
    return lambda d: kernels.mz_ess(d, closed)


def run_delayed_choice(schedule: Sequence[tuple[str, str]], shots: int, engine: str, seed: int,
                       delta: float = 0.0, shards: int = 1) -> DelayedChoiceResult:
    """Da/Db histogram per (config, decision_time) entry.

    Each entry's randomness depends on the configuration only, so the
    decision time cannot leak into the outcomes.
    """
    _check_engine(engine)
    seed, shots = check_seed(seed), _check_shots(shots)
    schedule = [(str(c), str(t)) for c, t in schedule]
    counts, seqs = [], []
    for config, when in schedule:
        if config not in MZ_CONFIGS:
            raise ContractViolation(f"config must be one of {MZ_CONFIGS}")
        if when not in ess.DECISION_TIMES:
            raise ContractViolation(f"decision_time must be one of {ess.DECISION_TIMES}")
        if engine == "ess" and delta != 0.0:
            raise ContractViolation("delta applies to the qm engine only")
        codes = run_kernel(_mz_kernel(config, engine, delta), seed,
                           stream_id(STREAM_MZ, MZ_CONFIGS.index(config)), 0, shots, 1, shards)
        n = np.bincount(codes, minlength=2)
        counts.append({"Da": int(n[0]), "Db": int(n[1])})
        seqs.append(codes)
    return DelayedChoiceResult(engine, shots, schedule, counts, seqs)


def trace_delayed_choice(config: str, decision_time: str, engine: str, seed: int, start: int, stop: int) -> list[str]:
    """Object-level replay of shots ``start..stop``."""
    rows = shot_draws(seed, stream_id(STREAM_MZ, MZ_CONFIGS.index(config)), start, stop, 1)
    if engine == "qm":
        return [qm.mach_zehnder(config, RowRng(r)) for r in rows]
    return [ess.ess_mach_zehnder(config, decision_time, RowRng(r))[0] for r in rows]


# --- EPR correlation sweep ------------------------------------------------------

PAIR_LABELS = ("++", "+-", "-+", "--")


def sphere_axis(theta: float) -> np.ndarray:
    """Measurement axis at angle ``theta`` from z in the x-z plane."""
    return spin.axis(theta, 0.0)


def angle_label(theta: float) -> str:
    return f"{np.degrees(theta):.6g}"


@dataclass
class EprSweepResult:
    engine: str
    shots: int
    axes: list[tuple[float, float]]
    counts: list[dict[str, int]]
    table: CorrelationTable
    codes: list[np.ndarray] = field(default_factory=list, repr=False)

    def correlation(self, i: int) -> Fraction:
        c = self.counts[i]
        return Fraction(c["++"] + c["--"] - c["+-"] - c["-+"], self.shots)

    def violations(self, i: int) -> int:
        """Shots where same-axis outcomes fail to be opposite."""
        c = self.counts[i]
        a, b = self.axes[i]
        if not _same_axis(a, b):
            raise ContractViolation("violations are defined for same-axis pairs only")
        return c["++"] + c["--"]


def _same_axis(a: float, b: float) -> bool:
    return ess.direction_key(sphere_axis(a)) == ess.direction_key(sphere_axis(b))


def _epr_kernel(na, nb, engine: str) -> Kernel:
    if engine == "qm":
        cum, last = cumulative(qm.singlet_joint(na, nb))
        return lambda d: kernels.categorical(d, cum, last)
    (ka, sa), (kb, sb) = ess.direction_key(na), ess.direction_key(nb)
    probe = ess.ElementaryStateSphere()
    probs = []
    for c in (ess.BLACK, ess.WHITE):
        # partner B after A reads color c along na
        probe.preparation = -c * ess._unit(na)
        probs.append(probe.black_probability(nb))
    return lambda d: kernels.epr_ess(d, int(ka == kb), sa * sb, probs[0], probs[1])


def run_epr_sweep(axes: Sequence[tuple[float, float]], shots: int, engine: str, seed: int,
                  shards: int = 1) -> EprSweepResult:
    """Singlet spin correlations for each (theta_a, theta_b) pair (radians, x-z plane)."""
    _check_engine(engine)
    seed, shots = check_seed(seed), _check_shots(shots)
    if shots == 0:
        raise ContractViolation("an EPR sweep needs at least one shot")
    axes = [(float(a), float(b)) for a, b in axes]
    counts, seqs = [], []
    for i, (a, b) in enumerate(axes):
        kern = _epr_kernel(sphere_axis(a), sphere_axis(b), engine)
        codes = run_kernel(kern, seed, stream_id(STREAM_EPR, i), 0, shots, WIDTH[("epr", engine)], shards)
        n = np.bincount(codes, minlength=4)
        counts.append(dict(zip(PAIR_LABELS, (int(x) for x in n))))
        seqs.append(codes)
    settings, values = [], {}
    for (a, b), c in zip(axes, counts):
        key = (angle_label(a), angle_label(b))
        settings.append(key)
        values[key] = Fraction(c["++"] + c["--"] - c["+-"] - c["-+"], shots)
    return EprSweepResult(engine, shots, axes, counts, CorrelationTable(settings, values), seqs)


def trace_epr(axes: tuple[float, float], index: int, engine: str, seed: int, start: int, stop: int) -> list[str]:
    """Object-level replay; ``index`` is the pair's position in the sweep."""
    na, nb = sphere_axis(axes[0]), sphere_axis(axes[1])
    rows = shot_draws(seed, stream_id(STREAM_EPR, index), start, stop, WIDTH[("epr", engine)])
    out = []
    if engine == "qm":
        pa, pb = spin.eigenprojectors(na), spin.eigenprojectors(nb)
        projs = [np.kron(x, y) for x in pa for y in pb]
        for r in rows:
            k, _ = born_sample(qm.bell_vector(qm.BellKind.PSI_MINUS), projs, RowRng(r))
            out.append(PAIR_LABELS[k])
        return out
    for r in rows:
        rng = RowRng(r)
        a, b = ess.singlet_spheres()
        sa = ess.ess_measure(a, na, rng)
        sb = ess.ess_measure(b, nb, rng)
        out.append(("+" if sa > 0 else "-") + ("+" if sb > 0 else "-"))
    return out


CHSH_AXES = (0.0, np.pi / 2, np.pi / 4, -np.pi / 4)  # a, a', b, b'


def chsh_pairs(a=CHSH_AXES[0], a2=CHSH_AXES[1], b=CHSH_AXES[2], b2=CHSH_AXES[3]) -> list[tuple[float, float]]:
    return [(a, b), (a, b2), (a2, b), (a2, b2)]


def chsh_value(result: EprSweepResult) -> float:
    """E(a,b) + E(a,b') + E(a',b) - E(a',b') for a sweep over ``chsh_pairs``."""
    e = [float(result.correlation(i)) for i in range(4)]
    return e[0] + e[1] + e[2] - e[3]


# --- ideal teleportation ------------------------------------------------------


@dataclass
class TeleportIdealResult:
    shots: int
    counts: dict[str, int]
    fidelities: dict[str, float]
    probabilities: dict[str, float]
    codes: np.ndarray = field(default=None, repr=False)

    @property
    def mean_fidelity(self) -> float:
        total = sum(self.counts.values())
        return sum(self.counts[k] * self.fidelities[k] for k in self.counts) / total


def _teleport_table(alpha: complex, beta: complex):
    full = tensor(qm.qubit(alpha, beta), qm.bell_vector(qm.BellKind.PSI_MINUS))
    return born_weights(full, qm.bell_projectors_12())


def run_teleport_ideal(alpha: complex, beta: complex, shots: int, seed: int, correct: bool = True,
                       shards: int = 1) -> TeleportIdealResult:
    """Histogram of Bell outcomes and the fidelity of Bob's qubit per outcome."""
    seed, shots = check_seed(seed), _check_shots(shots)
    weights = _teleport_table(alpha, beta)
    branches = qm.teleport_branches(alpha, beta, correct)
    cum, last = cumulative(weights)
    codes = run_kernel(lambda d: kernels.categorical(d, cum, last), seed, stream_id(STREAM_TELEPORT), 0, shots, 1, shards)
    n = np.bincount(codes, minlength=4)
    names = [k.value for k in qm.BELL_ORDER]
    return TeleportIdealResult(
        shots,
        {name: int(x) for name, x in zip(names, n)},
        {k.value: float(branches[k][2]) for k in qm.BELL_ORDER},
        {name: float(w) for name, w in zip(names, weights)},
        codes,
    )


def trace_teleport_ideal(alpha: complex, beta: complex, seed: int, start: int, stop: int, correct: bool = True):
    rows = shot_draws(seed, stream_id(STREAM_TELEPORT), start, stop, 1)
    return [qm.teleport(alpha, beta, RowRng(r), correct) for r in rows]


# --- optical teleportation ------------------------------------------------------

DETECTORS = ("D0", "D1", "D2", "D+3", "D-3")
CLASSES = ("minus_coincidence", "plus_coincidence", "no_coincidence")
_BITS = {"D1": kernels.D1, "D2": kernels.D2, "D+3": kernels.DPLUS3, "D-3": kernels.DMINUS3}


@dataclass(frozen=True)
class TeleportApparatus:
    """Angles in degrees. ``overlap`` is the chance photons {1},{2} reach the
    BS together when the mirror is aligned; a misaligned mirror forces 0."""

    encoder_angle: float
    pbs_angle: float
    mirror_aligned: bool = True
    shots: int = 100_000
    engine: str = "qm"
    overlap: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "encoder_angle", float(self.encoder_angle) % 180.0)
        object.__setattr__(self, "pbs_angle", float(self.pbs_angle) % 180.0)
        _check_engine(self.engine)
        _check_shots(self.shots)
        if not 0.0 <= self.overlap <= 1.0:
            raise ContractViolation("overlap must lie in [0, 1]")

    @property
    def simultaneous_probability(self) -> float:
        return float(self.overlap) if self.mirror_aligned else 0.0


@dataclass(frozen=True)
class CoincidenceRecord:
    fired: frozenset
    classification: str

    @classmethod
    def from_fired(cls, fired) -> "CoincidenceRecord":
        fired = frozenset(fired)
        core = {"D0", "D1", "D2"} <= fired
        if core and "D-3" in fired and "D+3" not in fired:
            c = "minus_coincidence"
        elif core and "D+3" in fired and "D-3" not in fired:
            c = "plus_coincidence"
        else:
            c = "no_coincidence"
        return cls(fired, c)

    @classmethod
    def from_code(cls, code: int) -> "CoincidenceRecord":
        return cls.from_fired({"D0"} | {d for d, bit in _BITS.items() if int(code) & bit})


def classify_codes(codes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Boolean masks (minus, plus) over record codes."""
    pair = (codes & (kernels.D1 | kernels.D2)) == (kernels.D1 | kernels.D2)
    minus = pair & ((codes & kernels.DMINUS3) != 0)
    plus = pair & ((codes & kernels.DPLUS3) != 0)
    return minus, plus


@dataclass
class OpticalRunResult:
    apparatus: TeleportApparatus
    shots: int
    counts: dict[str, int]
    codes: np.ndarray = field(repr=False)

    def records(self):
        for c in self.codes:
            yield CoincidenceRecord.from_code(c)


def _optical_kernel(app: TeleportApparatus) -> Kernel:
    enc, pbs = np.radians(app.encoder_angle), np.radians(app.pbs_angle)
    eta = app.simultaneous_probability
    if app.engine == "qm":
        br = qm.optical_teleport_branches(enc, pbs)
        cum, last = cumulative(br.simultaneous)
        plus = cumulative([br.distinguishable_plus, 1.0 - br.distinguishable_plus])[0][0]
        return lambda d: kernels.optical_qm(d, eta, cum, last, plus)
    p1_h = ess.PhotonHvTable(enc).h_probability(ess.BS_BASIS)
    (kb, fb), (kp, fp) = ess.basis_key(ess.BS_BASIS), ess.basis_key(pbs)
    mode = 2 if kb != kp else (0 if fb == fp else 1)
    # photon {3} after its partner fixed H (resp. V) at the BS basis
    p_h_if_h = ess.PhotonHvTable(ess.BS_BASIS).h_probability(pbs)
    p_h_if_v = ess.PhotonHvTable(ess.BS_BASIS + np.pi / 2).h_probability(pbs)
    return lambda d: kernels.optical_ess(d, eta, p1_h, mode, p_h_if_h, p_h_if_v)


def _optical_counts(codes: np.ndarray) -> dict[str, int]:
    minus, plus = classify_codes(codes)
    nm, np_ = int(minus.sum()), int(plus.sum())
    return {"N_minus": nm, "N_plus": np_, "N_other": int(codes.size) - nm - np_}


def run_optical_teleport(app: TeleportApparatus, seed: int, shards: int = 1, stream_index: int = 0) -> OpticalRunResult:
    seed = check_seed(seed)
    codes = run_kernel(_optical_kernel(app), seed, stream_id(STREAM_OPTICAL, stream_index), 0, app.shots,
                       WIDTH[("optical", app.engine)], shards)
    return OpticalRunResult(app, app.shots, _optical_counts(codes), codes)


def run_optical_until(app: TeleportApparatus, target: int, seed: int, shards: int = 1, stream_index: int = 0,
                      batch_blocks: int = 16, max_shots: int = 10**9) -> OpticalRunResult:
    """Run shots until N_minus + N_plus reaches ``target`` exactly.

    The stopping shot is a function of the seed alone; batching only
    controls how many shots are drawn ahead.
    """
    seed = check_seed(seed)
    if target < 1:
        raise ContractViolation("target must be >= 1")
    kern = _optical_kernel(app)
    width = WIDTH[("optical", app.engine)]
    stream = stream_id(STREAM_OPTICAL, stream_index)
    parts, start, have = [], 0, 0
    while True:
        n = batch_blocks * BLOCK_SHOTS
        codes = run_kernel(kern, seed, stream, start, n, width, shards)
        minus, plus = classify_codes(codes)
        cum = np.cumsum(minus | plus)
        if have + (cum[-1] if cum.size else 0) >= target:
            stop = int(np.searchsorted(cum, target - have)) + 1
            parts.append(codes[:stop])
            break
        parts.append(codes)
        have += int(cum[-1])
        start += n
        if start >= max_shots:
            raise RuntimeError(f"coincidence target {target} not reached within {max_shots} shots")
    codes = np.concatenate(parts)
    res_app = TeleportApparatus(app.encoder_angle, app.pbs_angle, app.mirror_aligned, int(codes.size),
                                app.engine, app.overlap)
    return OpticalRunResult(res_app, int(codes.size), _optical_counts(codes), codes)


def trace_optical_teleport(app: TeleportApparatus, seed: int, start: int, stop: int,
                           stream_index: int = 0) -> list[CoincidenceRecord]:
    """Object-level replay of shots ``start..stop`` through the engines."""
    enc, pbs = np.radians(app.encoder_angle), np.radians(app.pbs_angle)
    eta = app.simultaneous_probability
    rows = shot_draws(seed, stream_id(STREAM_OPTICAL, stream_index), start, stop, WIDTH[("optical", app.engine)])
    br = qm.optical_teleport_branches(enc, pbs) if app.engine == "qm" else None
    out = []
    for r in rows:
        rng = RowRng(r)
        if app.engine == "qm":
            sides, branch = qm.optical_teleport_shot(br, eta, rng)
        else:
            sides, branch = ess.ess_optical_teleport_shot(enc, pbs, eta, rng)
        fired = {"D0", "D+3" if branch == "plus" else "D-3"}
        fired |= {"D1" if s == "up" else "D2" for s in sides}
        out.append(CoincidenceRecord.from_fired(fired))
    return out


# --- the rho discriminator ------------------------------------------------------

RHO_ANGLES = (45.0, 90.0)
DEFAULT_OVERLAP = 0.9
INSUFFICIENT = "insufficient statistics"


@dataclass
class RhoResult:
    engine: str
    target: int
    overlap: float
    runs: dict[float, OpticalRunResult]
    rho: float | None
    ci_low: float | None
    ci_high: float | None
    status: str = "ok"

    @property
    def shots(self) -> int:
        return sum(r.shots for r in self.runs.values())


def rho_bootstrap(n45: int, n90: int, target: int, rng: np.random.Generator, resamples: int = 1000,
                  level: float = 0.95) -> tuple[float, float]:
    """Percentile interval for N-(45)/N-(90) with N- resampled as Binomial(target, N-/target)."""
    a = rng.binomial(target, n45 / target, size=resamples)
    b = rng.binomial(target, n90 / target, size=resamples)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(b > 0, a / np.maximum(b, 1), np.inf)
    lo, hi = np.percentile(r, [50 * (1 - level), 50 * (1 + level)])
    return float(lo), float(hi)


def rho_statistic(target: int, seed: int, engine: str, overlap: float = DEFAULT_OVERLAP, shards: int = 1,
                  resamples: int = 1000) -> RhoResult:
    """rho = N-(45)/N-(90), each configuration run to N- + N+ = ``target``."""
    _check_engine(engine)
    seed = check_seed(seed)
    runs = {}
    for i, angle in enumerate(RHO_ANGLES):
        app = TeleportApparatus(angle, angle, True, 0, engine, overlap)
        runs[angle] = run_optical_until(app, target, seed, shards, stream_index=i)
    n45, n90 = runs[45.0].counts["N_minus"], runs[90.0].counts["N_minus"]
    if n90 == 0:
        return RhoResult(engine, target, overlap, runs, None, None, None, INSUFFICIENT)
    lo, hi = rho_bootstrap(n45, n90, target, make_rng(seed, BOOTSTRAP_STREAM), resamples)
    return RhoResult(engine, target, overlap, runs, n45 / n90, lo, hi)


# --- projector state on two spins ------------------------------------------------

GNS_OBSERVABLES = {
    "Psi(S1z)": spin.S1Z,
    "Psi(S2z)": spin.S2Z,
    "Psi(Sz)": spin.TOTAL_Z,
    "Psi(S^2)": spin.TOTAL_SQUARED,
}


@dataclass
class GnsDemoResult:
    values: dict[str, float]
    rep_dim: int
    reproduction_error: float
    homomorphism_error: float
    samples: int


def gns_demo(samples: int = 100, seed: int = 0) -> GnsDemoResult:
    """State fixed by the both-spins-up projector, its GNS representation, and
    the worst mismatch psi(U) vs <Omega|pi(U)|Omega> over random elements U."""
    alg = FiniteAlgebra(spin.TWO_SPIN_GENERATORS)
    psi = state_from_projector(spin.UP_UP, alg)
    values = {k: float(psi(m).real) for k, m in GNS_OBSERVABLES.items()}
    rep = gns_construct(psi)
    rng = make_rng(check_seed(seed))
    repro = hom = 0.0
    for _ in range(samples):
        u, v = alg.random_element(rng), alg.random_element(rng)
        repro = max(repro, abs(psi(u) - rep.expectation(u)))
        hom = max(hom, float(np.abs(rep.rep(u @ v) - rep.rep(u) @ rep.rep(v)).max()))
    return GnsDemoResult(values, rep.rep_dim, repro, hom, samples)
