"""Local elementary-state model.

Each particle carries its own record of predetermined outcomes, filled in
lazily: the first time a direction (spin) or basis (polarization) is
queried its value is drawn from the single-particle Born marginal of the
particle's current preparation and then memoized. A fresh measurement
repaints the record, keeping only the measured axis. Singlet partners are
negative copies: whenever one partner fixes a value, the other receives the
opposite value on the same axis.

Note the cross-axis pair statistics produced this way are those of the
pair's quantum joint distribution sampled at the first joint query; this is
a simulation shortcut, not a local sampling measure over paintings.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import UniformSource

RESOLUTION = 1e-9
SNAP = 1e-12
BLACK, WHITE = 1, -1
H, V = 1, -1
_QUARTER = int(round((np.pi / 2) / RESOLUTION))


def _snap(p: float) -> float:
    if p < SNAP:
        return 0.0
    if p > 1.0 - SNAP:
        return 1.0
    return p


# --- spin-1/2: elementary state spheres ---------------------------------------


def direction_key(n) -> tuple[tuple[int, int, int], int]:
    """Quantized direction shared by ``n`` and ``-n``, plus the sign of ``n``."""
    n = np.asarray(n, dtype=float)
    n = n / np.linalg.norm(n)
    q = tuple(int(round(x / RESOLUTION)) for x in n)
    lead = next((x for x in q if x != 0), 1)
    if lead < 0:
        return tuple(-x for x in q), -1
    return q, 1


class ElementaryStateSphere:
    """Two-colored sphere; black at ``n`` means spin +1/2 along ``n``.

    Antipodal points always carry opposite colors: the memo stores one
    color per canonical direction and ``n``/``-n`` read it with opposite
    signs.
    """

    def __init__(self, preparation=None):
        self.memo: dict[tuple[int, int, int], int] = {}
        self.preparation = None if preparation is None else _unit(preparation)
        self.partner: ElementaryStateSphere | None = None

    def color(self, n) -> int | None:
        key, sign = direction_key(n)
        c = self.memo.get(key)
        return None if c is None else c * sign

    def store(self, n, color: int) -> None:
        key, sign = direction_key(n)
        self.memo[key] = color * sign

    def repaint(self, n, color: int) -> None:
        self.memo.clear()
        self.store(n, color)
        self.preparation = color * _unit(n)

    def black_probability(self, n) -> float:
        if self.preparation is None:
            return 0.5
        return _snap((1.0 + float(self.preparation @ _unit(n))) / 2)


def _unit(n) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    return n / np.linalg.norm(n)


def singlet_spheres() -> tuple[ElementaryStateSphere, ElementaryStateSphere]:
    a, b = ElementaryStateSphere(), ElementaryStateSphere()
    a.partner, b.partner = b, a
    return a, b


def ess_measure(sphere: ElementaryStateSphere, axis, rng: UniformSource) -> float:
    """Spin projection (+-1/2) along ``axis``."""
    c = sphere.color(axis)
    if c is not None:
        return c / 2
    partner = sphere.partner
    if partner is not None and partner.color(axis) is not None:
        c = -partner.color(axis)
        sphere.repaint(axis, c)
        return c / 2
    c = BLACK if rng.random() < sphere.black_probability(axis) else WHITE
    sphere.repaint(axis, c)
    if partner is not None:
        partner.store(axis, -c)
        partner.preparation = -c * _unit(axis)
    return c / 2


# --- photons: per-basis polarization tables -----------------------------------


def basis_key(angle: float) -> tuple[int, int]:
    """Quantized basis orientation in [0, pi/2) and the H/V flip of ``angle``.

    H at ``b + pi/2`` is V at ``b``, so both angles share one key.
    """
    t = float(angle) % np.pi
    q = int(round(t / RESOLUTION)) % (2 * _QUARTER)
    if q >= _QUARTER:
        return q - _QUARTER, -1
    return q, 1


class PhotonHvTable:
    """Predetermined H/V outcome per polarization basis."""

    def __init__(self, preparation: float | None = None):
        self.memo: dict[int, int] = {}
        self.preparation = preparation
        self.partner: PhotonHvTable | None = None

    def value(self, basis: float) -> int | None:
        key, flip = basis_key(basis)
        v = self.memo.get(key)
        return None if v is None else v * flip

    def store(self, basis: float, v: int) -> None:
        key, flip = basis_key(basis)
        self.memo[key] = v * flip

    def repaint(self, basis: float, v: int) -> None:
        self.memo.clear()
        self.store(basis, v)
        self.preparation = basis if v == H else basis + np.pi / 2

    def h_probability(self, basis: float) -> float:
        if self.preparation is None:
            return 0.5
        return _snap(float(np.cos(self.preparation - basis) ** 2))


def epr_photons() -> tuple[PhotonHvTable, PhotonHvTable]:
    a, b = PhotonHvTable(), PhotonHvTable()
    a.partner, b.partner = b, a
    return a, b


def photon_hv(table: PhotonHvTable, basis: float, rng: UniformSource) -> str:
    """'H' or 'V' in the given basis (as a PBS at that orientation would see)."""
    v = table.value(basis)
    if v is None:
        partner = table.partner
        if partner is not None and partner.value(basis) is not None:
            v = -partner.value(basis)
            table.repaint(basis, v)
        else:
            v = H if rng.random() < table.h_probability(basis) else V
            table.repaint(basis, v)
            if partner is not None:
                partner.store(basis, -v)
                partner.preparation = basis + np.pi / 2 if v == H else basis
    return "H" if v == H else "V"


def ess_bs_route(p1: PhotonHvTable, p2: PhotonHvTable, bs_basis: float, rng: UniformSource):
    """Exit sides ('up'/'down') of two photons meeting at the simple BS.

    Equal hidden polarizations in the BS basis leave together on one side;
    otherwise each photon picks its side independently.
    """
    o1 = photon_hv(p1, bs_basis, rng)
    o2 = photon_hv(p2, bs_basis, rng)
    if o1 == o2:
        side = "up" if rng.random() < 0.5 else "down"
        return side, side
    s1 = "up" if rng.random() < 0.5 else "down"
    s2 = "up" if rng.random() < 0.5 else "down"
    return s1, s2


def single_photon_bs(rng: UniformSource) -> str:
    """A lone photon at the BS: reflected or transmitted with equal odds."""
    return "up" if rng.random() < 0.5 else "down"


# --- kern and dark field --------------------------------------------------------


@dataclass
class KernDarkField:
    kern_path: str
    dark_field_paths: set[str] = field(default_factory=lambda: {"a", "b"})
    coherent: bool = True

    def __post_init__(self):
        self.dark_field_paths = set(self.dark_field_paths) | {self.kern_path}


DECISION_TIMES = ("before_entry", "after_entry")


def ess_mach_zehnder(config: str, decision_time: str, rng: UniformSource) -> tuple[str, KernDarkField]:
    """Detector hit by the kern.

    The kern picks an arm at BS_in while the dark field fills both. With
    BS_out in place the recombined dark field steers the kern to Db; without
    it the kern stays on its arm. When the configuration was decided does
    not enter.
    """
    if config not in ("open", "closed"):
        raise ValueError(f"unknown interferometer config {config!r}")
    if decision_time not in DECISION_TIMES:
        raise ValueError(f"decision_time must be one of {DECISION_TIMES}")
    kdf = KernDarkField("a" if rng.random() < 0.5 else "b")
    if config == "closed":
        return "Db", kdf
    return ("Da" if kdf.kern_path == "a" else "Db"), kdf


# --- optical teleportation shot -----------------------------------------------

BS_BASIS = 0.0


def ess_optical_teleport_shot(encoder: float, pbs: float, overlap: float, rng: UniformSource):
    """One shot: ((side of {1}, side of {2}), PBS branch of {3}).

    Photon {1} is freshly prepared at ``encoder``; {2},{3} are an EPR pair.
    Together at the BS (probability ``overlap``) the hidden H/V values in
    the BS basis decide the routing; apart, each photon picks a side alone.
    """
    p1 = PhotonHvTable(encoder)
    p2, p3 = epr_photons()
    if rng.random() < overlap:
        sides = ess_bs_route(p1, p2, BS_BASIS, rng)
    else:
        sides = (single_photon_bs(rng), single_photon_bs(rng))
    branch = "plus" if photon_hv(p3, pbs, rng) == "H" else "minus"
    return sides, branch
