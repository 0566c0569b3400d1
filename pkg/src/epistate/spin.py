"""Spin-1/2 operators with eigenvalues +-1/2, single and two-particle."""
from __future__ import annotations

import numpy as np

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex) / 2
SY = np.array([[0, -1j], [1j, 0]], dtype=complex) / 2
SZ = np.array([[1, 0], [0, -1]], dtype=complex) / 2


def axis(theta: float, phi: float = 0.0) -> np.ndarray:
    """Unit vector at polar angle ``theta`` from z and azimuth ``phi``."""
    return np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])


def spin_along(n) -> np.ndarray:
    n = np.asarray(n, dtype=float)
    n = n / np.linalg.norm(n)
    return n[0] * SX + n[1] * SY + n[2] * SZ


def eigenprojectors(n) -> tuple[np.ndarray, np.ndarray]:
    """(P_plus, P_minus) for the spin projection along ``n``."""
    s = spin_along(n)
    return I2 / 2 + s, I2 / 2 - s


def first(op: np.ndarray) -> np.ndarray:
    return np.kron(op, I2)


def second(op: np.ndarray) -> np.ndarray:
    return np.kron(I2, op)


S1X, S1Y, S1Z = first(SX), first(SY), first(SZ)
S2X, S2Y, S2Z = second(SX), second(SY), second(SZ)
TOTAL_Z = S1Z + S2Z
TOTAL_SQUARED = sum((a + b) @ (a + b) for a, b in [(S1X, S2X), (S1Y, S2Y), (S1Z, S2Z)])
TWO_SPIN_GENERATORS = [S1X, S1Y, S1Z, S2X, S2Y, S2Z]

# one-dimensional projector shared by the {S1z, S2z} and {Sz, S^2} contexts
UP_UP = (np.eye(4) + 2 * S1Z) @ (np.eye(4) + 2 * S2Z) / 4
