"""Reference computations independent of the package under test.

Everything here works from first principles with exact rationals or
hand-written closed forms; nothing imports ``epistate``.
"""
from fractions import Fraction
from itertools import product

HALF = Fraction(1, 2)


# --- joint-measure feasibility: Fine's criterion -------------------------------


def fine_feasible(e, marginals=None):
    """Joint distribution for four +-1 variables a, a2 | b, b2 exists iff the
    four pairwise distributions are non-negative and all eight CHSH
    inequalities hold.

    ``e`` maps (x, y) with x in {a, a2}, y in {b, b2} to E(x, y).
    ``marginals`` maps a variable to its mean; missing marginals are free,
    and setting them to 0 is always optimal for pairwise positivity.
    """
    m = {k: Fraction(v) for k, v in (marginals or {}).items()}
    e = {k: Fraction(v) for k, v in e.items()}
    for (x, y), exy in e.items():
        mx, my = m.get(x, 0), m.get(y, 0)
        for sx, sy in product((1, -1), repeat=2):
            # P(x=sx, y=sy) = (1 + sx mx + sy my + sx sy E) / 4
            if 1 + sx * mx + sy * my + sx * sy * exy < 0:
                return False
    terms = [("a", "b"), ("a", "b2"), ("a2", "b"), ("a2", "b2")]
    total = sum(e[t] for t in terms)
    for t in terms:
        s = total - 2 * e[t]
        if abs(s) > 2:
            return False
    return True


# --- optical teleportation: exact per-shot coincidence rates -------------------

# exact cos^2 of the relevant angles (degrees)
COS2 = {0: Fraction(1), 45: HALF, 90: Fraction(0), 135: HALF, 180: Fraction(1)}


def _cos2(deg):
    return COS2[deg % 180]


def ess_optical_rates(angle_deg, overlap):
    """(P(minus coincidence), P(plus coincidence)) per shot, elementary-state
    model, encoder = PBS = ``angle_deg``, BS basis H/V.

    Enumerates: arrival (together / apart), hidden H/V of photon 1 at the BS
    basis (Born weight of its preparation), hidden value of photon 2 (fair,
    photon 3 holds the opposite), the routing draws, and photon 3's value
    at the PBS.
    """
    eta = Fraction(overlap)
    minus = plus = Fraction(0)
    # together at the BS
    for h1, p_h1 in ((True, _cos2(angle_deg)), (False, 1 - _cos2(angle_deg))):
        for h2 in (True, False):
            w = eta * p_h1 * HALF
            if w == 0:
                continue
            h3_at_bs = not h2
            # photon 3 at the PBS: 'H at angle' probabilities
            if angle_deg % 180 == 0:
                p3_plus = Fraction(int(h3_at_bs))
            elif angle_deg % 180 == 90:
                p3_plus = Fraction(int(not h3_at_bs))  # V at 0 deg is H at 90 deg
            else:
                prep = 0 if h3_at_bs else 90
                p3_plus = _cos2(prep - angle_deg)
            if h1 == h2:
                p_pair = Fraction(0)  # both on one side
            else:
                p_pair = HALF  # two fair independent sides
            plus += w * p_pair * p3_plus
            minus += w * p_pair * (1 - p3_plus)
    # apart: independent fair sides, photon 3 unpolarized
    minus += (1 - eta) * HALF * HALF
    plus += (1 - eta) * HALF * HALF
    return minus, plus


def qm_optical_rates(angle_deg, overlap):
    """Standard prediction for encoder = PBS: only the singlet component of
    photons 1,2 (weight 1/4) leaves on opposite sides when they interfere,
    and then photon 3 carries photon 1's polarization (plus with certainty)."""
    eta = Fraction(overlap)
    minus = (1 - eta) * Fraction(1, 4)
    plus = eta * Fraction(1, 4) + (1 - eta) * Fraction(1, 4)
    return minus, plus


def rho_oracle(rates):
    """rho at matched N- + N+: ratio of the minus shares among coincidences."""
    m45, p45 = rates(45)
    m90, p90 = rates(90)
    if m90 == 0:
        return None
    return (m45 / (m45 + p45)) / (m90 / (m90 + p90))


# --- teleportation: Bell-branch expansion -----------------------------------------


def teleport_branch_states(alpha, beta):
    """Particle-3 states (unnormalized by the 1/2 factor) per Bell outcome of
    particles 1,2 for input alpha|+> + beta|->, pair 2,3 in the singlet."""
    return {
        "Psi-": (-alpha, -beta),
        "Psi+": (-alpha, beta),
        "Phi-": (beta, alpha),
        "Phi+": (-beta, alpha),
    }


# --- Mach-Zehnder --------------------------------------------------------------


def mz_closed_db(delta):
    import math

    return math.cos(delta / 2) ** 2
