"""Pure-Python shot kernels (fallback for ``_shots_c``).

Every kernel maps a ``(shots, width)`` array of uniforms to one ``uint8``
record code per shot. Draws are consumed left to right in the same order
the object-level engines call ``rng.random()``; unused trailing columns are
ignored. Geometry and probabilities are precomputed by the caller.

Optical record codes are detector bitmasks: D1=1, D2=2, D+3=4, D-3=8
(D0 fires on every shot and is not encoded).
"""
import numpy as np

D1, D2, DPLUS3, DMINUS3 = 1, 2, 4, 8


def _pick(u, cum, last):
    for k in range(len(cum)):
        if u < cum[k]:
            return k
    return last


def categorical(draws, cum, last):
    cum = [float(c) for c in cum]
    out = np.empty(draws.shape[0], dtype=np.uint8)
    for i, row in enumerate(draws[:, 0].tolist()):
        out[i] = _pick(row, cum, last)
    return out


def epr_ess(draws, same_key, flip, p_black_if_a_black, p_black_if_a_white):
    """Codes 0..3 = (A+,B+), (A+,B-), (A-,B+), (A-,B-)."""
    out = np.empty(draws.shape[0], dtype=np.uint8)
    for i, row in enumerate(draws.tolist()):
        a_black = row[0] < 0.5
        if same_key:
            # B holds the opposite of A on the shared axis; flip=-1 if antipodal
            b_black = (not a_black) if flip == 1 else a_black
        else:
            p = p_black_if_a_black if a_black else p_black_if_a_white
            b_black = row[1] < p
        out[i] = (0 if a_black else 2) + (0 if b_black else 1)
    return out


def mz_ess(draws, closed):
    """Codes 0 = Da, 1 = Db."""
    out = np.empty(draws.shape[0], dtype=np.uint8)
    for i, u in enumerate(draws[:, 0].tolist()):
        out[i] = 1 if closed or not u < 0.5 else 0
    return out


def optical_qm(draws, overlap, cum_sim, last_sim, plus_threshold):
    cum = [float(c) for c in cum_sim]
    out = np.empty(draws.shape[0], dtype=np.uint8)
    for i, row in enumerate(draws.tolist()):
        if row[0] < overlap:
            k = _pick(row[1], cum, last_sim)
            code = DPLUS3 if k % 2 == 0 else DMINUS3
            if k < 2:
                code |= D1 | D2
            else:
                code |= D1 if row[2] < 0.5 else D2
        else:
            code = D1 if row[1] < 0.5 else D2
            code |= D1 if row[2] < 0.5 else D2
            code |= DPLUS3 if row[3] < plus_threshold else DMINUS3
        out[i] = code
    return out


def optical_ess(draws, overlap, p1_h, pbs_mode, p_h_if_h, p_h_if_v):
    """``pbs_mode``: 0 PBS shares the BS basis, 1 shares it rotated by 90 deg,
    2 a different basis (photon {3} is then sampled from its preparation)."""
    out = np.empty(draws.shape[0], dtype=np.uint8)
    for i, row in enumerate(draws.tolist()):
        j = 1
        if row[0] < overlap:
            h1 = row[j] < p1_h
            h2 = row[j + 1] < 0.5
            j += 2
            h3_bs = not h2
            if h1 == h2:
                code = D1 if row[j] < 0.5 else D2
                j += 1
            else:
                code = D1 if row[j] < 0.5 else D2
                code |= D1 if row[j + 1] < 0.5 else D2
                j += 2
            if pbs_mode == 0:
                h3 = h3_bs
            elif pbs_mode == 1:
                h3 = not h3_bs
            else:
                h3 = row[j] < (p_h_if_h if h3_bs else p_h_if_v)
        else:
            code = D1 if row[1] < 0.5 else D2
            code |= D1 if row[2] < 0.5 else D2
            h3 = row[3] < 0.5
        out[i] = code | (DPLUS3 if h3 else DMINUS3)
    return out
