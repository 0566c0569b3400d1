# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled shot kernels. Same draw protocol and codes as ``_shots_py``."""
import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef enum:
    D1 = 1
    D2 = 2
    DPLUS3 = 4
    DMINUS3 = 8


cdef inline int _pick(double u, const double[::1] cum, int last) noexcept nogil:
    cdef Py_ssize_t k
    for k in range(cum.shape[0]):
        if u < cum[k]:
            return <int>k
    return last


def categorical(const double[:, ::1] draws, cum, int last):
    cdef const double[::1] c = np.ascontiguousarray(cum, dtype=np.float64)
    cdef Py_ssize_t n = draws.shape[0], i
    out = np.empty(n, dtype=np.uint8)
    cdef unsigned char[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = <unsigned char>_pick(draws[i, 0], c, last)
    return out


def epr_ess(const double[:, ::1] draws, int same_key, int flip,
            double p_black_if_a_black, double p_black_if_a_white):
    cdef Py_ssize_t n = draws.shape[0], i
    cdef bint a_black, b_black
    out = np.empty(n, dtype=np.uint8)
    cdef unsigned char[::1] o = out
    with nogil:
        for i in range(n):
            a_black = draws[i, 0] < 0.5
            if same_key:
                b_black = (not a_black) if flip == 1 else a_black
            elif a_black:
                b_black = draws[i, 1] < p_black_if_a_black
            else:
                b_black = draws[i, 1] < p_black_if_a_white
            o[i] = (0 if a_black else 2) + (0 if b_black else 1)
    return out


def mz_ess(const double[:, ::1] draws, int closed):
    cdef Py_ssize_t n = draws.shape[0], i
    out = np.empty(n, dtype=np.uint8)
    cdef unsigned char[::1] o = out
    with nogil:
        for i in range(n):
            o[i] = 1 if (closed or not draws[i, 0] < 0.5) else 0
    return out


def optical_qm(const double[:, ::1] draws, double overlap, cum_sim, int last_sim,
               double plus_threshold):
    cdef const double[::1] c = np.ascontiguousarray(cum_sim, dtype=np.float64)
    cdef Py_ssize_t n = draws.shape[0], i
    cdef int k
    cdef unsigned char code
    out = np.empty(n, dtype=np.uint8)
    cdef unsigned char[::1] o = out
    with nogil:
        for i in range(n):
            if draws[i, 0] < overlap:
                k = _pick(draws[i, 1], c, last_sim)
                code = DPLUS3 if k % 2 == 0 else DMINUS3
                if k < 2:
                    code |= D1 | D2
                else:
                    code |= D1 if draws[i, 2] < 0.5 else D2
            else:
                code = D1 if draws[i, 1] < 0.5 else D2
                code |= D1 if draws[i, 2] < 0.5 else D2
                code |= DPLUS3 if draws[i, 3] < plus_threshold else DMINUS3
            o[i] = code
    return out


def optical_ess(const double[:, ::1] draws, double overlap, double p1_h, int pbs_mode,
                double p_h_if_h, double p_h_if_v):
    cdef Py_ssize_t n = draws.shape[0], i, j
    cdef bint h1, h2, h3, h3_bs
    cdef unsigned char code
    out = np.empty(n, dtype=np.uint8)
    cdef unsigned char[::1] o = out
    with nogil:
        for i in range(n):
            if draws[i, 0] < overlap:
                h1 = draws[i, 1] < p1_h
                h2 = draws[i, 2] < 0.5
                j = 3
                h3_bs = not h2
                if h1 == h2:
                    code = D1 if draws[i, j] < 0.5 else D2
                    j += 1
                else:
                    code = D1 if draws[i, j] < 0.5 else D2
                    code |= D1 if draws[i, j + 1] < 0.5 else D2
                    j += 2
                if pbs_mode == 0:
                    h3 = h3_bs
                elif pbs_mode == 1:
                    h3 = not h3_bs
                else:
                    h3 = draws[i, j] < (p_h_if_h if h3_bs else p_h_if_v)
            else:
                code = D1 if draws[i, 1] < 0.5 else D2
                code |= D1 if draws[i, 2] < 0.5 else D2
                h3 = draws[i, 3] < 0.5
            o[i] = code | (DPLUS3 if h3 else DMINUS3)
    return out
