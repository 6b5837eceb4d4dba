# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled register kernels, bit-twiddling loops over dim <= 16 arrays.

Same contracts as the pure backend: flat complex128 registers, qubit 0 in
the most significant index bit, fresh output arrays.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

NAME = "native"

ctypedef cnp.complex128_t cdouble

DEF MAXDIM = 16


cdef int _masks(tuple targets, int n, long* sub, long* tmask) except -1:
    # sub[j]: target sub-index j scattered into full-register bit positions.
    cdef int k = len(targets)
    cdef int b, j
    cdef long m = 0, s
    cdef long shift[4]
    for b in range(k):
        shift[b] = n - 1 - <long>targets[b]
        m |= 1 << shift[b]
    for j in range(1 << k):
        s = 0
        for b in range(k):
            if j >> (k - 1 - b) & 1:
                s |= 1 << shift[b]
        sub[j] = s
    tmask[0] = m
    return k


def kron2(const cdouble[::1] a, const cdouble[::1] b):
    cdef int da = a.shape[0], db = b.shape[0]
    out_arr = np.empty(da * db, dtype=np.complex128)
    cdef cdouble[::1] out = out_arr
    cdef int i, j
    for i in range(da):
        for j in range(db):
            out[i * db + j] = a[i] * b[j]
    return out_arr


def apply_matrix(const cdouble[::1] state, const cdouble[:, ::1] mat, tuple targets, int n):
    cdef long sub[MAXDIM]
    cdef long tmask
    cdef int k = _masks(targets, n, sub, &tmask)
    cdef int d = 1 << n, dk = 1 << k
    cdef int base, row, col
    cdef cdouble acc
    out_arr = np.empty(d, dtype=np.complex128)
    cdef cdouble[::1] out = out_arr
    for base in range(d):
        if base & tmask:
            continue
        for row in range(dk):
            acc = 0
            for col in range(dk):
                acc = acc + mat[row, col] * state[base | sub[col]]
            out[base | sub[row]] = acc
    return out_arr


def branch_probabilities(const cdouble[::1] state, const cdouble[:, ::1] basis, tuple targets, int n):
    cdef long sub[MAXDIM]
    cdef long tmask
    cdef int k = _masks(targets, n, sub, &tmask)
    cdef int d = 1 << n, dk = 1 << k
    cdef int m = basis.shape[0]
    cdef int base, i, col
    cdef cdouble amp
    out_arr = np.zeros(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    for base in range(d):
        if base & tmask:
            continue
        for i in range(m):
            amp = 0
            for col in range(dk):
                amp = amp + basis[i, col].conjugate() * state[base | sub[col]]
            out[i] += amp.real * amp.real + amp.imag * amp.imag
    return out_arr


def project_onto(const cdouble[::1] state, const cdouble[::1] vec, tuple targets, int n):
    cdef long sub[MAXDIM]
    cdef long tmask
    cdef int k = _masks(targets, n, sub, &tmask)
    cdef int d = 1 << n, dk = 1 << k
    cdef int base, row, col
    cdef cdouble coeff
    out_arr = np.zeros(d, dtype=np.complex128)
    cdef cdouble[::1] out = out_arr
    for base in range(d):
        if base & tmask:
            continue
        coeff = 0
        for col in range(dk):
            coeff = coeff + vec[col].conjugate() * state[base | sub[col]]
        for row in range(dk):
            out[base | sub[row]] = vec[row] * coeff
    return out_arr


def reduced_density(const cdouble[::1] state, tuple keep, int n):
    cdef long sub[MAXDIM]
    cdef long tmask
    cdef int k = _masks(keep, n, sub, &tmask)
    cdef int d = 1 << n, dk = 1 << k
    cdef int base, row, col
    out_arr = np.zeros((dk, dk), dtype=np.complex128)
    cdef cdouble[:, ::1] out = out_arr
    for base in range(d):
        if base & tmask:
            continue
        for row in range(dk):
            for col in range(dk):
                out[row, col] = out[row, col] + state[base | sub[row]] * state[base | sub[col]].conjugate()
    return out_arr


def expectations(const cdouble[::1] state, const cdouble[:, :, ::1] ops, tuple targets, int n):
    cdef long sub[MAXDIM]
    cdef long tmask
    cdef int k = _masks(targets, n, sub, &tmask)
    cdef int d = 1 << n, dk = 1 << k
    cdef int m = ops.shape[0]
    cdef int base, i, row, col
    cdef cdouble acc
    cdef cdouble rho[MAXDIM][MAXDIM]
    for row in range(dk):
        for col in range(dk):
            rho[row][col] = 0
    for base in range(d):
        if base & tmask:
            continue
        for row in range(dk):
            for col in range(dk):
                rho[row][col] = rho[row][col] + state[base | sub[row]] * state[base | sub[col]].conjugate()
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    for i in range(m):
        acc = 0
        for row in range(dk):
            for col in range(dk):
                acc = acc + ops[i, row, col] * rho[col][row]
        out[i] = acc.real
    return out_arr
