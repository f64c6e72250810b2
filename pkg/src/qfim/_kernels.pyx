# cython: boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled index-shuffling kernels (see ``_kernels_py`` for the reference)."""

import numpy as np


cdef inline void _kron_into(const double complex[:, :] a, Py_ssize_t a_r0, Py_ssize_t a_nr,
                            Py_ssize_t a_c0, Py_ssize_t a_nc,
                            const double complex[:, :] b, Py_ssize_t b_r0, Py_ssize_t b_nr,
                            Py_ssize_t b_c0, Py_ssize_t b_nc,
                            double complex[:, :] out, Py_ssize_t o_r0, Py_ssize_t o_c0) noexcept nogil:
    cdef Py_ssize_t p, q, s, t
    cdef double complex x
    for p in range(a_nr):
        for s in range(a_nc):
            x = a[a_r0 + p, a_c0 + s]
            for q in range(b_nr):
                for t in range(b_nc):
                    out[o_r0 + p * b_nr + q, o_c0 + s * b_nc + t] = x * b[b_r0 + q, b_c0 + t]


def tracy_singh(const double complex[:, :] a, Py_ssize_t ra, Py_ssize_t ca,
                const double complex[:, :] b, Py_ssize_t rb, Py_ssize_t cb):
    cdef Py_ssize_t ma = a.shape[0], na = a.shape[1]
    cdef Py_ssize_t mb = b.shape[0], nb = b.shape[1]
    cdef Py_ssize_t a_r[2], a_rn[2], a_c[2], a_cn[2]
    cdef Py_ssize_t b_r[2], b_rn[2], b_c[2], b_cn[2]
    cdef Py_ssize_t i, j, k, l, row_off, col_off
    a_r[0] = 0; a_rn[0] = ra; a_r[1] = ra; a_rn[1] = ma - ra
    a_c[0] = 0; a_cn[0] = ca; a_c[1] = ca; a_cn[1] = na - ca
    b_r[0] = 0; b_rn[0] = rb; b_r[1] = rb; b_rn[1] = mb - rb
    b_c[0] = 0; b_cn[0] = cb; b_c[1] = cb; b_cn[1] = nb - cb

    result = np.zeros((ma * mb, na * nb), dtype=np.complex128)
    cdef double complex[:, :] out = result
    with nogil:
        row_off = 0
        for i in range(2):
            for k in range(2):
                col_off = 0
                for j in range(2):
                    for l in range(2):
                        _kron_into(a, a_r[i], a_rn[i], a_c[j], a_cn[j],
                                   b, b_r[k], b_rn[k], b_c[l], b_cn[l],
                                   out, row_off, col_off)
                        col_off += a_cn[j] * b_cn[l]
                row_off += a_rn[i] * b_rn[k]
    return result


def kron(const double complex[:, :] a, const double complex[:, :] b):
    cdef Py_ssize_t ma = a.shape[0], na = a.shape[1]
    cdef Py_ssize_t mb = b.shape[0], nb = b.shape[1]
    result = np.empty((ma * mb, na * nb), dtype=np.complex128)
    cdef double complex[:, :] out = result
    with nogil:
        _kron_into(a, 0, ma, 0, na, b, 0, mb, 0, nb, out, 0, 0)
    return result


def vecb(const double complex[:, :] m, Py_ssize_t rs, Py_ssize_t cs):
    cdef Py_ssize_t nr = m.shape[0], nc = m.shape[1]
    cdef Py_ssize_t r0[4], r1[4], c0[4], c1[4]
    cdef Py_ssize_t blk, i, j, pos = 0
    r0[0] = 0; r1[0] = rs; c0[0] = 0; c1[0] = cs
    r0[1] = rs; r1[1] = nr; c0[1] = 0; c1[1] = cs
    r0[2] = 0; r1[2] = rs; c0[2] = cs; c1[2] = nc
    r0[3] = rs; r1[3] = nr; c0[3] = cs; c1[3] = nc
    result = np.empty(nr * nc, dtype=np.complex128)
    cdef double complex[:] out = result
    with nogil:
        for blk in range(4):
            for j in range(c0[blk], c1[blk]):
                for i in range(r0[blk], r1[blk]):
                    out[pos] = m[i, j]
                    pos += 1
    return result


def unvecb(const double complex[:] v, Py_ssize_t nr, Py_ssize_t nc, Py_ssize_t rs, Py_ssize_t cs):
    cdef Py_ssize_t r0[4], r1[4], c0[4], c1[4]
    cdef Py_ssize_t blk, i, j, pos = 0
    r0[0] = 0; r1[0] = rs; c0[0] = 0; c1[0] = cs
    r0[1] = rs; r1[1] = nr; c0[1] = 0; c1[1] = cs
    r0[2] = 0; r1[2] = rs; c0[2] = cs; c1[2] = nc
    r0[3] = rs; r1[3] = nr; c0[3] = cs; c1[3] = nc
    result = np.empty((nr, nc), dtype=np.complex128, order="F")
    cdef double complex[::1, :] out = result
    with nogil:
        for blk in range(4):
            for j in range(c0[blk], c1[blk]):
                for i in range(r0[blk], r1[blk]):
                    out[i, j] = v[pos]
                    pos += 1
    return result


def lyapunov_operator(const double complex[:, :] c):
    cdef Py_ssize_t n = c.shape[0]
    cdef Py_ssize_t p, q, s
    result = np.zeros((n * n, n * n), dtype=np.complex128)
    cdef double complex[:, :] out = result
    with nogil:
        # I (x) C: block-diagonal copies of C
        for p in range(n):
            for q in range(n):
                for s in range(n):
                    out[p * n + q, p * n + s] = c[q, s]
        # conj(C) (x) I: conj(C[p, s]) on the diagonal of block (p, s)
        for p in range(n):
            for s in range(n):
                for q in range(n):
                    out[p * n + q, s * n + q] = out[p * n + q, s * n + q] + c[p, s].conjugate()
    return result
