# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, cos, sin, M_PI

cnp.import_array()

ctypedef double complex cplx


cdef inline double cabs(cplx z) nogil:
    return (z.real * z.real + z.imag * z.imag) ** 0.5


cdef void matmul(const cplx[:, :] A, const cplx[:, :] B, cplx[:, :] out, int n) nogil:
    cdef int i, j, k
    cdef cplx acc
    for i in range(n):
        for j in range(n):
            acc = 0
            for k in range(n):
                acc = acc + A[i, k] * B[k, j]
            out[i, j] = acc


def word_product(mats, slots):
    cdef const cplx[:, :, :, :] m = np.ascontiguousarray(mats, dtype=np.complex128)
    cdef const long[:] sl = np.ascontiguousarray(slots, dtype=np.int_)
    cdef int B = m.shape[0], n = m.shape[2], L = sl.shape[0]
    out_arr = np.zeros((B, n, n), dtype=np.complex128)
    tmp_arr = np.zeros((n, n), dtype=np.complex128)
    cdef cplx[:, :, :] out = out_arr
    cdef cplx[:, :] tmp = tmp_arr
    cdef int b, t, i, j, k, s
    cdef cplx acc
    with nogil:
        for b in range(B):
            for i in range(n):
                out[b, i, i] = 1
            for t in range(L):
                s = sl[t]
                for i in range(n):
                    for j in range(n):
                        acc = 0
                        for k in range(n):
                            acc = acc + out[b, i, k] * m[b, s, k, j]
                        tmp[i, j] = acc
                for i in range(n):
                    for j in range(n):
                        out[b, i, j] = tmp[i, j]
    return out_arr


def lattice_min(u, w, long N):
    cdef const double[:] uu = np.ascontiguousarray(u, dtype=np.float64)
    cdef const double[:] ww = np.ascontiguousarray(w, dtype=np.float64)
    cdef int d = uu.shape[0], k
    cdef long p, q, bp = 0, bq = 0
    cdef double best = 1e308, v, x
    with nogil:
        for p in range(-N, N + 1):
            for q in range(-N, N + 1):
                if p == 0 and q == 0:
                    continue
                v = 0
                for k in range(d):
                    x = fabs(p * uu[k] + q * ww[k])
                    if x > v:
                        v = x
                if v < best:
                    best = v
                    bp = p
                    bq = q
    return float(best), int(bp), int(bq)


def commuting_words(mats, inverse_slot, M, Minv, int max_len, double tol, forbid_first, forbid_last):
    cdef const cplx[:, :, :] m = np.ascontiguousarray(mats, dtype=np.complex128)
    cdef const long[:] inv = np.ascontiguousarray(inverse_slot, dtype=np.int_)
    cdef const cplx[:, :] Mm = np.ascontiguousarray(M, dtype=np.complex128)
    cdef const cplx[:, :] Mi = np.ascontiguousarray(Minv, dtype=np.complex128)
    cdef const cnp.uint8_t[:] ff = np.ascontiguousarray(forbid_first, dtype=np.uint8)
    cdef const cnp.uint8_t[:] fl = np.ascontiguousarray(forbid_last, dtype=np.uint8)
    cdef int S = m.shape[0], n = m.shape[1]
    cdef cplx[:, :, :] pre = np.zeros((max_len + 1, n, n), dtype=np.complex128)
    cdef cplx[:, :, :] prei = np.zeros((max_len + 1, n, n), dtype=np.complex128)
    cdef cplx[:, :] t1 = np.zeros((n, n), dtype=np.complex128)
    cdef cplx[:, :] t2 = np.zeros((n, n), dtype=np.complex128)
    cdef long[:] word = np.zeros(max_len + 1, dtype=np.int_)
    cdef long[:] nxt = np.zeros(max_len + 2, dtype=np.int_)
    cdef cplx[:] roots = np.exp(2j * np.pi * np.arange(n) / n)
    cdef int depth, i, j, s, r
    cdef double dist, best, wmax, wimax, scale, e
    found = []
    for i in range(n):
        pre[0, i, i] = 1
        prei[0, i, i] = 1
    depth = 0
    nxt[0] = 0
    while depth >= 0:
        s = nxt[depth]
        if depth == max_len or s >= S:
            depth -= 1
            continue
        nxt[depth] = s + 1
        if depth == 0 and ff[s]:
            continue
        if depth > 0 and inv[s] == word[depth - 1]:
            continue
        word[depth] = s
        matmul(pre[depth], m[s], pre[depth + 1], n)
        matmul(m[inv[s]], prei[depth], prei[depth + 1], n)
        depth += 1
        nxt[depth] = 0
        if not fl[s]:
            # C = W M W^-1 M^-1
            matmul(pre[depth], Mm, t1, n)
            matmul(t1, prei[depth], t2, n)
            matmul(t2, Mi, t1, n)
            wmax = 0
            wimax = 0
            for i in range(n):
                for j in range(n):
                    e = cabs(pre[depth, i, j])
                    if e > wmax:
                        wmax = e
                    e = cabs(prei[depth, i, j])
                    if e > wimax:
                        wimax = e
            scale = 1.0 + wmax * wimax
            best = 1e308
            for r in range(n):
                dist = 0
                for i in range(n):
                    for j in range(n):
                        e = cabs(roots[r] * t1[i, j] - (1.0 if i == j else 0.0))
                        if e > dist:
                            dist = e
                if dist < best:
                    best = dist
            if best < tol * scale:
                found.append(tuple(int(word[i]) for i in range(depth)))
    return found
