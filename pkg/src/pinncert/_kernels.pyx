# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled jet kernels. Same contracts as ``_kernels_py``."""

from libc.stdlib cimport malloc, free
from libc.string cimport memset

cdef Py_ssize_t CHUNK = 512


cdef inline Py_ssize_t _stage(const Py_ssize_t[::1] lim, Py_ssize_t K, Py_ssize_t k) noexcept nogil:
    cdef Py_ssize_t d = K - k
    if d > lim.shape[0] - 1:
        d = lim.shape[0] - 1
    return lim[d]


def mul(const double[:, ::1] a, const double[:, ::1] b, const Py_ssize_t[::1] ia,
        const Py_ssize_t[::1] ib, const Py_ssize_t[::1] ic, double[:, ::1] out):
    cdef Py_ssize_t n = a.shape[1], npair = ia.shape[0]
    cdef Py_ssize_t s, e, p, j
    cdef const double *pa
    cdef const double *pb
    cdef double *po
    cdef Py_ssize_t ch, nch = (n + CHUNK - 1) // CHUNK
    with nogil:
        for ch in range(nch):
            s = ch * CHUNK
            e = s + CHUNK if s + CHUNK < n else n
            for p in range(npair):
                pa = &a[ia[p], 0]
                pb = &b[ib[p], 0]
                po = &out[ic[p], 0]
                for j in range(s, e):
                    po[j] += pa[j] * pb[j]


def mul_adjoint(const double[:, ::1] g, const double[:, ::1] a, const double[:, ::1] b,
                const Py_ssize_t[::1] ia, const Py_ssize_t[::1] ib, const Py_ssize_t[::1] ic,
                double[:, ::1] ga, double[:, ::1] gb):
    cdef Py_ssize_t n = a.shape[1], npair = ia.shape[0]
    cdef Py_ssize_t s, e, p, j
    cdef const double *pg
    cdef const double *pa
    cdef const double *pb
    cdef double *qa
    cdef double *qb
    cdef Py_ssize_t ch, nch = (n + CHUNK - 1) // CHUNK
    with nogil:
        for ch in range(nch):
            s = ch * CHUNK
            e = s + CHUNK if s + CHUNK < n else n
            for p in range(npair):
                pg = &g[ic[p], 0]
                pa = &a[ia[p], 0]
                pb = &b[ib[p], 0]
                qa = &ga[ia[p], 0]
                qb = &gb[ib[p], 0]
                for j in range(s, e):
                    qa[j] += pg[j] * pb[j]
                    qb[j] += pg[j] * pa[j]


def compose_apply(const double[:, ::1] delta, const double[:, ::1] ck, const Py_ssize_t[::1] ia,
                  const Py_ssize_t[::1] ib, const Py_ssize_t[::1] ic, const Py_ssize_t[::1] lim,
                  double[:, ::1] out):
    cdef Py_ssize_t nc = delta.shape[0], n = delta.shape[1]
    cdef Py_ssize_t K = ck.shape[0] - 1
    cdef Py_ssize_t s, e, w, p, j, k, c
    cdef double *r = <double *> malloc(nc * CHUNK * sizeof(double))
    cdef double *q = <double *> malloc(nc * CHUNK * sizeof(double))
    cdef double *t
    cdef const double *pd
    cdef double *pr
    cdef double *pq
    if r == NULL or q == NULL:
        free(r)
        free(q)
        raise MemoryError()
    cdef Py_ssize_t ch, nch = (n + CHUNK - 1) // CHUNK
    with nogil:
        for ch in range(nch):
            s = ch * CHUNK
            e = s + CHUNK if s + CHUNK < n else n
            w = e - s
            memset(r, 0, nc * CHUNK * sizeof(double))
            for j in range(w):
                r[j] = ck[K, s + j]
            for k in range(K - 1, -1, -1):
                memset(q, 0, nc * CHUNK * sizeof(double))
                for p in range(_stage(lim, K, k)):
                    pd = &delta[ia[p], s]
                    pr = r + ib[p] * CHUNK
                    pq = q + ic[p] * CHUNK
                    for j in range(w):
                        pq[j] += pd[j] * pr[j]
                for j in range(w):
                    q[j] += ck[k, s + j]
                t = r
                r = q
                q = t
            for c in range(nc):
                for j in range(w):
                    out[c, s + j] = r[c * CHUNK + j]
    free(r)
    free(q)


def compose_forward(const double[:, ::1] delta, const double[:, ::1] ck, const Py_ssize_t[::1] ia,
                    const Py_ssize_t[::1] ib, const Py_ssize_t[::1] ic, const Py_ssize_t[::1] lim,
                    double[:, :, ::1] R):
    cdef Py_ssize_t nc = delta.shape[0], n = delta.shape[1]
    cdef Py_ssize_t K = ck.shape[0] - 1
    cdef Py_ssize_t s, e, p, j, k, c
    cdef const double *pd
    cdef double *pr
    cdef double *pq
    cdef Py_ssize_t ch, nch = (n + CHUNK - 1) // CHUNK
    with nogil:
        for ch in range(nch):
            s = ch * CHUNK
            e = s + CHUNK if s + CHUNK < n else n
            for c in range(nc):
                for j in range(s, e):
                    R[K, c, j] = 0.0
            for j in range(s, e):
                R[K, 0, j] = ck[K, j]
            for k in range(K - 1, -1, -1):
                for c in range(nc):
                    for j in range(s, e):
                        R[k, c, j] = 0.0
                for p in range(_stage(lim, K, k)):
                    pd = &delta[ia[p], 0]
                    pr = &R[k + 1, ib[p], 0]
                    pq = &R[k, ic[p], 0]
                    for j in range(s, e):
                        pq[j] += pd[j] * pr[j]
                for j in range(s, e):
                    R[k, 0, j] += ck[k, j]


def compose_backward(const double[:, ::1] gv, const double[:, ::1] delta, const double[:, :, ::1] R,
                     const Py_ssize_t[::1] ia, const Py_ssize_t[::1] ib, const Py_ssize_t[::1] ic,
                     const Py_ssize_t[::1] lim, double[:, ::1] gdelta, double[:, ::1] gck):
    cdef Py_ssize_t nc = delta.shape[0], n = delta.shape[1]
    cdef Py_ssize_t K = R.shape[0] - 1
    cdef Py_ssize_t s, e, w, p, j, k, c
    cdef double *g = <double *> malloc(nc * CHUNK * sizeof(double))
    cdef double *h = <double *> malloc(nc * CHUNK * sizeof(double))
    cdef double *t
    cdef double *pg
    cdef double *ph
    cdef const double *pd
    cdef const double *pr
    cdef double *qd
    if g == NULL or h == NULL:
        free(g)
        free(h)
        raise MemoryError()
    cdef Py_ssize_t ch, nch = (n + CHUNK - 1) // CHUNK
    with nogil:
        for ch in range(nch):
            s = ch * CHUNK
            e = s + CHUNK if s + CHUNK < n else n
            w = e - s
            for c in range(nc):
                for j in range(w):
                    g[c * CHUNK + j] = gv[c, s + j]
            for k in range(K):
                for j in range(w):
                    gck[k, s + j] = g[j]
                memset(h, 0, nc * CHUNK * sizeof(double))
                for p in range(_stage(lim, K, k)):
                    pg = g + ic[p] * CHUNK
                    ph = h + ib[p] * CHUNK
                    pd = &delta[ia[p], s]
                    pr = &R[k + 1, ib[p], s]
                    qd = &gdelta[ia[p], s]
                    for j in range(w):
                        qd[j] += pg[j] * pr[j]
                        ph[j] += pg[j] * pd[j]
                t = g
                g = h
                h = t
            for j in range(w):
                gck[K, s + j] = g[j]
    free(g)
    free(h)
