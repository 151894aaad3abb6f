"""Pure numpy versions of the jet kernels.

Every function works on 2D float64 arrays of shape ``(ncoef, n)`` where the
second axis runs over evaluation points. The pair tables ``ia, ib, ic`` list
every ``(i, j)`` with ``index[i] + index[j] == index[ic]`` in the set.
Results are accumulated into caller-provided output arrays.

The Horner kernels also take ``lim``: stage k (counted from the constant
term) only uses the first ``lim[min(K - k, len(lim) - 1)]`` pairs.
"""

import numpy as np


def mul(a, b, ia, ib, ic, out):
    """out[ic] += a[ia] * b[ib] over all pairs."""
    tmp = np.empty(a.shape[1])
    for p in range(len(ia)):
        np.multiply(a[ia[p]], b[ib[p]], out=tmp)
        out[ic[p]] += tmp


def mul_adjoint(g, a, b, ia, ib, ic, ga, gb):
    """Accumulate the vector-Jacobian product of ``mul`` into ga and gb."""
    tmp = np.empty(a.shape[1])
    for p in range(len(ia)):
        np.multiply(g[ic[p]], b[ib[p]], out=tmp)
        ga[ia[p]] += tmp
        np.multiply(g[ic[p]], a[ia[p]], out=tmp)
        gb[ib[p]] += tmp


def _stage(lim, K, k):
    return lim[min(K - k, len(lim) - 1)]


def compose_apply(delta, ck, ia, ib, ic, lim, out):
    """Horner evaluation of sum_k ck[k] * delta**k, written into out.

    ``delta`` must have a zero constant row; the tables should already skip
    pairs with ``ia == 0``.
    """
    K = ck.shape[0] - 1
    nc, n = delta.shape
    r = np.zeros((nc, n))
    r[0] = ck[K]
    nxt = np.empty((nc, n))
    tmp = np.empty(n)
    for k in range(K - 1, -1, -1):
        nxt.fill(0.0)
        for p in range(_stage(lim, K, k)):
            np.multiply(delta[ia[p]], r[ib[p]], out=tmp)
            nxt[ic[p]] += tmp
        nxt[0] += ck[k]
        r, nxt = nxt, r
    out[...] = r


def compose_forward(delta, ck, ia, ib, ic, lim, R):
    """Like compose_apply but keeps every Horner stage in R[k] (shape (K+1, nc, n))."""
    K = ck.shape[0] - 1
    n = delta.shape[1]
    R.fill(0.0)
    R[K, 0] = ck[K]
    tmp = np.empty(n)
    for k in range(K - 1, -1, -1):
        rk, rk1 = R[k], R[k + 1]
        for p in range(_stage(lim, K, k)):
            np.multiply(delta[ia[p]], rk1[ib[p]], out=tmp)
            rk[ic[p]] += tmp
        rk[0] += ck[k]


def compose_backward(gv, delta, R, ia, ib, ic, lim, gdelta, gck):
    """Reverse Horner. Accumulates into gdelta (nc, n) and writes gck (K+1, n)."""
    K = R.shape[0] - 1
    nc, n = delta.shape
    g = gv.copy()
    gnext = np.empty((nc, n))
    tmp = np.empty(n)
    for k in range(K):
        gck[k] = g[0]
        gnext.fill(0.0)
        rk1 = R[k + 1]
        for p in range(_stage(lim, K, k)):
            gi = g[ic[p]]
            np.multiply(gi, rk1[ib[p]], out=tmp)
            gdelta[ia[p]] += tmp
            np.multiply(gi, delta[ia[p]], out=tmp)
            gnext[ib[p]] += tmp
        g, gnext = gnext, g
    gck[K] = g[0]
