"""Closed-form constants: Poincare, Bramble-Hilbert, network size bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


def poincare_const(p: float) -> float:
    """Sharp 1D Poincare constant pi_p for the J_p projection (diameter 1)."""
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if p == 1:
        return 0.5
    if p < 2:
        return math.pi ** (2.0 / p - 2.0) * 2.0 ** (1.0 - 2.0 / p)
    return p * math.sin(math.pi / p) / (2.0 * math.pi * (p - 1.0) ** (1.0 / p))


def bramble_hilbert_const(sigma: int, nu: int, p: float, m: int) -> float:
    """Constant in the Bramble-Hilbert estimate on a convex domain.

    For ``sigma - nu > 20`` everything is evaluated in log space.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if nu < 0 or sigma < nu:
        raise ValueError("need 0 <= nu <= sigma")
    if not p >= 1:
        raise ValueError("p must be >= 1")
    d = sigma - nu
    pp = poincare_const(p)
    if d > 20:
        lg = (d * math.log(pp)
              + (math.lgamma(m + nu) - math.lgamma(nu + 1) - math.lgamma(m)) / p
              + math.lgamma(d + 1) / p
              - m / p * math.lgamma(math.ceil(d / m) + 1))
        return math.exp(lg)
    return (pp ** d * math.comb(m + nu - 1, nu) ** (1.0 / p) * math.factorial(d) ** (1.0 / p)
            / math.factorial(math.ceil(d / m)) ** (m / p))


def jp_projection(samples, p: float, tol: float = 1e-10) -> float:
    """The scalar s minimizing sum |y_i - s|**p: the mean for p < 2, bisection otherwise."""
    y = np.asarray(samples, dtype=float).ravel()
    if y.size == 0:
        raise ValueError("no samples")
    if not p >= 1:
        raise ValueError("p must be >= 1")
    if p < 2:
        return float(np.mean(y))
    lo, hi = float(y.min()), float(y.max())
    if lo == hi:
        return lo

    def g(s):
        d = y - s
        return np.sum(np.abs(d) ** (p - 2) * d)

    # g is non-increasing in s, g(lo) >= 0 >= g(hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        gm = g(mid)
        if gm == 0:
            return mid
        if gm > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class SizeBounds:
    width1: int
    width2: int
    weight_exponent: float
    rates: dict  # nu -> (power of N, power of log N)


def tanh_size_bounds(sigma: int, m: int, box: Sequence, N: int) -> SizeBounds:
    """Width and weight-growth bounds for a two-hidden-layer tanh approximant."""
    if sigma < 3:
        raise ValueError("sigma must be >= 3")
    if m < 2:
        raise ValueError("m must be >= 2")
    if N <= 5:
        raise ValueError("N must be > 5")
    box = [(float(a), float(b)) for a, b in box]
    if len(box) != m:
        raise ValueError(f"box must have {m} sides")
    for a, b in box:
        if not (a.is_integer() and b.is_integer() and b > a):
            raise ValueError("box corners must be integers with b > a")
    L = [int(b - a) for a, b in box]
    w1 = 3 * math.ceil(sigma / 2) * math.comb(sigma + m - 1, m + 1) + sum(l * (N - 1) for l in L)
    w2 = 3 * math.ceil((m + 2) / 2) * math.comb(2 * m + 1, m + 1) * N ** m * math.prod(L)
    wexp = max(sigma * sigma / 2.0, m * (1 + sigma / 2.0 + m / 2.0))
    rates = {nu: (-sigma + nu, nu) for nu in (0, 1, 2)}
    return SizeBounds(w1, w2, wexp, rates)


def aux_lemma_consts(lemma_id: str, **params) -> float:
    """Constants of the auxiliary one-dimensional estimates.

    ``poincare_gradient``: 2**(p-2) (b-a)**p, ``poincare_boundary``: (b-a)/2,
    ``trace``: 2**((p-1)/p) / L**(1/p) * max(1, L), ``pc2``: p**2.
    """
    p = float(params.get("p", 2.0))
    if lemma_id == "poincare_gradient":
        L = _length(params)
        if p < 1:
            raise ValueError("p must be >= 1")
        return 2.0 ** (p - 2.0) * L ** p
    if lemma_id == "poincare_boundary":
        return _length(params) / 2.0
    if lemma_id == "trace":
        L = _length(params)
        if p < 1:
            raise ValueError("p must be >= 1")
        return 2.0 ** ((p - 1.0) / p) / L ** (1.0 / p) * max(1.0, L)
    if lemma_id == "pc2":
        if p < 2:
            raise ValueError("p must be >= 2")
        return p * p
    raise ValueError(f"unknown lemma id {lemma_id!r}")


def _length(params) -> float:
    if "L" in params:
        L = float(params["L"])
    else:
        L = float(params["b"]) - float(params["a"])
    if L <= 0:
        raise ValueError("interval length must be positive")
    return L
