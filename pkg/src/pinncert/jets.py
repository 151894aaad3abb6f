"""Truncated multivariate Taylor jets.

A jet stores the normalized Taylor coefficients ``d^i f / i!`` of a function
for every multi-index ``i`` in a downward-closed index set. Truncating a
product to a downward-closed set is exact, so the usual total-degree sets and
cheaper "pure axis" sets like ``{1, t, tt, x, xx, xxx, xxxx}`` both give
correct partial derivatives. Coefficient arrays carry trailing batch axes, so
one jet object holds the expansions at many points at once.
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from ._backend import kernels

MAX_ORDER = 6
MAX_VARS = 3


def _grlex_key(idx):
    return (sum(idx), tuple(-k for k in idx))


class IndexSet:
    """Downward-closed set of multi-indices, sorted graded-lexicographically."""

    def __init__(self, indices: Iterable[Sequence[int]], nvars: int | None = None):
        idx = sorted({tuple(int(k) for k in i) for i in indices}, key=_grlex_key)
        if not idx:
            raise ValueError("empty index set")
        nv = len(idx[0]) if nvars is None else nvars
        if not 1 <= nv <= MAX_VARS:
            raise ValueError(f"jets support 1..{MAX_VARS} variables, got {nv}")
        if any(len(i) != nv or min(i) < 0 for i in idx):
            raise ValueError("multi-indices must be non-negative with a common length")
        pos = {i: n for n, i in enumerate(idx)}
        if idx[0] != (0,) * nv:
            raise ValueError("index set must contain the zero multi-index")
        for i in idx:
            for j in range(nv):
                if i[j] and i[:j] + (i[j] - 1,) + i[j + 1:] not in pos:
                    raise ValueError(f"index set is not downward closed at {i}")
        self.indices = tuple(idx)
        self.nvars = nv
        self.pos = pos
        self.degree = max(sum(i) for i in idx)
        if self.degree > MAX_ORDER:
            raise ValueError(f"jet order {self.degree} exceeds the cap {MAX_ORDER}")
        self.factorials = np.array([math.prod(math.factorial(k) for k in i) for i in idx], float)
        pairs = []
        for a, ia in enumerate(idx):
            for b, ib in enumerate(idx):
                c = pos.get(tuple(x + y for x, y in zip(ia, ib)))
                if c is not None:
                    pairs.append((c, a, b))
        pairs.sort()
        tab = np.array(pairs, dtype=np.intp).reshape(-1, 3)
        self.ic = np.ascontiguousarray(tab[:, 0])
        self.ia = np.ascontiguousarray(tab[:, 1])
        self.ib = np.ascontiguousarray(tab[:, 2])
        nz = self.ia != 0
        # pairs usable when the left factor has no constant term
        self.ia_nz = np.ascontiguousarray(self.ia[nz])
        self.ib_nz = np.ascontiguousarray(self.ib[nz])
        self.ic_nz = np.ascontiguousarray(self.ic[nz])
        # Horner stage k only needs outputs of degree <= K - k; the nz pairs
        # are sorted by output index (graded), so those form a prefix
        deg = np.array([sum(i) for i in idx], dtype=np.intp)
        self.nz_limits = np.array([int(np.sum(deg[self.ic_nz] <= d)) for d in range(self.degree + 1)],
                                  dtype=np.intp)

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, idx):
        return tuple(idx) in self.pos

    def __eq__(self, other):
        return isinstance(other, IndexSet) and self.indices == other.indices

    def __hash__(self):
        return hash(self.indices)

    def __repr__(self):
        return f"IndexSet(nvars={self.nvars}, size={len(self)}, degree={self.degree})"

    def unit(self, j: int) -> tuple:
        return tuple(int(k == j) for k in range(self.nvars))

    @property
    def npairs(self) -> int:
        return len(self.ia)

    @staticmethod
    @lru_cache(maxsize=None)
    def total(nvars: int, order: int) -> "IndexSet":
        """All multi-indices of total degree at most ``order``."""
        if order < 0:
            raise ValueError("order must be non-negative")
        if order > MAX_ORDER:
            raise ValueError(f"jet order {order} exceeds the cap {MAX_ORDER}")
        return IndexSet([i for i in product(range(order + 1), repeat=nvars) if sum(i) <= order], nvars)

    @staticmethod
    @lru_cache(maxsize=None)
    def axes(orders: tuple) -> "IndexSet":
        """Pure derivatives only: ``k * e_j`` for ``k <= orders[j]``."""
        nv = len(orders)
        idx = [(0,) * nv]
        for j, o in enumerate(orders):
            idx += [tuple(k if i == j else 0 for i in range(nv)) for k in range(1, o + 1)]
        return IndexSet(idx, nv)

    @staticmethod
    def closure(generators: Iterable[Sequence[int]], nvars: int) -> "IndexSet":
        """Smallest downward-closed set containing the generators."""
        gens = {tuple(g) for g in generators} | {(0,) * nvars}
        return _closure(frozenset(gens), nvars)


@lru_cache(maxsize=None)
def _closure(gens: frozenset, nvars: int) -> IndexSet:
    out = set()
    for g in gens:
        out.update(product(*[range(k + 1) for k in g]))
    return IndexSet(out, nvars)


def multi_index(spec: str | Sequence[int], names: Sequence[str]) -> tuple:
    """``"txx"`` with names ``("t", "x")`` -> ``(1, 2)``. Tuples pass through."""
    if isinstance(spec, str):
        bad = set(spec) - set(names)
        if bad:
            raise ValueError(f"unknown variables {sorted(bad)} in derivative {spec!r}")
        return tuple(spec.count(n) for n in names)
    return tuple(spec)


def _pair(x):
    return np.ascontiguousarray(x, dtype=float).reshape(x.shape[0], -1)


class Jet:
    """Batched truncated Taylor expansion over an :class:`IndexSet`.

    ``c`` has shape ``(len(iset), *shape)``; ``c[k]`` is the normalized
    coefficient for ``iset.indices[k]``.
    """

    __slots__ = ("iset", "c")
    __array_ufunc__ = None  # make ndarray defer to our reflected operators

    def __init__(self, iset: IndexSet, coeffs):
        c = np.asarray(coeffs, dtype=float)
        if c.shape[:1] != (len(iset),):
            raise ValueError(f"coefficient array has leading size {c.shape[:1]}, expected {len(iset)}")
        self.iset = iset
        self.c = c

    # construction
    @classmethod
    def constant(cls, iset: IndexSet, value) -> "Jet":
        v = np.asarray(value, dtype=float)
        c = np.zeros((len(iset),) + v.shape)
        c[0] = v
        return cls(iset, c)

    @classmethod
    def variable(cls, iset: IndexSet, j: int, value) -> "Jet":
        """Jet of the coordinate function ``x_j`` expanded at ``value``."""
        jet = cls.constant(iset, value)
        u = iset.unit(j)
        if u in iset.pos:
            jet.c[iset.pos[u]] = 1.0
        return jet

    @classmethod
    def variables(cls, iset: IndexSet, points) -> list:
        """One variable jet per column of ``points`` (shape (n, nvars))."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != iset.nvars:
            raise ValueError(f"points must have shape (n, {iset.nvars})")
        return [cls.variable(iset, j, pts[:, j]) for j in range(iset.nvars)]

    # access
    @property
    def shape(self):
        return self.c.shape[1:]

    @property
    def order(self) -> int:
        return self.iset.degree

    @property
    def nvars(self) -> int:
        return self.iset.nvars

    @property
    def value(self) -> np.ndarray:
        return self.c[0]

    def partial(self, idx) -> np.ndarray:
        """The partial derivative ``d^idx f`` (not the normalized coefficient)."""
        idx = tuple(idx)
        k = self.iset.pos.get(idx)
        if k is None:
            raise KeyError(f"multi-index {idx} is not in the index set")
        return self.c[k] * self.iset.factorials[k]

    @property
    def coeffs(self) -> dict:
        """Mapping multi-index -> partial derivative array."""
        return {i: self.partial(i) for i in self.iset.indices}

    def shift(self, idx, target: IndexSet) -> "Jet":
        """Jet of the derivative ``d^idx f`` truncated to ``target``."""
        idx = tuple(idx)
        src = self.iset
        out = np.empty((len(target),) + self.shape)
        for k, kap in enumerate(target.indices):
            s = tuple(a + b for a, b in zip(idx, kap))
            if s not in src.pos:
                raise ValueError(f"shift needs {s}, which the index set lacks")
            m = src.pos[s]
            out[k] = self.c[m] * (src.factorials[m] / target.factorials[k])
        return Jet(target, out)

    def restrict(self, target: IndexSet) -> "Jet":
        return self.shift((0,) * self.nvars, target)

    # arithmetic
    def _check(self, other: "Jet"):
        if other.iset is not self.iset and other.iset != self.iset:
            raise ValueError("jets use different index sets")

    def _lift(self, other):
        if isinstance(other, Jet):
            self._check(other)
            return other
        return None

    def __neg__(self):
        return Jet(self.iset, -self.c)

    def __pos__(self):
        return self

    def __add__(self, other):
        o = self._lift(other)
        if o is not None:
            return Jet(self.iset, self.c + o.c)
        shape = np.broadcast_shapes(self.shape, np.shape(other))
        c = np.broadcast_to(self.c, (len(self.iset),) + shape).copy()
        c[0] = c[0] + other
        return Jet(self.iset, c)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return Jet(self.iset, self.c * np.asarray(other, dtype=float))
        shape = np.broadcast_shapes(self.shape, o.shape)
        nc = len(self.iset)
        a = _pair(np.broadcast_to(self.c, (nc,) + shape))
        b = _pair(np.broadcast_to(o.c, (nc,) + shape))
        out = np.zeros_like(a)
        s = self.iset
        kernels.mul(a, b, s.ia, s.ib, s.ic, out)
        return Jet(s, out.reshape((nc,) + shape))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other ** -1.0
        return Jet(self.iset, self.c / np.asarray(other, dtype=float))

    def __rtruediv__(self, other):
        return (self ** -1.0) * other

    def __pow__(self, e):
        if float(e).is_integer() and e >= 0:
            out = Jet.constant(self.iset, np.ones(self.shape))
            base, n = self, int(e)
            while n:
                if n & 1:
                    out = out * base
                n >>= 1
                if n:
                    base = base * base
            return out
        return compose(self, _power_coeffs(self.value, float(e), self.order))

    def __repr__(self):
        return f"Jet({self.iset!r}, shape={self.shape})"


def compose(u: Jet, ck: np.ndarray) -> Jet:
    """Evaluate ``sum_k ck[k] * (u - u0)**k``; ck has shape (K+1, *u.shape)."""
    s = u.iset
    nc = len(s)
    delta = _pair(u.c).copy()
    delta[0] = 0.0
    ck2 = np.ascontiguousarray(np.broadcast_to(ck, (ck.shape[0],) + u.shape), dtype=float).reshape(ck.shape[0], -1)
    out = np.empty_like(delta)
    kernels.compose_apply(delta, ck2, s.ia_nz, s.ib_nz, s.ic_nz, s.nz_limits, out)
    return Jet(s, out.reshape((nc,) + u.shape))


# Taylor coefficients f^(k)(u0)/k! of the elementary functions


def tanh_coeffs(u0: np.ndarray, K: int) -> np.ndarray:
    """Taylor coefficients a_k of tanh(u0 + s) from (k+1) a_{k+1} = [k=0] - sum_i a_i a_{k-i}."""
    out = np.empty((K + 1,) + np.shape(u0))
    out[0] = np.tanh(u0)
    for k in range(K):
        acc = np.zeros(np.shape(u0))
        for i in range((k + 1) // 2):
            acc += out[i] * out[k - i]
        acc *= 2.0
        if k % 2 == 0:
            acc += out[k // 2] * out[k // 2]
        if k == 0:
            acc = 1.0 - acc
        else:
            acc = -acc
        out[k + 1] = acc / (k + 1)
    return out


def _sin_coeffs(u0, K, phase=0):
    s, c = np.sin(u0), np.cos(u0)
    cyc = (s, c, -s, -c)
    return np.stack([cyc[(k + phase) % 4] / math.factorial(k) for k in range(K + 1)])


def _exp_coeffs(u0, K):
    e = np.exp(u0)
    return np.stack([e / math.factorial(k) for k in range(K + 1)])


def _log_coeffs(u0, K):
    if np.any(u0 <= 0):
        raise ValueError("log of a jet with non-positive value")
    out = [np.log(u0)]
    for k in range(1, K + 1):
        out.append((-1) ** (k + 1) / (k * u0 ** k))
    return np.stack(out)


def _power_coeffs(u0, a, K):
    if np.any(u0 <= 0) and a != int(a):
        raise ValueError("non-integer power of a jet with non-positive value")
    if np.any(u0 == 0):
        raise ValueError("non-integer power of a jet with zero value")
    out = []
    binom = 1.0
    for k in range(K + 1):
        out.append(binom * u0 ** (a - k))
        binom *= (a - k) / (k + 1)
    return np.stack(out)


def _unary(u, fn, coeffs):
    if isinstance(u, Jet):
        return compose(u, coeffs(u.value, u.order))
    return fn(u)


def tanh(u):
    return _unary(u, np.tanh, tanh_coeffs)


def sin(u):
    return _unary(u, np.sin, _sin_coeffs)


def cos(u):
    return _unary(u, np.cos, lambda u0, K: _sin_coeffs(u0, K, 1))


def exp(u):
    return _unary(u, np.exp, _exp_coeffs)


def log(u):
    return _unary(u, np.log, _log_coeffs)


def sqrt(u):
    return _unary(u, np.sqrt, lambda u0, K: _power_coeffs(u0, 0.5, K))


def sech2(u):
    t = tanh(u)
    return 1.0 - t * t


def sign(u):
    """Sign of the value; a constant jet (zero derivatives) for jets."""
    if isinstance(u, Jet):
        return np.sign(u.value)
    return np.sign(u)


def abs(u):  # noqa: A001 - mirrors the numpy name on purpose
    """|u|; for jets this is sgn(u0) * u and requires u0 != 0."""
    if isinstance(u, Jet):
        s = np.sign(u.value)
        if np.any(s == 0):
            raise ValueError("abs of a jet is not differentiable where the value is 0")
        return u * s
    return np.abs(u)
