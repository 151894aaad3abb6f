"""A small reverse-mode tape over numpy arrays.

The tape only knows the handful of operations a PINN loss needs: affine maps
and tanh on jet arrays (shape ``(ncoef, batch, width)``), extraction of one
partial derivative, elementwise arithmetic and the p-powered sum that closes
a midpoint training error.
"""

from __future__ import annotations

import numpy as np

from ._backend import kernels
from .jets import IndexSet, tanh_coeffs


class PoisonedGradient(FloatingPointError):
    """Raised when a loss evaluates to a non-finite value."""


class Node:
    __slots__ = ("tape", "index", "value", "saved", "name", "parents", "fwd", "bwd", "needs_grad")
    __array_ufunc__ = None

    def __init__(self, tape, name, value, parents=(), fwd=None, bwd=None, saved=None, needs_grad=False):
        self.tape = tape
        self.index = len(tape.nodes)
        self.name = name
        self.value = value
        self.saved = saved
        self.parents = parents
        self.fwd = fwd
        self.bwd = bwd
        self.needs_grad = needs_grad

    def __repr__(self):
        return f"Node({self.index}, {self.name}, shape={np.shape(self.value)})"

    def __add__(self, o):
        return add(self, o)

    __radd__ = __add__

    def __sub__(self, o):
        return add(self, -o if not isinstance(o, Node) else neg(o))

    def __rsub__(self, o):
        return add(neg(self), o)

    def __neg__(self):
        return neg(self)

    def __mul__(self, o):
        return mul(self, o)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not float(n).is_integer() or n < 1:
            raise ValueError("tape nodes support positive integer powers only")
        out = self
        for _ in range(int(n) - 1):
            out = mul(out, self)
        return out


class Tape:
    def __init__(self):
        self.nodes: list[Node] = []

    def leaf(self, value, name="const", param=False) -> Node:
        n = Node(self, name, np.asarray(value, dtype=float), needs_grad=param)
        self.nodes.append(n)
        return n

    def push(self, name, fwd, bwd, parents) -> Node:
        vals = [p.value for p in parents]
        value, saved = fwd(*vals)
        n = Node(self, name, value, tuple(parents), fwd, bwd, saved,
                 needs_grad=any(p.needs_grad for p in parents))
        self.nodes.append(n)
        return n

    def backward(self, out: Node) -> list:
        """Gradients of the scalar ``out`` for every node (None where unused)."""
        grads: list = [None] * len(self.nodes)
        grads[out.index] = np.ones_like(out.value)
        for node in reversed(self.nodes[: out.index + 1]):
            g = grads[node.index]
            if g is None or node.bwd is None:
                continue
            need = tuple(p.needs_grad for p in node.parents)
            gs = node.bwd(g, node.saved, need, *[p.value for p in node.parents])
            for p, gp in zip(node.parents, gs):
                if gp is None or not p.needs_grad:
                    continue
                if grads[p.index] is None:
                    grads[p.index] = gp
                else:
                    grads[p.index] = grads[p.index] + gp
        return grads

    def first_nonfinite(self) -> Node | None:
        for n in self.nodes:
            if not np.all(np.isfinite(n.value)):
                return n
        return None

    def replay(self) -> list:
        """Recompute every node from the leaves; returns the new values."""
        vals = []
        for n in self.nodes:
            if n.fwd is None:
                vals.append(n.value)
            else:
                v, _ = n.fwd(*[vals[p.index] for p in n.parents])
                vals.append(v)
        return vals


def _tape_of(*xs):
    for x in xs:
        if isinstance(x, Node):
            return x.tape
    raise TypeError("at least one operand must be a tape node")


def _unbroadcast(g, shape):
    if g.shape == shape:
        return g
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for ax, n in enumerate(shape):
        if n == 1 and g.shape[ax] != 1:
            g = g.sum(axis=ax, keepdims=True)
    return g


def add(a, b) -> Node:
    if not isinstance(a, Node):
        a, b = b, a
    if isinstance(b, Node):
        return a.tape.push(
            "add",
            lambda x, y: (x + y, None),
            lambda g, s, need, x, y: (_unbroadcast(g, x.shape), _unbroadcast(g, y.shape)),
            (a, b),
        )
    c = np.asarray(b, dtype=float)
    return a.tape.push("add_const", lambda x: (x + c, None),
                       lambda g, s, need, x: (_unbroadcast(g, x.shape),), (a,))


def neg(a: Node) -> Node:
    return a.tape.push("neg", lambda x: (-x, None), lambda g, s, need, x: (-g,), (a,))


def mul(a, b) -> Node:
    if not isinstance(a, Node):
        a, b = b, a
    if isinstance(b, Node):
        return a.tape.push(
            "mul",
            lambda x, y: (x * y, None),
            lambda g, s, need, x, y: (
                _unbroadcast(g * y, x.shape) if need[0] else None,
                _unbroadcast(g * x, y.shape) if need[1] else None,
            ),
            (a, b),
        )
    c = np.asarray(b, dtype=float)
    return a.tape.push("scale", lambda x: (x * c, None),
                       lambda g, s, need, x: (_unbroadcast(g * c, x.shape),), (a,))


def affine_jet(h: Node, W: Node, b: Node) -> Node:
    """Apply ``z = W h + b`` to every jet coefficient (b only hits the value)."""

    def fwd(hv, Wv, bv):
        z = hv @ Wv.T
        z[0] += bv
        return z, None

    def bwd(g, s, need, hv, Wv, bv):
        gh = g @ Wv if need[0] else None
        gW = g.reshape(-1, g.shape[-1]).T @ hv.reshape(-1, hv.shape[-1]) if need[1] else None
        gb = g[0].sum(axis=0) if need[2] else None
        return gh, gW, gb

    return h.tape.push("affine_jet", fwd, bwd, (h, W, b))


def tanh_jet(z: Node, iset: IndexSet) -> Node:
    """tanh of a jet array by Horner composition with stored stages."""
    K = iset.degree
    nc = len(iset)

    def fwd(zv):
        shape = zv.shape
        flat = zv.reshape(nc, -1)
        ck = tanh_coeffs(flat[0], K + 1)
        delta = np.array(flat)
        delta[0] = 0.0
        R = np.empty((K + 1,) + delta.shape)
        ckK = np.ascontiguousarray(ck[: K + 1])
        kernels.compose_forward(delta, ckK, iset.ia_nz, iset.ib_nz, iset.ic_nz, iset.nz_limits, R)
        return R[0].reshape(shape), (delta, ck, R)

    def bwd(g, saved, need, zv):
        delta, ck, R = saved
        g2 = np.ascontiguousarray(g.reshape(nc, -1))
        gdelta = np.zeros_like(delta)
        gck = np.empty((K + 1, delta.shape[1]))
        kernels.compose_backward(g2, delta, R, iset.ia_nz, iset.ib_nz, iset.ic_nz, iset.nz_limits, gdelta, gck)
        k = np.arange(1, K + 2).reshape(-1, 1)
        gdelta[0] = np.sum(gck * k * ck[1:], axis=0)
        return (gdelta.reshape(zv.shape),)

    return z.tape.push("tanh_jet", fwd, bwd, (z,))


def coeff(jet: Node, pos: int, factor: float, k: int) -> Node:
    """Partial derivative array ``factor * jet[pos, :, k]``."""

    def fwd(jv):
        return jv[pos, :, k] * factor, None

    def bwd(g, s, need, jv):
        out = np.zeros_like(jv)
        out[pos, :, k] = g * factor
        return (out,)

    return jet.tape.push(f"coeff[{pos},{k}]", fwd, bwd, (jet,))


def lp_sum(r, p: float, weight: float) -> Node:
    """``weight * sum |r|**p`` as a scalar node."""
    if not isinstance(r, Node):
        raise TypeError("lp_sum expects a tape node")

    def fwd(rv):
        return np.asarray(weight * np.sum(np.abs(rv) ** p)), None

    def bwd(g, s, need, rv):
        return (g * weight * p * np.abs(rv) ** (p - 1) * np.sign(rv),)

    return r.tape.push("lp_sum", fwd, bwd, (r,))


def total(terms) -> Node:
    terms = list(terms)
    tape = _tape_of(*terms)
    return tape.push(
        "sum",
        lambda *xs: (np.asarray(sum(xs)), None),
        lambda g, s, need, *xs: tuple(g for _ in xs),
        tuple(terms),
    )
