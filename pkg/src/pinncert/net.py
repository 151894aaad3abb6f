"""Fully connected tanh networks, their Taylor jets, and Adam training."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import tape as tp
from ._backend import kernels
from .jets import IndexSet, Jet, tanh_coeffs


@dataclass
class MlpParams:
    """Weights ``W[l]`` have shape (out, in); tanh on hidden layers, identity output."""

    layer_sizes: tuple
    weights: list
    biases: list
    seed: int = 0

    @property
    def n_params(self) -> int:
        return sum(W.size + b.size for W, b in zip(self.weights, self.biases))

    def flatten(self) -> np.ndarray:
        parts = []
        for W, b in zip(self.weights, self.biases):
            parts += [W.ravel(), b.ravel()]
        return np.concatenate(parts)

    def with_vector(self, vec: np.ndarray) -> "MlpParams":
        vec = np.asarray(vec, dtype=float)
        if vec.size != self.n_params:
            raise ValueError(f"expected {self.n_params} parameters, got {vec.size}")
        Ws, bs, k = [], [], 0
        for W, b in zip(self.weights, self.biases):
            Ws.append(vec[k:k + W.size].reshape(W.shape).copy())
            k += W.size
            bs.append(vec[k:k + b.size].copy())
            k += b.size
        return MlpParams(self.layer_sizes, Ws, bs, self.seed)


def init_mlp(layer_sizes: Sequence[int], seed: int) -> MlpParams:
    """Xavier-uniform weights and zero biases."""
    sizes = tuple(int(s) for s in layer_sizes)
    if len(sizes) < 3:
        raise ValueError("need an input layer, at least one hidden layer and an output layer")
    if min(sizes) < 1:
        raise ValueError("layer sizes must be positive")
    rng = np.random.default_rng(seed)
    Ws, bs = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        lim = math.sqrt(6.0 / (fan_in + fan_out))
        Ws.append(rng.uniform(-lim, lim, size=(fan_out, fan_in)))
        bs.append(np.zeros(fan_out))
    return MlpParams(sizes, Ws, bs, seed)


def forward(params: MlpParams, x: np.ndarray) -> np.ndarray:
    """Plain evaluation; x has shape (n, n_in), result (n, n_out)."""
    h = np.asarray(x, dtype=float)
    L = len(params.weights)
    for l, (W, b) in enumerate(zip(params.weights, params.biases)):
        h = h @ W.T + b
        if l < L - 1:
            h = np.tanh(h)
    return h


def _tanh_layer(z: np.ndarray, iset: IndexSet) -> np.ndarray:
    nc = len(iset)
    flat = z.reshape(nc, -1)
    ck = np.ascontiguousarray(tanh_coeffs(flat[0], iset.degree))
    delta = np.array(flat)
    delta[0] = 0.0
    out = np.empty_like(delta)
    kernels.compose_apply(delta, ck, iset.ia_nz, iset.ib_nz, iset.ic_nz, iset.nz_limits, out)
    return out.reshape(z.shape)


def forward_jet_array(params: MlpParams, xc: np.ndarray, iset: IndexSet) -> np.ndarray:
    """Push an input jet array (ncoef, n, n_in) through the network."""
    h = np.asarray(xc, dtype=float)
    L = len(params.weights)
    for l, (W, b) in enumerate(zip(params.weights, params.biases)):
        h = h @ W.T
        h[0] += b
        if l < L - 1:
            h = _tanh_layer(h, iset)
    return h


def input_jets(points: np.ndarray, iset: IndexSet) -> np.ndarray:
    """Identity features: coordinate jets stacked as (ncoef, n, nvars)."""
    return np.stack([j.c for j in Jet.variables(iset, points)], axis=-1)


def forward_jet(params: MlpParams, points: np.ndarray, order: int | IndexSet, features=None) -> list:
    """Jets of every network output at ``points`` (shape (n, nvars)).

    ``order`` is either a total degree or an explicit index set. ``features``
    optionally maps the list of coordinate jets to the list of input jets.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    iset = order if isinstance(order, IndexSet) else IndexSet.total(pts.shape[1], int(order))
    if features is None:
        xc = input_jets(pts, iset)
    else:
        xs = features(Jet.variables(iset, pts))
        xc = np.stack([x.c for x in xs], axis=-1)
    if xc.shape[-1] != params.layer_sizes[0]:
        raise ValueError(f"network expects {params.layer_sizes[0]} inputs, got {xc.shape[-1]}")
    out = forward_jet_array(params, xc, iset)
    return [Jet(iset, out[..., k]) for k in range(out.shape[-1])]


def param_nodes(t: tp.Tape, params: MlpParams) -> list:
    nodes = []
    for l, (W, b) in enumerate(zip(params.weights, params.biases)):
        nodes.append((t.leaf(W, f"W{l}", param=True), t.leaf(b, f"b{l}", param=True)))
    return nodes


def forward_tape(t: tp.Tape, pnodes: list, xc: np.ndarray, iset: IndexSet) -> tp.Node:
    h = t.leaf(xc, "input_jet")
    L = len(pnodes)
    for l, (W, b) in enumerate(pnodes):
        h = tp.affine_jet(h, W, b)
        if l < L - 1:
            h = tp.tanh_jet(h, iset)
    return h


def flat_grad(grads: list, pnodes: list) -> np.ndarray:
    parts = []
    for W, b in pnodes:
        for n in (W, b):
            g = grads[n.index]
            parts.append(np.zeros(n.value.size) if g is None else np.ravel(g))
    return np.concatenate(parts)


def value_and_grad(params: MlpParams, loss_fn: Callable) -> tuple:
    """Run ``loss_fn(tape, pnodes) -> scalar node`` and differentiate it."""
    t = tp.Tape()
    try:
        pn = param_nodes(t, params)
        loss = loss_fn(t, pn)
        val = float(loss.value)
        if not math.isfinite(val):
            bad = t.first_nonfinite()
            where = f"node {bad.index} ({bad.name})" if bad is not None else "the loss"
            raise tp.PoisonedGradient(f"loss is {val}; first non-finite value at {where}")
        return val, flat_grad(t.backward(loss), pn)
    finally:
        # nodes point back at the tape; drop the cycle so the arrays free now
        t.nodes.clear()


@dataclass
class AdamState:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: np.ndarray | None = None
    v: np.ndarray | None = None


def adam_step(theta: np.ndarray, grad: np.ndarray, state: AdamState) -> np.ndarray:
    """One bias-corrected Adam update; updates ``state`` in place.

    A non-finite gradient rejects the step and leaves the state untouched.
    """
    g = np.asarray(grad, dtype=float)
    if not np.all(np.isfinite(g)):
        raise tp.PoisonedGradient("non-finite gradient; Adam step rejected")
    if state.m is None:
        state.m = np.zeros_like(g)
        state.v = np.zeros_like(g)
    state.step += 1
    state.m = state.beta1 * state.m + (1 - state.beta1) * g
    state.v = state.beta2 * state.v + (1 - state.beta2) * g * g
    mhat = state.m / (1 - state.beta1 ** state.step)
    vhat = state.v / (1 - state.beta2 ** state.step)
    return theta - state.lr * mhat / (np.sqrt(vhat) + state.eps)


@dataclass
class TrainResult:
    params: MlpParams
    losses: list = field(default_factory=list)


def train(params: MlpParams, loss_fn: Callable, epochs: int, state: AdamState | None = None,
          callback: Callable | None = None) -> TrainResult:
    """Full-batch Adam. ``callback(epoch, params)`` runs after each update."""
    state = state or AdamState()
    theta = params.flatten()
    res = TrainResult(params)
    for epoch in range(1, epochs + 1):
        cur = params.with_vector(theta)
        val, g = value_and_grad(cur, loss_fn)
        res.losses.append(val)
        theta = adam_step(theta, g, state)
        if callback is not None:
            callback(epoch, params.with_vector(theta))
    res.params = params.with_vector(theta)
    return res
