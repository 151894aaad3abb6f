"""Shared machinery for the benchmark problems.

A problem is described by residual *pieces*. Each piece belongs to one
residual kind, lives on one or more faces of the space-time box (a face
fixes some coordinates) and maps a derivative context to a list of residual
components. The same expression code runs in three modes:

* ``tape``  - network derivatives are tape nodes (training),
* ``array`` - plain arrays (training errors, evaluation grids),
* ``jet``   - jets in the free face variables (second-derivative sups of
  the residual, needed by the quadrature bound).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .. import net, quad
from .. import tape as tp
from ..jets import IndexSet, Jet, multi_index

KINDS = ("eq", "in", "in_U", "in_t", "bn", "bn_t")
CHUNK = 8192  # points per batch in dense evaluations
MKEY = {"eq": "M_eq", "in": "M_in", "in_U": "M_in", "in_t": "M_in_t", "bn": "M_bn", "bn_t": "M_bn_t"}


@dataclass(frozen=True)
class Piece:
    """Residual components on ``faces``; every face fixes the same variables."""

    kind: str
    faces: tuple
    derivs: tuple
    expr: Callable
    label: str = ""


@dataclass(frozen=True)
class SupRequest:
    """Max of |d^spec u_k| over a union of faces, for the network or the exact solution."""

    source: str  # "net" or "exact"
    faces: tuple
    derivs: tuple
    outputs: tuple = (0,)
    kind: str = "eq"  # whose sample size sets the grid resolution


@dataclass
class Site:
    fixed: tuple
    free: tuple
    grid: quad.Grid | None
    points: np.ndarray
    iset: IndexSet
    feats: np.ndarray | None = None
    exact: list | None = None


@dataclass
class ResidualReport:
    training_errors: dict
    eval_values: dict
    c2: dict
    quad_train: dict
    quad_eval: dict
    sups: dict
    grids: dict = field(default_factory=dict)


class Problem:
    name = "base"
    var_names: tuple = ()
    box: tuple = ()
    n_out = 1
    n_in: int | None = None
    time_dependent = True
    kinds: tuple = ()

    def __init__(self, p: float, q: float | None = None):
        self.p = float(p)
        self.q = float(p if q is None else q)
        errs = self.check_exponents(self.p, self.q)
        if errs:
            raise ValueError("; ".join(errs))

    # -- per-problem hooks -------------------------------------------------
    @classmethod
    def check_exponents(cls, p, q) -> list:
        return []

    def features(self, xs: list) -> list:
        return xs

    def exact(self, xs: list) -> list:
        raise NotImplementedError

    def pieces(self) -> list:
        raise NotImplementedError

    def sup_requests(self) -> dict:
        return {}

    def bound_inputs(self, rep: ResidualReport):
        """Returns (terms, extra, form) where form is an estimator function."""
        raise NotImplementedError

    def asymptotic_items(self, et: dict, M: dict) -> list:
        raise NotImplementedError

    # -- geometry -----------------------------------------------------------
    @property
    def nvars(self) -> int:
        return len(self.var_names)

    @property
    def T(self) -> float:
        return self.box[0][1] - self.box[0][0] if self.time_dependent else 0.0

    def input_size(self) -> int:
        return self.n_in or self.nvars

    def var_index(self, name: str) -> int:
        return self.var_names.index(name)

    def _free(self, fixed) -> tuple:
        fixed_idx = {self.var_index(n) for n, _ in fixed}
        return tuple(j for j in range(self.nvars) if j not in fixed_idx)

    def _full_points(self, fixed, free, sub) -> np.ndarray:
        pts = np.empty((sub.shape[0], self.nvars))
        for n, v in fixed:
            pts[:, self.var_index(n)] = v
        for c, j in enumerate(free):
            pts[:, j] = sub[:, c]
        return pts

    def check_points(self, points: np.ndarray, tol: float = 1e-12):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.nvars:
            raise ValueError(f"{self.name}: points need {self.nvars} coordinates")
        for j, (a, b) in enumerate(self.box):
            if np.any(pts[:, j] < a - tol) or np.any(pts[:, j] > b + tol):
                raise ValueError(f"{self.name}: point outside the domain along {self.var_names[j]}")
        return pts

    # -- exact solution -----------------------------------------------------
    def exact_solution(self, points) -> np.ndarray:
        pts = self.check_points(points)
        xs = [pts[:, j] for j in range(self.nvars)]
        out = np.stack([np.broadcast_to(np.asarray(v, float), (pts.shape[0],)) for v in self.exact(xs)], axis=1)
        return out[:, 0] if self.n_out == 1 else out

    def exact_jets(self, points, iset: IndexSet) -> list:
        xs = Jet.variables(iset, points)
        out = []
        for v in self.exact(xs):
            if not isinstance(v, Jet):
                v = Jet.constant(iset, np.broadcast_to(np.asarray(v, float), (points.shape[0],)))
            out.append(v)
        return out

    def feature_jets(self, points, iset: IndexSet) -> np.ndarray:
        feats = self.features(Jet.variables(iset, points))
        return np.stack([f.c for f in feats], axis=-1)

    def network_values(self, params: net.MlpParams, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        xs = [pts[:, j] for j in range(self.nvars)]
        feats = np.stack([np.asarray(f, float) for f in self.features(xs)], axis=1)
        return net.forward(params, feats)

    # -- layouts ------------------------------------------------------------
    def _derivs_by_face(self) -> dict:
        out: dict = {}
        for pc in self.pieces():
            for f in pc.faces:
                out.setdefault((pc.kind, f), set()).update(multi_index(s, self.var_names) for s in pc.derivs)
        return out

    def layout(self, M: dict, multiplier: int = 1) -> dict:
        """Midpoint sites keyed by (kind, face) for the given sample sizes."""
        sites = {}
        for (kind, fixed), ders in self._derivs_by_face().items():
            free = self._free(fixed)
            n = quad.per_axis_count(int(M[kind]), len(free))
            grid = quad.midpoint_grid([self.box[j] for j in free], (n * multiplier,) * len(free))
            pts = self._full_points(fixed, free, grid.points)
            iset = IndexSet.closure(ders, self.nvars)
            sites[(kind, fixed)] = Site(fixed, free, grid, pts, iset)
        return sites

    def dense_layout(self, M: dict, multiplier: int) -> dict:
        """Closed node grids (endpoints included) with jets wide enough for C2 sups."""
        sites = {}
        for (kind, fixed), ders in self._derivs_by_face().items():
            free = self._free(fixed)
            n = quad.per_axis_count(int(M[kind]), len(free))
            sub = quad.node_points([self.box[j] for j in free], (n * multiplier + 1,) * len(free))
            pts = self._full_points(fixed, free, sub)
            target = self._target(free)
            gens = {tuple(a + b for a, b in zip(d, k)) for d in ders | {(0,) * self.nvars} for k in target}
            sites[(kind, fixed)] = Site(fixed, free, None, pts, IndexSet.closure(gens, self.nvars))
        return sites

    def _target(self, free) -> IndexSet:
        return IndexSet.axes(tuple(2 if j in free else 0 for j in range(self.nvars)))

    def _exact_at(self, site: Site) -> list:
        if site.exact is None:
            site.exact = self.exact_jets(site.points, site.iset)
        return site.exact

    def _feats_at(self, site: Site) -> np.ndarray:
        if site.feats is None:
            site.feats = self.feature_jets(site.points, site.iset)
        return site.feats

    # -- evaluation ---------------------------------------------------------
    def _ctx(self, sites: list, mode: str, net_data: list, target: IndexSet | None = None):
        return _Ctx(self, sites, mode, net_data, target)

    def _net_jets(self, params, site: Site) -> list:
        out = net.forward_jet_array(params, self._feats_at(site), site.iset)
        return [Jet(site.iset, out[..., k]) for k in range(out.shape[-1])]

    def piece_components(self, piece: Piece, sites: dict, source, mode: str = "array") -> list:
        """Residual components of a piece; ``source`` is MlpParams or "exact"."""
        ss = [sites[(piece.kind, f)] for f in piece.faces]
        data = [self._exact_at(s) if source == "exact" else self._net_jets(source, s) for s in ss]
        target = self._target(ss[0].free) if mode == "jet" else None
        return piece.expr(self._ctx(ss, mode, data, target))

    def training_errors(self, params, sites: dict, source=None) -> dict:
        """p-powered midpoint values of every residual kind."""
        src = params if source is None else source
        cache: dict = {}
        out = {k: 0.0 for k in self.kinds}
        for pc in self.pieces():
            ss = [sites[(pc.kind, f)] for f in pc.faces]
            data = []
            for f, s in zip(pc.faces, ss):
                key = (pc.kind, f)
                if key not in cache:
                    cache[key] = self._exact_at(s) if src == "exact" else self._net_jets(src, s)
                data.append(cache[key])
            comps = pc.expr(self._ctx(ss, "array", data))
            vol = ss[0].grid.cell_volume
            out[pc.kind] += sum(vol * float(np.sum(np.abs(c) ** self.p)) for c in comps)
        return out

    def loss_fn(self, sites: dict, weights: dict) -> Callable:
        """Closure for :func:`net.value_and_grad`: weighted sum of training errors."""

        def fn(t: tp.Tape, pn):
            nodes = {}
            terms = []
            for pc in self.pieces():
                ss = [sites[(pc.kind, f)] for f in pc.faces]
                data = []
                for f, s in zip(pc.faces, ss):
                    key = (pc.kind, f)
                    if key not in nodes:
                        nodes[key] = net.forward_tape(t, pn, self._feats_at(s), s.iset)
                    data.append(nodes[key])
                comps = pc.expr(self._ctx(ss, "tape", data))
                w = weights.get(pc.kind, 1.0) * ss[0].grid.cell_volume
                for c in comps:
                    terms.append(tp.lp_sum(c, self.p, w))
            return tp.total(terms)

        return fn

    def residual_c2(self, source, dense: dict, chunk: int = CHUNK) -> dict:
        """Per kind: list of per-axis sups max(|r|, |r_j|, |r_jj|) for each component."""
        out: dict = {k: [] for k in self.kinds}
        for pc in self.pieces():
            full = [dense[(pc.kind, f)] for f in pc.faces]
            free = full[0].free
            target = self._target(free)
            best = None
            for sl in _slices(full[0].points.shape[0], chunk):
                ss = [Site(s.fixed, s.free, None, s.points[sl], s.iset) for s in full]
                data = [self._exact_at(s) if source == "exact" else self._net_jets(source, s) for s in ss]
                comps = pc.expr(self._ctx(ss, "jet", data, target))
                if best is None:
                    best = [[0.0] * len(free) for _ in comps]
                for c, row in zip(comps, best):
                    if not isinstance(c, Jet):
                        c = Jet.constant(target, np.broadcast_to(np.asarray(c, float), (ss[0].points.shape[0],)))
                    base = float(np.max(np.abs(c.value)))
                    for a, j in enumerate(free):
                        e1 = tuple(int(i == j) for i in range(self.nvars))
                        e2 = tuple(2 * int(i == j) for i in range(self.nvars))
                        row[a] = max(row[a], base, float(np.max(np.abs(c.partial(e1)))),
                                     float(np.max(np.abs(c.partial(e2)))))
            out[pc.kind].extend(tuple(r) for r in best)
        return out

    def quad_bounds(self, c2: dict, sites: dict) -> dict:
        """Certified midpoint error per kind on the grids of ``sites``."""
        grids = {}
        for (kind, _), s in sites.items():
            grids.setdefault(kind, s.grid)
        out = {}
        for kind in self.kinds:
            g = grids[kind]
            out[kind] = math.fsum(quad.grid_error_bound(g, [quad.pc2_bound(self.p, v) for v in axes])
                                  for axes in c2[kind])
        return out

    def sups(self, params, M: dict, multiplier: int, exact_min: int = 0) -> dict:
        """Evaluate every :class:`SupRequest` on closed node grids."""
        out = {}
        for name, req in self.sup_requests().items():
            best = 0.0
            for fixed in req.faces:
                free = self._free(fixed)
                n = quad.per_axis_count(int(M[req.kind]), len(free)) * multiplier
                if req.source == "exact":
                    n = max(n, exact_min)
                sub = quad.node_points([self.box[j] for j in free], (n + 1,) * len(free))
                pts = self._full_points(fixed, free, sub)
                ders = [multi_index(s, self.var_names) for s in req.derivs]
                iset = IndexSet.closure(ders, self.nvars)
                for sl in _slices(pts.shape[0], CHUNK):
                    sub = pts[sl]
                    if req.source == "exact":
                        jets = self.exact_jets(sub, iset)
                    else:
                        out_c = net.forward_jet_array(params, self.feature_jets(sub, iset), iset)
                        jets = [Jet(iset, out_c[..., k]) for k in range(out_c.shape[-1])]
                    for k in req.outputs:
                        for d in ders:
                            best = max(best, float(np.max(np.abs(jets[k].partial(d)))))
            out[name] = best
        return out

    # -- true error ---------------------------------------------------------
    def true_error(self, params, counts: Sequence[int], source=None) -> float:
        """q-powered L^q(I; L^p) midpoint value of the network error on a fine grid."""
        grid = quad.midpoint_grid(self.box, tuple(counts))
        pts = grid.points
        if source == "exact":
            diff = np.zeros((pts.shape[0], self.n_out))
        else:
            ex = self.exact_solution(pts).reshape(pts.shape[0], -1)
            diff = self.network_values(params, pts) - ex
        a = np.sum(np.abs(diff) ** self.p, axis=1)
        if not self.time_dependent:
            return float((grid.cell_volume * a.sum()) ** (self.q / self.p))
        nt = grid.counts[0]
        dt = (self.box[0][1] - self.box[0][0]) / nt
        dx = grid.cell_volume / dt
        per_t = dx * a.reshape(nt, -1).sum(axis=1)
        return float(dt * np.sum(per_t ** (self.q / self.p)))


def _slices(n: int, size: int):
    return [slice(i, min(i + size, n)) for i in range(0, n, size)]


class _Ctx:
    """Derivative context handed to piece expressions."""

    def __init__(self, prob: Problem, sites: list, mode: str, data: list, target):
        self.prob = prob
        self.sites = sites
        self.mode = mode
        self.data = data
        self.target = target
        self._cache: dict = {}

    def _mi(self, spec):
        return multi_index(spec, self.prob.var_names)

    def v(self, name: str, f: int = 0):
        j = self.prob.var_index(name)
        x = self.sites[f].points[:, j]
        if self.mode == "jet":
            return Jet.variable(self.target, j, x)
        return x

    def e(self, spec="", k: int = 0, f: int = 0):
        jets = self.prob._exact_at(self.sites[f])
        if self.mode == "jet":
            return jets[k].shift(self._mi(spec), self.target)
        return jets[k].partial(self._mi(spec))

    def d(self, spec="", k: int = 0, f: int = 0):
        if self.mode == "jet":
            return self.data[f][k].shift(self._mi(spec), self.target)
        if self.mode == "array":
            return self.data[f][k].partial(self._mi(spec))
        key = (spec, k, f)
        if key not in self._cache:
            mi = self._mi(spec)
            s = self.sites[f].iset
            if mi not in s.pos:
                raise ValueError(f"derivative {spec!r} is not in the site's index set")
            pos = s.pos[mi]
            self._cache[key] = tp.coeff(self.data[f], pos, float(s.factorials[pos]), k)
        return self._cache[key]
