"""Rayleigh wave equation with periodic boundary conditions on [0, 2 pi]."""

import math

from .. import estimators as est
from .. import jets as J
from .base import Piece, Problem, SupRequest

EPS = 1.0


class Rayleigh(Problem):
    name = "rayleigh"
    var_names = ("t", "x")
    box = ((0.0, 1.0), (0.0, 2.0 * math.pi))
    kinds = ("eq", "in", "in_U", "in_t", "bn", "bn_t")

    @classmethod
    def check_exponents(cls, p, q):
        if p != 2 or q != 2:
            return [f"rayleigh needs p = q = 2 (got p={p}, q={q})"]
        return []

    def exact(self, xs):
        t, x = xs
        return [J.sin(x - t)]

    def forcing(self, t, x):
        s = x - t
        return 0.5 * EPS * J.sin(s) * J.sin(2.0 * s)

    def pieces(self):
        a, b = self.box[1]

        def eq(c):
            ut = c.d("t")
            return [c.d("tt") - c.d("xx") - EPS * (ut - ut * ut * ut) - self.forcing(c.v("t"), c.v("x"))]

        def ini(c):
            return [c.d() - J.sin(c.v("x"))]

        def ini_u(c):
            return [c.d("x") - J.cos(c.v("x"))]

        def ini_t(c):
            return [c.d("t") + J.cos(c.v("x"))]

        def bn(c):
            return [c.d("x", 0, 0) - c.d("x", 0, 1)]

        def bn_t(c):
            return [c.d("t", 0, 0) - c.d("t", 0, 1)]

        t0 = ((("t", 0.0),),)
        ends = ((("x", a),), (("x", b),))
        return [
            Piece("eq", ((),), ("tt", "xx", "t"), eq),
            Piece("in", t0, ("",), ini),
            Piece("in_U", t0, ("x",), ini_u, "H1 part of R_in"),
            Piece("in_t", t0, ("t",), ini_t),
            Piece("bn", ends, ("x",), bn, "u_x(t,a)-u_x(t,b)"),
            Piece("bn_t", ends, ("t",), bn_t, "u_t(t,a)-u_t(t,b)"),
        ]

    def sup_requests(self):
        a, b = self.box[1]
        ends = ((("x", a),), (("x", b),))
        return {
            "ut_net": SupRequest("net", ends, ("t",), kind="bn"),
            "ut_exact": SupRequest("exact", ends, ("t",), kind="bn"),
            "ux_net": SupRequest("net", ends, ("x",), kind="bn_t"),
            "ux_exact": SupRequest("exact", ends, ("x",), kind="bn_t"),
        }

    def bound_inputs(self, rep):
        T = self.T
        s = rep.sups
        terms = [
            est.Term("eq", "eq", 1.0),
            est.Term("in", "in", 1.0),
            est.Term("in: H1 seminorm part", "in_U", 1.0),
            est.Term("in_t", "in_t", 1.0),
            est.Term("bn: 4 sqrt(T) max|u_t|", "bn", 4.0 * math.sqrt(T) * max(s["ut_net"], s["ut_exact"]), 0.5),
            est.Term("bn_t: 4 sqrt(T) max|u_x|", "bn_t", 4.0 * math.sqrt(T) * max(s["ux_net"], s["ux_exact"]), 0.5),
        ]
        return terms, {"lambda_A": EPS * T, "lambda_F": 0.0}, est.hyperbolic_bound

    def asymptotic_items(self, et, M):
        return [
            est.AsymptoticItem("eq", et["eq"], M["eq"], 1.0),
            est.AsymptoticItem("in", et["in"] + et["in_U"], M["in"], 2.0),
            est.AsymptoticItem("in_t", et["in_t"], M["in_t"], 2.0),
            est.AsymptoticItem("bn", et["bn"], M["bn"], 2.0, 0.5),
            est.AsymptoticItem("bn_t", et["bn_t"], M["bn_t"], 2.0, 0.5),
        ]
