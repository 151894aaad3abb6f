"""1D heat equation with diffusivity x^2 sin t on [1, 2]."""

import math

import numpy as np

from .. import estimators as est
from .. import jets as J
from .base import Piece, Problem, SupRequest

K = math.pi / math.log(2.0)


class Heat(Problem):
    name = "heat"
    var_names = ("t", "x")
    box = ((0.0, 1.0), (1.0, 2.0))
    kinds = ("eq", "in", "bn")

    @classmethod
    def check_exponents(cls, p, q):
        errs = []
        if p < 2:
            errs.append(f"heat needs p >= 2 (got {p})")
        if q < 1:
            errs.append(f"heat needs q >= 1 (got {q})")
        return errs

    @property
    def a(self):
        return self.box[1][0]

    @property
    def b(self):
        return self.box[1][1]

    def phi1(self, t, x):
        return x * x * J.sin(t)

    def u0(self, x):
        return J.sin(K * J.log(x)) / J.sqrt(x)

    def exact(self, xs):
        t, x = xs
        return [self.u0(x) * J.exp(-(K * K + 0.25) * (1.0 - J.cos(t)))]

    def pieces(self):
        a, b = self.a, self.b

        def eq(c):
            t, x = c.v("t"), c.v("x")
            # d_x[phi1 u_x] with phi1 = x^2 sin t
            return [c.d("t") - (2.0 * x * J.sin(t) * c.d("x") + self.phi1(t, x) * c.d("xx"))]

        def ini(c):
            return [c.d() - self.u0(c.v("x"))]

        def bn(c):
            return [c.d()]

        return [
            Piece("eq", ((),), ("t", "x", "xx"), eq),
            Piece("in", ((("t", 0.0),),), ("",), ini),
            Piece("bn", ((("x", a),),), ("",), bn, "u(t,a)"),
            Piece("bn", ((("x", b),),), ("",), bn, "u(t,b)"),
        ]

    def sup_requests(self):
        faces = ((("x", self.a),), (("x", self.b),))
        return {
            "ux_net": SupRequest("net", faces, ("x",), kind="bn"),
            "ux_exact": SupRequest("exact", faces, ("x",), kind="bn"),
        }

    def phi1_sup(self):
        # x^2 sin t is increasing in both arguments on the box (T <= pi/2)
        T = self.box[0][1]
        return self.b ** 2 * math.sin(min(T, math.pi / 2))

    def bound_inputs(self, rep):
        p, T = self.p, self.T
        uxm = max(rep.sups["ux_net"], rep.sups["ux_exact"])
        coef = 2 * p * (2 * T) ** (1 / p) * self.phi1_sup() * uxm
        terms = [
            est.Term("eq", "eq", 1.0),
            est.Term("in", "in", 1.0),
            est.Term("bn: 2p(2T)^(1/p)|phi1| max|u_x|", "bn", coef, (p - 1) / p),
        ]
        return terms, {"lambda": 0.0}, est.parabolic_bound

    def asymptotic_items(self, et, M):
        p = self.p
        return [
            est.AsymptoticItem("eq", et["eq"], M["eq"], 1.0),
            est.AsymptoticItem("in", et["in"], M["in"], 2.0),
            est.AsymptoticItem("bn", et["bn"], M["bn"], 2.0, (p - 1) / p),
        ]
