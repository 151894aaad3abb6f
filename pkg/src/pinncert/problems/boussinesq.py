"""'Good' Boussinesq equation with a travelling sech^2 soliton on [-1, 1]."""

import math

from .. import estimators as est
from .. import jets as J
from .base import Piece, Problem, SupRequest

AMP = 9.0 / 8.0
WAVE = math.sqrt(3.0) / 4.0  # the soliton of speed 1/2 needs 4 k^2 = 1 - c^2
SPEED = 0.5


class Boussinesq(Problem):
    name = "boussinesq"
    var_names = ("t", "x")
    box = ((0.0, 1.0), (-1.0, 1.0))
    kinds = ("eq", "in", "in_U", "in_t", "bn", "bn_t")

    @classmethod
    def check_exponents(cls, p, q):
        if p != 2 or q != 2:
            return [f"boussinesq needs p = q = 2 (got p={p}, q={q})"]
        return []

    def exact(self, xs):
        t, x = xs
        return [AMP * J.sech2(WAVE * (x - SPEED * t))]

    def pieces(self):
        a, b = self.box[1]

        def eq(c):
            u, ux = c.d(), c.d("x")
            return [c.d("tt") - c.d("xx") + c.d("xxxx") + 2.0 * (ux * ux + u * c.d("xx"))]

        def ini(c):
            return [c.d() - c.e()]

        def ini_u(c):
            return [c.d("x") - c.e("x"), c.d("xx") - c.e("xx")]

        def ini_t(c):
            return [c.d("t") - c.e("t")]

        def bn(c):
            return [c.d("xx") - c.e("xx")]

        def bn_t(c):
            return [c.d("t") - c.e("t")]

        t0 = ((("t", 0.0),),)
        ends = ((("x", a),), (("x", b),))
        return [
            Piece("eq", ((),), ("tt", "xx", "xxxx", "x"), eq),
            Piece("in", t0, ("",), ini),
            Piece("in_U", t0, ("x", "xx"), ini_u, "H2 part of R_in"),
            Piece("in_t", t0, ("t",), ini_t),
        ] + [Piece("bn", (f,), ("xx",), bn, f"u_xx(t,{f[0][1]:g})") for f in ends] \
          + [Piece("bn_t", (f,), ("t",), bn_t, f"u_t(t,{f[0][1]:g})") for f in ends]

    def sup_requests(self):
        a, b = self.box[1]
        ends = ((("x", a),), (("x", b),))
        c2 = ("", "t", "x", "tt", "tx", "xx")
        return {
            "utx_net": SupRequest("net", ends, ("tx",), kind="bn"),
            "utx_exact": SupRequest("exact", ends, ("tx",), kind="bn"),
            "ux3_net": SupRequest("net", ends, ("x", "xxx"), kind="bn_t"),
            "ux3_exact": SupRequest("exact", ends, ("x", "xxx"), kind="bn_t"),
            "c2_net": SupRequest("net", ((),), c2),
            "c2_exact": SupRequest("exact", ((),), c2),
        }

    def bound_inputs(self, rep):
        T = self.T
        s = rep.sups
        mt = max(s["utx_net"], s["utx_exact"])
        mx = max(s["ux3_net"], s["ux3_exact"])
        c2 = max(s["c2_net"], s["c2_exact"])
        terms = [
            est.Term("eq", "eq", 1.0),
            est.Term("in", "in", 1.0),
            est.Term("in: H2 seminorm part", "in_U", 1.0),
            est.Term("in_t", "in_t", 1.0),
            est.Term("bn: 4 sqrt(2T) max|u_tx|", "bn", 4.0 * math.sqrt(2 * T) * mt, 0.5),
            est.Term("bn_t: 8 sqrt(2T) max(|u_x|,|u_xxx|)", "bn_t", 8.0 * math.sqrt(2 * T) * mx, 0.5),
        ]
        return terms, {"lambda_A": 0.0, "lambda_F": 36.0 * T * c2 * c2}, est.hyperbolic_bound

    def asymptotic_items(self, et, M):
        return [
            est.AsymptoticItem("eq", et["eq"], M["eq"], 1.0),
            est.AsymptoticItem("in", et["in"] + et["in_U"], M["in"], 2.0),
            est.AsymptoticItem("in_t", et["in_t"], M["in_t"], 2.0),
            est.AsymptoticItem("bn", et["bn"], M["bn"], 2.0, 0.5),
            est.AsymptoticItem("bn_t", et["bn_t"], M["bn_t"], 2.0, 0.5),
        ]
