"""Korteweg-de Vries equation with a single-soliton solution on [-1, 1]."""

from .. import estimators as est
from .. import jets as J
from .base import Piece, Problem, SupRequest


def soliton(t, x):
    th = J.tanh(0.5 * (x - t))
    return 0.5 * (th * th - 1.0)


class KdV(Problem):
    name = "kdv"
    var_names = ("t", "x")
    box = ((0.0, 1.0), (-1.0, 1.0))
    kinds = ("eq", "in", "bn")

    @classmethod
    def check_exponents(cls, p, q):
        errs = []
        if not (p == 2 or p > 3):
            errs.append(f"kdv needs p = 2 or p > 3 (got {p})")
        if q < 1:
            errs.append(f"kdv needs q >= 1 (got {q})")
        return errs

    def exact(self, xs):
        t, x = xs
        return [soliton(t, x)]

    def pieces(self):
        a, b = self.box[1]

        def eq(c):
            return [c.d("t") - 6.0 * c.d() * c.d("x") + c.d("xxx")]

        def ini(c):
            return [c.d() - soliton(0.0 * c.v("x"), c.v("x"))]

        def g1(c):
            return [c.d() - soliton(c.v("t"), a + 0.0 * c.v("t"))]

        def g2(c):
            return [c.d() - soliton(c.v("t"), b + 0.0 * c.v("t"))]

        def g3(c):
            t = c.v("t")
            th = J.tanh(0.5 * (1.0 - t))
            return [c.d("x") - 0.5 * th * (1.0 - th * th)]

        return [
            Piece("eq", ((),), ("t", "x", "xxx"), eq),
            Piece("in", ((("t", 0.0),),), ("",), ini),
            Piece("bn", ((("x", a),),), ("",), g1, "u(t,a)-g1"),
            Piece("bn", ((("x", b),),), ("",), g2, "u(t,b)-g2"),
            Piece("bn", ((("x", b),),), ("x",), g3, "u_x(t,b)-g3"),
        ]

    def sup_requests(self):
        a, b = self.box[1]
        faces = ((("x", a),), (("x", b),))
        return {
            "mu_net": SupRequest("net", faces, ("", "xx"), kind="bn"),
            "mu_exact": SupRequest("exact", faces, ("", "xx"), kind="bn"),
            "ux_exact": SupRequest("exact", ((),), ("x",)),
        }

    def bound_inputs(self, rep):
        p, T = self.p, self.T
        L = self.box[1][1] - self.box[1][0]
        mu = max(rep.sups["mu_net"], rep.sups["mu_exact"])
        lin = (6 * mu * (2 * p + 1) / (p + 1) + max((p - 1) * (p - 2) / 2, p - 1)
               + 27 * (p - 1) * (p - 2) / (2 * p * p * L * L))
        lam = T * max(6 * (1 + 1 / p) * rep.sups["ux_exact"] - 27 * (p - 1) * (p - 2) / (4 * p ** 3 * L ** 3), 0.0)
        terms = [
            est.Term("eq", "eq", 1.0),
            est.Term("in", "in", 1.0),
            est.Term("bn: (2T)^(1/p) mu p", "bn", (2 * T) ** (1 / p) * mu * p, (p - 1) / p),
            est.Term("bn: linear mu term", "bn", lin, 1.0),
        ]
        return terms, {"lambda": lam}, est.parabolic_bound

    def asymptotic_items(self, et, M):
        p = self.p
        return [
            est.AsymptoticItem("eq", et["eq"], M["eq"], 1.0),
            est.AsymptoticItem("in", et["in"], M["in"], 2.0),
            est.AsymptoticItem("bn", et["bn"], M["bn"], 2.0, (p - 1) / p),
        ]
