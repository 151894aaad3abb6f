"""2D Maxwell system (TM mode) on the unit square with perfectly conducting walls."""

import math

from .. import estimators as est
from .. import jets as J
from .base import Piece, Problem, SupRequest

EPS1 = 2.0
EPS2 = 3.0


class Maxwell(Problem):
    name = "maxwell"
    var_names = ("t", "x", "y")
    box = ((0.0, 1.0), (0.0, 1.0), (0.0, 1.0))
    n_out = 3
    kinds = ("eq", "in", "bn")

    @classmethod
    def check_exponents(cls, p, q):
        if p != 2 or q != 2:
            return [f"maxwell needs p = q = 2 (got p={p}, q={q})"]
        return []

    @property
    def omega(self):
        return math.pi * math.sqrt(2.0 / (EPS1 * EPS2))

    @property
    def beta(self):
        return math.sqrt(EPS1 / (2.0 * EPS2))

    def exact(self, xs):
        t, x, y = xs
        w, b = self.omega, self.beta
        sx, cx = J.sin(math.pi * x), J.cos(math.pi * x)
        sy, cy = J.sin(math.pi * y), J.cos(math.pi * y)
        return [sx * sy * J.cos(w * t), -b * sx * cy * J.sin(w * t), b * cx * sy * J.sin(w * t)]

    def pieces(self):
        (a1, b1), (a2, b2) = self.box[1], self.box[2]

        def eq(c):
            return [
                EPS1 * c.d("t", 0) - (c.d("x", 2) - c.d("y", 1)),
                EPS2 * c.d("t", 1) + c.d("y", 0),
                EPS2 * c.d("t", 2) - c.d("x", 0),
            ]

        def ini(c):
            u10 = J.sin(math.pi * c.v("x")) * J.sin(math.pi * c.v("y"))
            return [c.d("", 0) - u10, c.d("", 1), c.d("", 2)]

        def bn(c):
            return [c.d("", 0)]

        walls = ((("x", a1),), (("x", b1),), (("y", a2),), (("y", b2),))
        return [
            Piece("eq", ((),), ("t", "x", "y"), eq),
            Piece("in", ((("t", 0.0),),), ("",), ini),
        ] + [Piece("bn", (f,), ("",), bn, f"u1 on {f[0][0]}={f[0][1]:g}") for f in walls]

    def sup_requests(self):
        (a1, b1), (a2, b2) = self.box[1], self.box[2]
        yf = ((("y", a2),), (("y", b2),))
        xf = ((("x", a1),), (("x", b1),))
        return {
            "u2_net": SupRequest("net", yf, ("",), (1,), "bn"),
            "u2_exact": SupRequest("exact", yf, ("",), (1,), "bn"),
            "u3_net": SupRequest("net", xf, ("",), (2,), "bn"),
            "u3_exact": SupRequest("exact", xf, ("",), (2,), "bn"),
        }

    def bound_inputs(self, rep):
        T = self.T
        L1 = self.box[1][1] - self.box[1][0]
        L2 = self.box[2][1] - self.box[2][0]
        s = rep.sups
        mu = max(math.sqrt(L1) * max(s["u2_net"], s["u2_exact"]),
                 math.sqrt(L2) * max(s["u3_net"], s["u3_exact"]))
        terms = [
            est.Term("eq", "eq", 1.0),
            est.Term("in: max(eps) weight", "in", max(EPS1, EPS2)),
            est.Term("bn: 8 sqrt(T) mu", "bn", 8.0 * math.sqrt(T) * mu, 0.5),
        ]
        return terms, {"R": 1.0 / min(EPS1, EPS2), "lambda": 0.0}, est.genpar_bound

    def asymptotic_items(self, et, M):
        return [
            est.AsymptoticItem("eq", et["eq"], M["eq"], 2.0 / 3.0),
            est.AsymptoticItem("in", et["in"], M["in"], 1.0),
            est.AsymptoticItem("bn", et["bn"], M["bn"], 1.0, 0.5),
        ]
