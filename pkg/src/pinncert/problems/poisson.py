"""2D Poisson equation with a piecewise constant sign forcing on [-1, 1]^2."""

import math

from .. import estimators as est
from .. import jets as J
from .base import Piece, Problem, SupRequest


class Poisson(Problem):
    name = "poisson"
    var_names = ("x", "y")
    box = ((-1.0, 1.0), (-1.0, 1.0))
    n_in = 4
    time_dependent = False
    kinds = ("eq", "bn")

    def __init__(self, p, q=None, pi_tr: float = 1.0):
        super().__init__(p, q)
        if not pi_tr > 0:
            raise ValueError(f"pi_2_tr must be positive (got {pi_tr})")
        self.pi_tr = float(pi_tr)

    @classmethod
    def check_exponents(cls, p, q):
        errs = []
        if p < 2:
            errs.append(f"poisson needs p >= 2 (got {p})")
        if q != p:
            errs.append(f"poisson needs q = p (got p={p}, q={q})")
        return errs

    def features(self, xs):
        x, y = xs
        return [x, y, J.abs(x), J.abs(y)]

    def exact(self, xs):
        x, y = xs
        return [-J.abs(x) * x - J.abs(y) * y]

    def pieces(self):
        (a1, b1), (a2, b2) = self.box

        def eq(c):
            x, y = c.v("x"), c.v("y")
            phi = 2.0 * J.sign(x) + 2.0 * J.sign(y)
            return [-(c.d("xx") + c.d("yy")) - phi]

        def face_x(c):
            y = c.v("y")
            return [c.d() - (-J.abs(c.v("x")) * c.v("x") - J.abs(y) * y)]

        def face_y(c):
            x = c.v("x")
            return [c.d() - (-J.abs(x) * x - J.abs(c.v("y")) * c.v("y"))]

        return [
            Piece("eq", ((),), ("xx", "yy"), eq),
            Piece("bn", ((("x", a1),),), ("",), face_x, "y-f1"),
            Piece("bn", ((("x", b1),),), ("",), face_x, "y-f2"),
            Piece("bn", ((("y", a2),),), ("",), face_y, "y-f3"),
            Piece("bn", ((("y", b2),),), ("",), face_y, "y-f4"),
        ]

    def sup_requests(self):
        return {
            "grad_net": SupRequest("net", ((),), ("x", "y")),
            "grad_exact": SupRequest("exact", ((),), ("x", "y")),
        }

    def bound_inputs(self, rep):
        p, pt = self.p, self.pi_tr
        g = max(rep.sups["grad_net"], rep.sups["grad_exact"])
        lam_p = (pt * p * p / (2.0 * (p - 1.0))) ** p
        expo = (p + 1.0) * (p - 1.0) ** 3 / p ** 3 - 2.0
        terms = [
            est.Term("eq: Lambda^p / p", "eq", lam_p / p),
            est.Term("bn: 2 pi_tr 2^(p-1)", "bn", 2.0 * pt * 2.0 ** (p - 1.0)),
            est.Term("bn: gradient term", "bn", 2.0 * pt * 2.0 ** expo * p / (p - 1.0) * g, (p - 1.0) / p),
        ]
        return terms, {"pi_2_tr": pt}, est.elliptic_bound

    def asymptotic_items(self, et, M):
        p = self.p
        return [
            est.AsymptoticItem("eq", et["eq"], M["eq"], 1.0),
            est.AsymptoticItem("bn", et["bn"], M["bn"], 2.0, (p - 1.0) / p),
        ]
