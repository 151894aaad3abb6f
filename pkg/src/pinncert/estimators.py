"""Generic a posteriori bound forms.

Each problem assembles a list of labelled :class:`Term` objects making up
the constant C (or its training counterpart, where every residual norm is
replaced by the training error plus its quadrature bound). The forms below
only multiply C by the appropriate Gronwall-type factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Term:
    """``coef * norm[kind] ** exponent`` with norms kept p-powered."""

    label: str
    kind: str
    coef: float
    exponent: float = 1.0


@dataclass
class BoundInputs:
    p: float
    q: float
    T: float
    terms: list
    residual_norms: dict = field(default_factory=dict)
    training_errors: dict = field(default_factory=dict)
    quad_bounds: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def norms(self, training: bool) -> dict:
        if not training:
            return dict(self.residual_norms)
        out = {}
        for k, e in self.training_errors.items():
            if k not in self.quad_bounds:
                raise KeyError(f"missing quadrature bound for residual {k!r}")
            out[k] = e + self.quad_bounds[k]
        return out


@dataclass
class Certificate:
    form: str
    value: float
    C: float
    factor: float
    breakdown: dict


def _assemble(inputs: BoundInputs, training: bool, required: tuple) -> tuple:
    kinds = {t.kind for t in inputs.terms}
    missing = [k for k in required if k not in kinds]
    if missing:
        raise ValueError(f"bound is missing terms for residuals {missing}")
    norms = inputs.norms(training)
    breakdown = {}
    for t in inputs.terms:
        if t.kind not in norms:
            raise KeyError(f"no norm for residual {t.kind!r}")
        n = norms[t.kind]
        if n < 0:
            raise ValueError(f"negative norm for residual {t.kind!r}")
        breakdown[t.label] = breakdown.get(t.label, 0.0) + t.coef * n ** t.exponent
    return math.fsum(breakdown.values()), breakdown


def gronwall_factor(p: float, q: float, T: float) -> float:
    """``p (exp(q (p-1) T / p) - 1) / (q (p-1))``; tends to T as T -> 0."""
    if not p > 1 or q < 1 or not T > 0:
        raise ValueError(f"need p > 1, q >= 1, T > 0, got p={p}, q={q}, T={T}")
    a = q * (p - 1) / p
    return math.expm1(a * T) / a


def _check_pq(p, q):
    if not p > 1 or q < 1:
        raise ValueError(f"need p > 1 and q >= 1, got p={p}, q={q}")


def parabolic_bound(inputs: BoundInputs, training: bool = False) -> Certificate:
    """``C**(q/p) * G(p, q, T) * exp(q * lambda)``."""
    p, q = inputs.p, inputs.q
    _check_pq(p, q)
    C, bd = _assemble(inputs, training, ("eq", "in", "bn"))
    lam = inputs.extra.get("lambda", 0.0)
    factor = gronwall_factor(p, q, inputs.T) * math.exp(q * lam)
    return Certificate("parabolic", C ** (q / p) * factor, C, factor, bd)


def parabolic_training_bound(inputs: BoundInputs) -> Certificate:
    return parabolic_bound(inputs, training=True)


def genpar_bound(inputs: BoundInputs, training: bool = False) -> Certificate:
    """``C * (exp(R (p-1) T) - 1) / (R (p-1)) * exp(p * lambda)``."""
    p = inputs.p
    _check_pq(p, inputs.q)
    R = inputs.extra["R"]
    if R <= 0:
        raise ValueError("R must be positive")
    C, bd = _assemble(inputs, training, ("eq", "in", "bn"))
    a = R * (p - 1)
    factor = math.expm1(a * inputs.T) / a * math.exp(p * inputs.extra.get("lambda", 0.0))
    return Certificate("genpar", C * factor, C, factor, bd)


def hyperbolic_bound(inputs: BoundInputs, training: bool = False) -> Certificate:
    """``C * (exp(2T) - 1) / 2 * exp(2 lambda_A + lambda_F)``; C includes H-norm initial terms."""
    C, bd = _assemble(inputs, training, ("eq", "in", "in_U", "in_t", "bn", "bn_t"))
    lam = 2.0 * inputs.extra.get("lambda_A", 0.0) + inputs.extra.get("lambda_F", 0.0)
    factor = math.expm1(2.0 * inputs.T) / 2.0 * math.exp(lam)
    return Certificate("hyperbolic", C * factor, C, factor, bd)


def elliptic_bound(inputs: BoundInputs, training: bool = False) -> Certificate:
    """``p**(q/p) * C**(q/p)`` with ``C = gamma*rho + Lambda**p * N_eq / p``.

    The problem supplies the ``Lambda**p / p`` coefficient as the eq term.
    """
    p, q = inputs.p, inputs.q
    _check_pq(p, q)
    C, bd = _assemble(inputs, training, ("eq", "bn"))
    factor = p ** (q / p)
    return Certificate("elliptic", factor * C ** (q / p), C, factor, bd)


@dataclass(frozen=True)
class AsymptoticItem:
    kind: str
    error: float
    M: int
    alpha: float
    exponent: float = 1.0


def asymptotic_bound(items) -> tuple:
    """Unit-constant estimate ``sum (E_T + M**-alpha)**exponent`` and its breakdown."""
    bd = {}
    for it in items:
        if it.M < 1 or it.error < 0:
            raise ValueError(f"bad asymptotic item {it}")
        bd[it.kind] = bd.get(it.kind, 0.0) + (it.error + it.M ** (-it.alpha)) ** it.exponent
    return math.fsum(bd.values()), bd
