import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pinncert import estimators as est
from pinncert.estimators import AsymptoticItem, BoundInputs, Term

KINDS = {
    "parabolic": ("eq", "in", "bn"),
    "genpar": ("eq", "in", "bn"),
    "hyperbolic": ("eq", "in", "in_U", "in_t", "bn", "bn_t"),
    "elliptic": ("eq", "bn"),
}
FORMS = {
    "parabolic": est.parabolic_bound,
    "genpar": est.genpar_bound,
    "hyperbolic": est.hyperbolic_bound,
    "elliptic": est.elliptic_bound,
}


def inputs(form, norms, p=2.0, q=2.0, T=1.0, extra=None, exponents=None, et=None, quad=None):
    exponents = exponents or {}
    kinds = KINDS[form]
    terms = [Term(k, k, 1.0, exponents.get(k, 1.0)) for k in kinds]
    return BoundInputs(p, q, T, terms, dict(norms), dict(et or {}), dict(quad or {}), dict(extra or {}))


def unit(form, value=0.0):
    return {k: value for k in KINDS[form]}


def test_gronwall_values():
    assert est.gronwall_factor(2, 2, 1) == pytest.approx(math.e - 1, rel=1e-15)
    assert est.gronwall_factor(4, 4, 1) == pytest.approx(4 * (math.e ** 3 - 1) / 12, rel=1e-14)
    assert est.gronwall_factor(4, 4, 1) == pytest.approx(6.362, abs=1e-3)


@pytest.mark.parametrize("T", [1e-6, 1e-8])
@pytest.mark.parametrize("pq", [(2, 2), (3, 1.5), (4.5, 4.5)])
def test_gronwall_small_time(T, pq):
    assert est.gronwall_factor(*pq, T) / T == pytest.approx(1.0, rel=1e-4)
    assert est.gronwall_factor(*pq, 1e-8) == pytest.approx(1e-8, rel=1e-6)


@pytest.mark.parametrize("args", [(1, 2, 1), (0.5, 2, 1), (2, 0.5, 1), (2, 2, 0)])
def test_gronwall_domain(args):
    with pytest.raises(ValueError):
        est.gronwall_factor(*args)


@pytest.mark.parametrize("form", sorted(FORMS))
def test_zero_inputs_give_zero(form):
    extra = {"R": 1.0} if form == "genpar" else {}
    assert FORMS[form](inputs(form, unit(form), extra=extra)).value == 0.0


def test_parabolic_unit_constant():
    c = est.parabolic_bound(inputs("parabolic", {"eq": 1.0, "in": 0.0, "bn": 0.0}))
    assert c.value == pytest.approx(math.e - 1, rel=1e-15)
    assert c.C == 1.0


def test_parabolic_lambda_wrap():
    c = est.parabolic_bound(inputs("parabolic", unit("parabolic", 0.25), q=3.0, p=2.5,
                                   extra={"lambda": 0.3}))
    G = est.gronwall_factor(2.5, 3.0, 1.0)
    assert c.value == pytest.approx(0.75 ** (3 / 2.5) * G * math.exp(0.9), rel=1e-14)


def test_missing_term_is_named():
    bi = inputs("parabolic", unit("parabolic"))
    bi.terms = [t for t in bi.terms if t.kind != "bn"]
    with pytest.raises(ValueError, match="bn"):
        est.parabolic_bound(bi)


def test_missing_norm_is_named():
    bi = inputs("parabolic", {"eq": 1.0, "in": 1.0})
    with pytest.raises(KeyError, match="bn"):
        est.parabolic_bound(bi)


def test_hyperbolic_needs_h_norm_term():
    bi = inputs("hyperbolic", unit("hyperbolic"))
    bi.terms = [t for t in bi.terms if t.kind != "in_U"]
    with pytest.raises(ValueError, match="in_U"):
        est.hyperbolic_bound(bi)


def test_training_with_zero_quad_equals_exact_on_training_errors():
    et = {"eq": 0.3, "in": 0.02, "bn": 0.5}
    tr = est.parabolic_training_bound(inputs("parabolic", {}, et=et, quad=unit("parabolic")))
    ex = est.parabolic_bound(inputs("parabolic", et))
    assert tr.value == ex.value


def test_training_needs_quad_bounds():
    with pytest.raises(KeyError, match="quadrature"):
        est.parabolic_training_bound(inputs("parabolic", {}, et=unit("parabolic"), quad={"eq": 0.0}))


def test_training_dominates_under_quadrature_sandwich():
    rng = np.random.default_rng(0)
    for _ in range(50):
        norms = {k: float(rng.uniform(0, 2)) for k in KINDS["parabolic"]}
        quad = {k: float(rng.uniform(0, 0.5)) for k in norms}
        # any training error within the quadrature bound of the true norm
        et = {k: max(norms[k] + float(rng.uniform(-1, 1)) * quad[k], 0.0) for k in norms}
        ex = est.parabolic_bound(inputs("parabolic", norms, exponents={"bn": 0.5}))
        tr = est.parabolic_bound(inputs("parabolic", {}, et=et, quad=quad, exponents={"bn": 0.5}), training=True)
        assert tr.value >= ex.value * (1 - 1e-14)


def test_genpar_maxwell_factor_and_unit_case():
    for e1, e2 in ((2.0, 3.0), (1.0, 1.0)):
        m = min(e1, e2)
        c = est.genpar_bound(inputs("genpar", {"eq": 1.0, "in": 0.0, "bn": 0.0}, extra={"R": 1 / m}))
        assert c.factor == pytest.approx(m * (math.exp(1 / m) - 1), rel=1e-14)
    assert c.value == pytest.approx(math.e - 1, rel=1e-14)
    with pytest.raises(ValueError):
        est.genpar_bound(inputs("genpar", unit("genpar"), extra={"R": 0.0}))


def test_hyperbolic_wraps():
    c = est.hyperbolic_bound(inputs("hyperbolic", {**unit("hyperbolic"), "eq": 1.0}, extra={"lambda_A": 1.0}))
    assert c.value == pytest.approx((math.e ** 2 - 1) / 2 * math.e ** 2, rel=1e-14)
    c2 = est.hyperbolic_bound(inputs("hyperbolic", {**unit("hyperbolic"), "eq": 1.0}, T=0.5,
                                     extra={"lambda_F": 36 * 0.5 * 1.5 ** 2}))
    assert c2.factor == pytest.approx((math.e - 1) / 2 * math.exp(36 * 0.5 * 2.25), rel=1e-14)


def test_elliptic_unit_case():
    norms = {"eq": 1.0, "bn": 0.0}
    bi = inputs("elliptic", norms)
    bi.terms = [Term("eq", "eq", 1 / 2), Term("bn", "bn", 1.0)]
    assert est.elliptic_bound(bi).value == pytest.approx(1.0, rel=1e-15)


def test_breakdown_sums_to_constant():
    rng = np.random.default_rng(3)
    norms = {k: float(rng.uniform(0, 1)) for k in KINDS["hyperbolic"]}
    bi = inputs("hyperbolic", norms, exponents={"bn": 0.5, "bn_t": 0.5})
    bi.terms.append(Term("bn", "in", 0.7))  # labels may merge several kinds
    c = est.hyperbolic_bound(bi)
    assert math.fsum(c.breakdown.values()) == pytest.approx(c.C, rel=1e-10)
    assert set(c.breakdown) == set(KINDS["hyperbolic"])


@settings(max_examples=60, deadline=None)
@given(form=st.sampled_from(sorted(FORMS)), seed=st.integers(0, 2 ** 31), bump=st.floats(1e-6, 1.0))
def test_bounds_monotone_and_nonnegative(form, seed, bump):
    rng = np.random.default_rng(seed)
    norms = {k: float(rng.uniform(0, 1)) for k in KINDS[form]}
    extra = {"R": 0.5} if form == "genpar" else {"lambda": 0.1, "lambda_A": 0.1}
    exps = {k: float(rng.choice([0.5, 1.0])) for k in norms}
    base = FORMS[form](inputs(form, norms, extra=extra, exponents=exps)).value
    assert base >= 0
    for k in norms:
        up = dict(norms)
        up[k] += bump
        assert FORMS[form](inputs(form, up, extra=extra, exponents=exps)).value >= base


def test_doubling_eq_increases_parabolic():
    a = est.parabolic_bound(inputs("parabolic", unit("parabolic", 0.1))).value
    b = est.parabolic_bound(inputs("parabolic", {**unit("parabolic", 0.1), "eq": 0.2})).value
    assert b > a


def test_negative_norm_rejected():
    with pytest.raises(ValueError):
        est.parabolic_bound(inputs("parabolic", {**unit("parabolic"), "eq": -1.0}))


def test_pq_domain():
    with pytest.raises(ValueError):
        est.parabolic_bound(inputs("parabolic", unit("parabolic"), p=1.0))
    with pytest.raises(ValueError):
        est.elliptic_bound(inputs("elliptic", unit("elliptic"), q=0.5))


def test_asymptotic_heat_shape():
    p = 3.0
    et = {"eq": 0.1, "in": 0.01, "bn": 0.2}
    M = {"eq": 4096, "in": 1024, "bn": 1024}
    items = [AsymptoticItem("eq", et["eq"], M["eq"], 1.0), AsymptoticItem("in", et["in"], M["in"], 2.0),
             AsymptoticItem("bn", et["bn"], M["bn"], 2.0, (p - 1) / p)]
    v, bd = est.asymptotic_bound(items)
    expect = 0.1 + 1 / 4096 + 0.01 + 1024 ** -2 + (0.2 + 1024 ** -2) ** (2 / 3)
    assert v == pytest.approx(expect, rel=1e-14)
    assert set(bd) == {"eq", "in", "bn"}


def test_asymptotic_limit_is_zero():
    items = [AsymptoticItem("eq", 0.0, 10 ** 12, 2 / 3), AsymptoticItem("bn", 0.0, 10 ** 12, 1.0, 0.5)]
    assert est.asymptotic_bound(items)[0] < 1e-5
    with pytest.raises(ValueError):
        est.asymptotic_bound([AsymptoticItem("eq", -1.0, 4, 1.0)])
