import math

import numpy as np
import pytest

import probe
from pinncert import estimators as est
from pinncert import net, problems, quad
from pinncert.problems.base import ResidualReport

ALL = sorted(problems.REGISTRY)
ORDERS = {"heat": 2, "kdv": 3, "maxwell": 1, "boussinesq": 4, "rayleigh": 2, "poisson": 2}


def make(name, p=2.0, **kw):
    return problems.make(name, p, **kw)


def zero_params(prob, widths=(4, 4)):
    p = net.init_mlp((prob.input_size(),) + widths + (prob.n_out,), 0)
    return p.with_vector(np.zeros(p.n_params))


def fake_report(prob, value=0.0, sup=1.0):
    z = {k: value for k in prob.kinds}
    return ResidualReport(dict(z), dict(z), {}, dict.fromkeys(prob.kinds, 0.0), dict.fromkeys(prob.kinds, 0.0),
                          {n: sup for n in prob.sup_requests()})


def certificate(prob, rep, norms=None):
    terms, extra, form = prob.bound_inputs(rep)
    norms = norms if norms is not None else {k: rep.eval_values[k] + rep.quad_eval[k] for k in prob.kinds}
    bi = est.BoundInputs(prob.p, prob.q, prob.T, terms, norms, dict(rep.training_errors), dict(rep.quad_train),
                         extra)
    return form(bi), form(bi, training=True), extra


def test_registry_and_unknown_name():
    assert ALL == ["boussinesq", "heat", "kdv", "maxwell", "poisson", "rayleigh"]
    with pytest.raises(ValueError, match="heat"):
        problems.get("navier-stokes")


def test_exact_values():
    assert make("heat").exact_solution([[0.0, math.sqrt(2)]])[0] == pytest.approx(2 ** -0.25, rel=1e-14)
    assert make("kdv").exact_solution([[0.0, 0.0]])[0] == pytest.approx(-0.5, abs=1e-15)
    pz = make("poisson")
    assert pz.exact_solution([[0.0, 0.0]])[0] == 0.0
    assert pz.exact_solution([[1.0, 1.0]])[0] == -2.0
    mx = make("maxwell").exact_solution([[0.0, 0.5, 0.5]])
    assert mx.shape == (1, 3)
    assert mx[0, 0] == pytest.approx(1.0, rel=1e-14)


@pytest.mark.parametrize("name", ALL)
def test_points_outside_domain(name):
    pr = make(name)
    pt = [b + 1.0 for _, b in pr.box]
    with pytest.raises(ValueError):
        pr.exact_solution([pt])


@pytest.mark.parametrize("name", ALL)
def test_exact_solution_has_zero_residual(name):
    sups = probe.residual_sups(make(name), "exact", n=1000, seed=1)
    assert max(sups.values()) < 1e-8, sups


@pytest.mark.parametrize("name", ALL)
def test_required_jet_order(name):
    pr = make(name)
    ders = pr._derivs_by_face()
    assert max(max(sum(d) for d in ds) for ds in ders.values()) == ORDERS[name]


def test_heat_zero_network_eq_residual_vanishes():
    pr = make("heat")
    sups = probe.residual_sups(pr, zero_params(pr), n=200)
    assert sups["eq:0"] == 0.0
    assert sups["in:1"] > 0


def test_maxwell_zero_network_initial_residual():
    pr = make("maxwell")
    sites = probe.probe_sites(pr, 300, 2)
    pc = next(p for p in pr.pieces() if p.kind == "in")
    comps = pr.piece_components(pc, sites, zero_params(pr))
    pts = sites[(pc.kind, pc.faces[0])].points
    u10 = np.sin(np.pi * pts[:, 1]) * np.sin(np.pi * pts[:, 2])
    assert np.allclose(comps[0], -u10, atol=1e-15)
    assert np.all(comps[1] == 0) and np.all(comps[2] == 0)


@pytest.mark.parametrize("name,p,q", [("kdv", 3.0, 3.0), ("poisson", 1.5, 1.5), ("poisson", 2.0, 3.0),
                                      ("maxwell", 3.0, 3.0), ("heat", 1.5, 2.0)])
def test_exponent_guards(name, p, q):
    with pytest.raises(ValueError):
        problems.make(name, p, q)


def test_kdv_allows_two_and_above_three():
    problems.make("kdv", 2.0)
    problems.make("kdv", 3.5)


def test_poisson_pi_tr_must_be_positive():
    with pytest.raises(ValueError):
        make("poisson", pi_tr=0.0)


@pytest.mark.parametrize("name", ALL)
def test_zero_residuals_give_zero_certificates(name):
    pr = make(name)
    exact, training, _ = certificate(pr, fake_report(pr))
    assert exact.value == 0.0 and training.value == 0.0


def test_heat_eq_only_certificate():
    pr = make("heat", 3.0)
    rep = fake_report(pr)
    rep.eval_values["eq"] = 0.2
    exact, _, _ = certificate(pr, rep)
    assert exact.value == pytest.approx(0.2 ** (3 / 3) * est.gronwall_factor(3, 3, 1.0), rel=1e-14)


def test_heat_boundary_coefficient():
    p = 2.0
    pr = make("heat", p)
    rep = fake_report(pr, sup=0.0)
    rep.sups["ux_net"], rep.sups["ux_exact"] = 3.0, 5.0
    terms, _, _ = pr.bound_inputs(rep)
    (bn,) = [t for t in terms if t.kind == "bn"]
    phi1 = 4.0 * math.sin(1.0)
    assert bn.coef == pytest.approx(2 * p * (2 * 1.0) ** (1 / p) * phi1 * 5.0, rel=1e-14)
    assert bn.exponent == pytest.approx((p - 1) / p)


def test_rayleigh_wrap():
    pr = make("rayleigh")
    rep = fake_report(pr)
    rep.eval_values["eq"] = 1.0
    exact, _, _ = certificate(pr, rep)
    assert exact.value == pytest.approx((math.e ** 2 - 1) / 2 * math.e ** 2, rel=1e-14)


def test_maxwell_factor():
    pr = make("maxwell")
    rep = fake_report(pr)
    rep.eval_values["eq"] = 1.0
    exact, _, _ = certificate(pr, rep)
    assert exact.factor == pytest.approx(2 * (math.exp(0.5) - 1), rel=1e-14)


def test_boussinesq_exponent_in_wrap():
    pr = make("boussinesq")
    rep = fake_report(pr, sup=0.0)
    rep.eval_values["eq"] = 1.0
    for name in rep.sups:
        rep.sups[name] = 0.5
    exact, _, extra = certificate(pr, rep)
    c2 = extra["lambda_F"] / 36.0
    assert c2 >= 0.25
    assert exact.factor == pytest.approx((math.e ** 2 - 1) / 2 * math.exp(extra["lambda_F"]), rel=1e-14)


@pytest.mark.parametrize("p,pt", [(2.0, 1.0), (3.0, 0.7), (4.5, 1.3)])
def test_poisson_eq_coefficient(p, pt):
    pr = make("poisson", p, pi_tr=pt)
    rep = fake_report(pr)
    rep.eval_values["eq"] = 0.4
    exact, _, _ = certificate(pr, rep)
    stated = pt ** p * p ** (2 * p) / (2 ** p * (p - 1) ** p)
    assert exact.value == pytest.approx((stated * 0.4) ** (pr.q / p), rel=1e-13)


@pytest.mark.parametrize("name", ALL)
def test_breakdown_sums(name):
    pr = make(name)
    rep = fake_report(pr, 0.1, 0.3)
    for cert in certificate(pr, rep)[:2]:
        assert math.fsum(cert.breakdown.values()) == pytest.approx(cert.C, rel=1e-10)


@pytest.mark.parametrize("name", ALL)
def test_true_error_of_exact_is_zero(name):
    pr = make(name)
    assert pr.true_error(None, (4,) * pr.nvars, "exact") == 0.0


def test_true_error_constant_offset():
    pr = make("heat")
    delta = 0.01
    pr.network_values = lambda params, pts: (pr.exact_solution(pts) + delta)[:, None]
    assert pr.true_error(None, (16, 16)) == pytest.approx(delta ** 2 * 1.0 * 1.0, rel=1e-10)


def test_true_error_axis_relabel():
    pr = make("poisson")
    params = net.init_mlp((4, 5, 5, 1), 3)
    E = pr.true_error(params, (8, 8))
    swapped = make("poisson")
    base = swapped.network_values
    swapped.network_values = lambda prm, pts: base(prm, pts[:, ::-1])
    swapped.exact_solution = lambda pts, ex=pr.exact_solution: ex(pts[:, ::-1])
    assert swapped.true_error(params, (8, 8)) == pytest.approx(E, rel=1e-12)


@pytest.mark.parametrize("name", ALL)
def test_training_errors_match_tape_loss(name):
    pr = make(name)
    M = {k: 64 if (k == "eq" or pr.nvars == 3) else 8 for k in pr.kinds}
    sites = pr.layout(M)
    params = net.init_mlp((pr.input_size(), 4, 4, pr.n_out), 1)
    et = pr.training_errors(params, sites)
    assert set(et) == set(pr.kinds)
    assert all(v >= 0 and math.isfinite(v) for v in et.values())
    loss, _ = net.value_and_grad(params, pr.loss_fn(sites, {}))
    assert loss == pytest.approx(math.fsum(et.values()), rel=1e-12)


@pytest.mark.parametrize("name", ALL)
def test_exact_training_errors_vanish(name):
    pr = make(name)
    M = {k: 64 if (k == "eq" or pr.nvars == 3) else 8 for k in pr.kinds}
    et = pr.training_errors(None, pr.layout(M), "exact")
    assert max(et.values()) < 1e-20


def test_poisson_grids_avoid_axes():
    pr = make("poisson")
    sites = pr.layout({"eq": 64, "bn": 8})
    assert np.all(np.abs(sites[("eq", ())].points) > 0)


@pytest.mark.parametrize("name", ["heat", "kdv", "rayleigh"])
def test_quad_bound_dominates_eval_gap(name):
    """The certified bound covers the gap between a coarse and a much finer midpoint value."""
    pr = make(name)
    params = net.init_mlp((pr.input_size(), 4, 4, pr.n_out), 2)
    M = {k: 256 if k == "eq" else 16 for k in pr.kinds}
    coarse = pr.layout(M)
    fine = pr.layout(M, 8)
    c2 = pr.residual_c2(params, pr.dense_layout(M, 4))
    qb = pr.quad_bounds(c2, coarse)
    a, b = pr.training_errors(params, coarse), pr.training_errors(params, fine)
    for k in pr.kinds:
        assert abs(a[k] - b[k]) <= qb[k] * 1.05 + 1e-14


def test_sups_cover_exact_and_net():
    pr = make("heat")
    params = net.init_mlp((2, 4, 4, 1), 0)
    s = pr.sups(params, {"eq": 64, "in": 8, "bn": 8}, 2, 64)
    assert set(s) == {"ux_net", "ux_exact"}
    # u_x of the exact solution at (0, 1) is pi / ln 2
    assert s["ux_exact"] == pytest.approx(math.pi / math.log(2), rel=1e-12)
    g = quad.midpoint_grid(pr.box, (8, 8))
    assert g.M == 64
