import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import polyoracle as po
from pinncert import quad
from pinncert.jets import IndexSet, Jet
from pinncert import jets as J


def test_one_axis_two_cells():
    g = quad.midpoint_grid([(0, 1)], (2,))
    assert g.points[:, 0].tolist() == [0.25, 0.75]


def test_square_four_centers():
    g = quad.midpoint_grid([(-1, 1), (-1, 1)], (2, 2))
    assert sorted(map(tuple, g.points)) == [(-0.5, -0.5), (-0.5, 0.5), (0.5, -0.5), (0.5, 0.5)]


def test_cell_volume():
    g = quad.midpoint_grid([(1, 2), (0, 1)], (4, 4))
    assert g.cell_volume == 1 / 16
    assert g.M == 16


def test_int_count_uses_per_axis_root():
    g = quad.midpoint_grid([(0, 1)] * 3, 4096)
    assert g.counts == (16, 16, 16)
    with pytest.raises(ValueError):
        quad.midpoint_grid([(0, 1)] * 3, 1000 + 1)


@pytest.mark.parametrize("box", [[], [(1, 1)], [(2, 0)]])
def test_degenerate_boxes(box):
    with pytest.raises(ValueError):
        quad.midpoint_grid(box, (1,) * max(len(box), 1))


def test_constant_one():
    for n in (1, 3, 10):
        g = quad.midpoint_grid([(0, 2)], (n,))
        assert quad.lp_norm_midpoint(np.ones(n), 2.0, g) == pytest.approx(2.0, rel=1e-15)


def test_square_one_point():
    g = quad.midpoint_grid([(0, 1)], (1,))
    v = quad.lp_norm_midpoint(g.points[:, 0] ** 2, 1.0, g)
    assert v == 0.25
    assert quad.midpoint_error_bound([(0, 1)], 1, [2.0]) == pytest.approx(1 / 12, rel=1e-15)
    assert abs(v - 1 / 3) == pytest.approx(1 / 12, rel=1e-12)


def test_vector_values_sum_components():
    g = quad.midpoint_grid([(0, 1)], (4,))
    x = g.points[:, 0]
    single = quad.lp_norm_midpoint(x, 3.0, g)
    vec = quad.lp_norm_midpoint(np.stack([x, np.zeros_like(x)], axis=1), 3.0, g)
    assert vec == single


def test_value_count_checked():
    g = quad.midpoint_grid([(0, 1)], (4,))
    with pytest.raises(ValueError):
        quad.lp_norm_midpoint(np.ones(3), 2.0, g)


def test_linear_bound_is_zero_and_scales():
    assert quad.midpoint_error_bound([(0, 3)], 5, [0.0]) == 0.0
    b1 = quad.midpoint_error_bound([(0, 3)], 5, [1.5])
    b2 = quad.midpoint_error_bound([(0, 3)], 10, [1.5])
    assert b1 / b2 == pytest.approx(4.0, rel=1e-14)


def test_bound_validation():
    with pytest.raises(ValueError):
        quad.midpoint_error_bound([(0, 1)], 4, [-1.0])
    with pytest.raises(ValueError):
        quad.midpoint_error_bound([(0, 1), (0, 1)], 8, [1.0, 1.0])
    with pytest.raises(ValueError):
        quad.midpoint_error_bound([(0, 1)], 4, [1.0, 1.0])


def test_grid_bound_matches_isotropic_form():
    box = [(0, 2), (-1, 0.5)]
    g = quad.midpoint_grid(box, (8, 8))
    assert quad.grid_error_bound(g, [1.0, 3.0]) == pytest.approx(
        quad.midpoint_error_bound(box, 64, [1.0, 3.0]), rel=1e-14)


def test_pc2_values():
    assert quad.pc2_bound(2, 1.0) == 4.0
    assert quad.pc2_bound(2, 0.0) == 0.0
    assert quad.pc2_bound(4, 2.0) == 256.0
    with pytest.raises(ValueError):
        quad.pc2_bound(1.5, 1.0)


def test_surrogate_constant():
    g = quad.midpoint_grid([(0, 1)], (10,))
    f = lambda pts, iset: Jet.constant(iset, np.full(len(pts), 5.0))
    assert quad.sup_norm_surrogate(f, g, 0) == 5.0


def test_surrogate_sin_and_cos():
    g = quad.midpoint_grid([(0, 2 * math.pi)], (4000,))

    def f(pts, iset):
        return J.sin(Jet.variable(iset, 0, pts[:, 0]))

    assert abs(quad.sup_norm_surrogate(f, g, 0) - 1.0) < 1e-3
    assert abs(quad.sup_norm_surrogate(f, g, 1) - 1.0) < 1e-3


def test_surrogate_requires_jets():
    g = quad.midpoint_grid([(0, 1)], (3,))
    with pytest.raises(TypeError):
        quad.sup_norm_surrogate(lambda p, s: np.zeros(len(p)), g, 0)


def _midpoint(box, coef, n):
    g = quad.midpoint_grid(box, (n,) * len(box))
    return g, g.cell_volume * math.fsum(po.evaluate(coef, g.points))


def test_polynomial_suite_is_certified():
    bad = []
    for box, coef, n in po.cases(123):
        g, q = _midpoint(box, coef, n)
        exact = po.integral(coef, box)
        bound = quad.midpoint_error_bound(box, g.M, po.second_derivative_sups(coef, box))
        if abs(q - exact) > bound + 1e-12:
            bad.append((box, n, abs(q - exact), bound))
    assert not bad


def test_refinement_does_not_hurt():
    for box, coef, n in po.cases(7, 40):
        exact = po.integral(coef, box)
        e1 = abs(_midpoint(box, coef, n)[1] - exact)
        e2 = abs(_midpoint(box, coef, 2 * n)[1] - exact)
        assert e2 <= e1 + 1e-12


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2 ** 31), p=st.sampled_from([1.0, 2.0, 3.5]))
def test_permutation_invariance(seed, p):
    rng = np.random.default_rng(seed)
    g = quad.midpoint_grid([(0, 1), (0, 2)], (6, 6))
    v = rng.standard_normal(g.M)
    perm = rng.permutation(g.M)
    assert quad.lp_norm_midpoint(v[perm], p, g) == pytest.approx(quad.lp_norm_midpoint(v, p, g), rel=1e-13)


def test_node_points_include_endpoints():
    pts = quad.node_points([(0, 1), (2, 3)], (2, 1))
    assert pts.shape == (6, 2)
    assert {tuple(r) for r in pts} >= {(0.0, 2.0), (1.0, 3.0), (0.5, 2.0)}


def test_total_iset_used_by_surrogate():
    g = quad.midpoint_grid([(0, 1), (0, 1)], (5, 5))
    seen = []

    def f(pts, iset):
        seen.append(iset)
        x, y = Jet.variables(iset, pts)
        return x * y

    assert quad.sup_norm_surrogate(f, g, 2) == pytest.approx(1.0)
    assert seen[0] == IndexSet.total(2, 2)


def test_nan_values_rejected():
    g = quad.midpoint_grid([(0, 1)], (2,))
    with pytest.raises(ValueError):
        quad.lp_norm_midpoint(np.array([1.0, np.nan]), 2.0, g)
