import numpy as np
import pytest

from pinncert import net
from pinncert import tape as tp
from pinncert.jets import IndexSet


def fd_grad(params, loss_fn, h=1e-5):
    th = params.flatten()
    out = np.zeros_like(th)
    for i in range(th.size):
        e = np.zeros_like(th)
        e[i] = h
        lp = net.value_and_grad(params.with_vector(th + e), loss_fn)[0]
        lm = net.value_and_grad(params.with_vector(th - e), loss_fn)[0]
        out[i] = (lp - lm) / (2 * h)
    return out


def test_square_of_scalar_parameter():
    t = tp.Tape()
    th = t.leaf(3.0, "theta", param=True)
    loss = th * th
    g = t.backward(loss)
    assert float(loss.value) == 9.0
    assert float(g[th.index]) == 6.0


def test_constant_leaves_get_no_gradient():
    t = tp.Tape()
    th = t.leaf(2.0, "theta", param=True)
    c = t.leaf(5.0)
    g = t.backward(th * c + c)
    assert float(g[th.index]) == 5.0
    assert g[c.index] is None


def test_arithmetic_ops():
    t = tp.Tape()
    a = t.leaf(np.array([1.0, 2.0]), param=True)
    b = t.leaf(np.array([3.0, -1.0]), param=True)
    r = (a - b) * a + 2.0 - (-b) + a ** 3
    loss = tp.lp_sum(r, 2.0, 0.5)
    g = t.backward(loss)
    av, bv = a.value, b.value
    rv = (av - bv) * av + 2.0 + bv + av ** 3
    assert np.allclose(g[a.index], rv * (2 * av - bv + 3 * av ** 2))
    assert np.allclose(g[b.index], rv * (-av + 1))


def test_replay_is_bitwise():
    params = net.init_mlp([2, 4, 4, 1], 3)
    iset = IndexSet.total(2, 3)
    xc = net.input_jets(np.random.default_rng(0).uniform(-1, 1, (9, 2)), iset)
    t = tp.Tape()
    pn = net.param_nodes(t, params)
    out = net.forward_tape(t, pn, xc, iset)
    r = tp.coeff(out, iset.pos[(2, 1)], 2.0, 0)
    tp.lp_sum(r, 2.0, 1.0)
    again = t.replay()
    for n, v in zip(t.nodes, again):
        assert np.array_equal(n.value, v)


@pytest.mark.parametrize("seed", range(20))
def test_param_grad_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    nin = int(rng.integers(1, 4))
    w = int(rng.integers(2, 5))
    nout = int(rng.integers(1, 3))
    params = net.init_mlp([nin, w, w, nout], seed)
    assert params.n_params <= 100
    params = params.with_vector(params.flatten() + 0.1 * rng.standard_normal(params.n_params))
    iset = IndexSet.total(nin, 2 if nin == 3 else 3)
    pts = rng.uniform(-1, 1, (5, nin))
    xc = net.input_jets(pts, iset)
    top = max(iset.indices, key=sum)
    k_out = nout - 1

    def loss(t, pn):
        out = net.forward_tape(t, pn, xc, iset)
        a = tp.coeff(out, iset.pos[top], float(iset.factorials[iset.pos[top]]), k_out)
        b = tp.coeff(out, 0, 1.0, 0)
        return tp.total([tp.lp_sum(a * b + a, 2.0, 0.7), tp.lp_sum(b, 3.0, 1.3)])

    _, g = net.value_and_grad(params, loss)
    fd = fd_grad(params, loss)
    assert np.max(np.abs(g - fd)) <= 1e-5 * max(1.0, np.max(np.abs(fd)))


def test_sum_of_squared_outputs_matches_finite_differences():
    params = net.init_mlp([1, 4, 4, 1], 11)
    x = np.array([[0.3]])
    iset = IndexSet.total(1, 0)
    xc = net.input_jets(x, iset)

    def loss(t, pn):
        return tp.lp_sum(tp.coeff(net.forward_tape(t, pn, xc, iset), 0, 1.0, 0), 2.0, 1.0)

    _, g = net.value_and_grad(params, loss)
    fd = fd_grad(params, loss, 1e-4)
    assert np.max(np.abs(g - fd) / np.maximum(np.abs(fd), 1e-8)) < 1e-5 or np.allclose(g, fd, atol=1e-10)


def test_unused_parameter_gets_exact_zero():
    params = net.init_mlp([1, 3, 3, 2], 5)
    iset = IndexSet.total(1, 1)
    xc = net.input_jets(np.array([[0.2], [0.5]]), iset)

    def loss(t, pn):
        return tp.lp_sum(tp.coeff(net.forward_tape(t, pn, xc, iset), 1, 1.0, 0), 2.0, 1.0)

    _, g = net.value_and_grad(params, loss)
    gp = params.with_vector(g)
    assert np.all(gp.weights[-1][1] == 0.0)
    assert gp.biases[-1][1] == 0.0
    assert gp.biases[-1][0] == 0.0  # bias has no input derivative


def test_gradient_is_deterministic():
    params = net.init_mlp([2, 5, 5, 1], 2)
    iset = IndexSet.total(2, 2)
    xc = net.input_jets(np.random.default_rng(4).uniform(-1, 1, (30, 2)), iset)

    def loss(t, pn):
        return tp.lp_sum(tp.coeff(net.forward_tape(t, pn, xc, iset), iset.pos[(0, 2)], 2.0, 0), 2.0, 1.0)

    g1 = net.value_and_grad(params, loss)[1]
    g2 = net.value_and_grad(params, loss)[1]
    assert np.array_equal(g1, g2)


def test_nan_forward_names_first_node():
    params = net.init_mlp([1, 3, 3, 1], 0)
    iset = IndexSet.total(1, 1)
    xc = net.input_jets(np.array([[np.nan]]), iset)

    def loss(t, pn):
        return tp.lp_sum(tp.coeff(net.forward_tape(t, pn, xc, iset), 0, 1.0, 0), 2.0, 1.0)

    with pytest.raises(tp.PoisonedGradient, match="input_jet"):
        net.value_and_grad(params, loss)


def test_pow_requires_positive_integer():
    t = tp.Tape()
    a = t.leaf(1.0, param=True)
    with pytest.raises(ValueError):
        a ** 0.5
