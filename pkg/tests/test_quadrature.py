import math

import numpy as np
import pytest

from morreylab.quadrature import kernel_moment, product_weights, singular_convolve


def graded(K, g=2.0, t=1.0):
    return t * (np.arange(1, K + 1) / K) ** g


def scalar_applier(a):
    def apply(tau, x):
        return x * tau ** (-a) if tau > 0 else (x if a == 0.0 else math.inf)

    return apply


def test_constant_data_identity_applier():
    nodes = graded(100, 1.0)
    val = singular_convolve([2.5] * 100, nodes, 1.0, 0.0, 0.0, lambda tau, g: g)
    assert val == pytest.approx(2.5, abs=1e-14)


def test_beta_half_half():
    nodes = graded(128)
    samples = nodes**-0.5
    val = singular_convolve(samples, nodes, 1.0, 0.5, 0.5, scalar_applier(0.5))
    assert val == pytest.approx(math.pi, abs=1e-3)


def test_sqrt_singularity():
    nodes = graded(512)
    val = singular_convolve(np.ones(512), nodes, 1.0, 0.5, 0.0, scalar_applier(0.5))
    assert val == pytest.approx(2.0, abs=1e-6)


def test_general_beta_against_quadrature():
    """Exactness on data matching the modelled singular profile."""
    from scipy.special import beta as beta_fn

    for a, b in ((0.3, 0.6), (0.0, 0.9), (0.8, 0.0)):
        nodes = graded(96)
        samples = nodes ** (-b) if b > 0 else np.ones(96)
        val = singular_convolve(samples, nodes, 1.0, a, b, scalar_applier(a))
        assert val == pytest.approx(beta_fn(1 - a, 1 - b), rel=1e-10)


def test_kernel_moment_matches_quad():
    from scipy.integrate import quad

    for (a, b, k, lo, hi) in ((0.5, 0.25, 0, 0.1, 0.7), (0.2, 0.8, 1, 0.0, 1.0)):
        want, _ = quad(lambda s: (1 - s) ** -a * s ** (k - b), lo, hi)
        assert kernel_moment(1.0, a, b, k, lo, hi) == pytest.approx(want, rel=1e-9)


def test_weights_validation():
    with pytest.raises(ValueError):
        product_weights([0.5, 0.4, 1.0], 1.0, 0.0, 0.0)  # not increasing
    with pytest.raises(ValueError):
        product_weights([0.5, 1.0], 2.0, 0.0, 0.0)  # last node != t
    with pytest.raises(ValueError):
        product_weights([0.5, 1.0], 1.0, 1.0, 0.0)  # a >= 1
    with pytest.raises(ValueError):
        product_weights([0.0, 1.0], 1.0, 0.0, 0.5)  # zero node with b > 0
    with pytest.raises(ValueError):
        product_weights([0.5, 1.0], 1.0, 0.5, 0.0, top="midpoint")


def test_envelope_never_hits_zero_tau():
    nodes = graded(32)
    w = product_weights(nodes, 1.0, 0.5, 0.0)
    assert w[-1] == 0.0
    called = []

    def applier(tau, x):
        called.append(tau)
        assert tau > 0
        return x

    singular_convolve(np.ones(32), nodes, 1.0, 0.5, 0.0, applier)
    assert min(called) > 0


def test_identity_top_weight_is_positive():
    nodes = graded(32)
    w_env = product_weights(nodes, 1.0, 0.4, 0.0)
    w_id = product_weights(nodes, 1.0, 0.4, 0.0, top="identity")
    assert w_env[-1] == 0.0 and w_id[-1] > 0.0
    # the envelope rule stays exact on the matching singular profile
    val_env = singular_convolve(np.ones(32), nodes, 1.0, 0.4, 0.0, scalar_applier(0.4))
    assert val_env == pytest.approx(1.0 / 0.6, rel=1e-6)


def test_single_node_edge():
    # a > 0 with one node: the initial-layer contribution is dropped
    assert product_weights([1.0], 1.0, 0.5, 0.0)[0] == 0.0
    # a = 0 with one node: constant extension over the whole interval
    w = product_weights([1.0], 1.0, 0.0, 0.0)
    assert w[0] == pytest.approx(1.0)


def test_zero_node_allowed_for_bounded_data():
    nodes = np.concatenate([[0.0], graded(16)])
    val = singular_convolve(np.ones(17), nodes, 1.0, 0.0, 0.0, lambda tau, x: x)
    assert val == pytest.approx(1.0, abs=1e-14)


def test_grid_function_payloads():
    from morreylab.grids import GridFunction

    base = GridFunction.constant(1.0, 1, 16, 1.0)
    nodes = graded(8, 1.0, 0.5)
    out = singular_convolve([base] * 8, nodes, 0.5, 0.0, 0.0, lambda tau, g: g)
    assert np.allclose(out.values, 0.5)
