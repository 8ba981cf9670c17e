import math

import numpy as np
import pytest

from morreylab.duhamel import (
    SolverConfig,
    contraction_bound,
    choose_theta,
    evaluate,
    multiply,
    picard_solve,
    sequential_solve,
    time_grid,
)
from morreylab.fixtures import gaussian_bump
from morreylab.grids import GridFunction
from morreylab.indices import MorreyParams, ProblemDims, to_index
from morreylab.potentials import constant_potential, power_law_potential
from morreylab.semigroup import apply_semigroup, laplacian_power_symbol

DIMS = ProblemDims(1, 1, 1.0)
N, L = 256, 8.0


@pytest.fixture(scope="module")
def sym():
    return laplacian_power_symbol(1, N, L, 1)


@pytest.fixture(scope="module")
def bump():
    return gaussian_bump(1, N, L)


def gamma_of(p, ell):
    return to_index(MorreyParams(p, ell), DIMS)


# -- configuration -----------------------------------------------------------------


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(horizon=0.0)
    with pytest.raises(ValueError):
        SolverConfig(horizon=1.0, nodes=8)
    with pytest.raises(ValueError):
        SolverConfig(horizon=1.0, grading=0.5)
    with pytest.raises(ValueError):
        SolverConfig(horizon=1.0, picard_tol=0.0)


def test_time_grid():
    cfg = SolverConfig(horizon=1.0, nodes=16, grading=2.0)
    t = time_grid(cfg)
    assert t[0] == pytest.approx((1 / 16) ** 2)
    assert t[-1] == 1.0
    assert np.all(np.diff(t) > 0)


# -- multiplication ------------------------------------------------------------------


def test_multiply(bump):
    zero = constant_potential(0.0)
    assert np.all(multiply(zero, bump).values == 0.0)
    three = constant_potential(3.0)
    assert np.allclose(multiply(three, bump).values, 3.0 * bump.values)
    other = gaussian_bump(1, 2 * N, L)
    with pytest.raises(ValueError):
        multiply(three.on_grid(1, N, L), other)


def test_multiply_operator_norm_proxy(bump):
    """||V phi||_{M^{z,nu}} <= ||phi||_{M^{w,kappa}} ||V||_{M^{p0,ell0}} (1 + 5%)."""
    from morreylab.norms import holder_product_check

    V = power_law_potential(1.0, 0.5, 1.5)
    table = V.on_grid(1, 4096, 1.0)
    phi = gaussian_bump(1, 4096, 1.0, width=0.3)
    res = holder_product_check(phi, table, 3.0, 0.5, 1.5, 0.75)
    assert res.passed


# -- contraction bound ----------------------------------------------------------------


def direct_c_i(theta, T, d_i, d_gamma, n_t=60, n_z=4000):
    """Independent quadrature oracle for the contraction factor."""
    zs, wz = np.polynomial.legendre.leggauss(n_z)
    zs = 0.5 * (zs + 1.0)
    wz = 0.5 * wz
    best = 0.0
    for t in np.linspace(T / n_t, T, n_t):
        integ = np.sum(wz * np.exp(theta * t * zs) * (1 - zs) ** -d_i * zs**-d_gamma)
        best = max(best, t ** (1 - d_i) * math.exp(-theta * t) * integ)
    return best


@pytest.mark.parametrize("d_i,d_gamma", [(0.0, 0.0), (0.25, 0.1), (0.5, 0.3)])
def test_contraction_bound_dominates_oracle(d_i, d_gamma):
    T = 0.5
    for theta in (1.0, 10.0, 100.0):
        bound = contraction_bound(theta, T, [d_i], d_gamma)[0]
        direct = direct_c_i(theta, T, d_i, d_gamma)
        assert bound >= direct * (1 - 1e-6)
        assert bound < 10 * max(direct, 1e-6) or bound < 1.0


def test_contraction_bound_vanishes_with_theta():
    vals = [contraction_bound(th, 0.5, [0.25], 0.1)[0] for th in (10.0, 100.0, 1000.0)]
    assert vals[0] > vals[1] > vals[2]
    assert vals[2] < 0.05


def test_contraction_bound_small_T():
    big = contraction_bound(10.0, 0.5, [0.25], 0.0)[0]
    small = contraction_bound(10.0, 1e-4, [0.25], 0.0)[0]
    assert small < 0.05 * big


def test_choose_theta():
    theta, total = choose_theta(0.0, [0.25], 0.0, 0.5)
    assert theta == 1.0 and total == 0.0
    th1, _ = choose_theta(1.0, [0.25], 0.1, 0.5)
    th2, _ = choose_theta(2.0, [0.25], 0.1, 0.5)
    assert th2 >= th1
    t_fixed, tot = choose_theta(5.0, [0.25], 0.1, 0.5)
    assert tot <= 0.5


# -- fixed points ---------------------------------------------------------------------


def test_no_potential_is_base_flow(sym, bump):
    cfg = SolverConfig(horizon=0.25, nodes=32)
    traj = picard_solve(bump, [], cfg, gamma_of(2.0, 1.0), DIMS, sym, 1.0)
    for t, state in zip(traj.times, traj.states):
        exact = apply_semigroup(bump, t, 1.0, sym)
        assert np.array_equal(state.values, exact.values)


def test_constant_potential_exponential(sym, bump):
    c, tol = 1.0, 1e-8
    cfg = SolverConfig(horizon=0.25, nodes=256, grading=1.0, picard_tol=tol)
    traj = picard_solve(bump, [constant_potential(c)], cfg, gamma_of(2.0, 1.0),
                        DIMS, sym, 1.0)
    worst = max(
        float(np.max(np.abs(s.values - math.exp(c * t) * apply_semigroup(bump, t, 1.0, sym).values)))
        for t, s in zip(traj.times, traj.states)
    )
    assert worst <= 10 * tol


def test_linearity(sym, bump):
    """Node-wise linearity within 10 x picard_tol, measured in the solver's
    own contraction norm (the stopping metric)."""
    from morreylab.duhamel import _AlphaNorm

    cfg = SolverConfig(horizon=0.25, nodes=48, picard_tol=1e-9)
    V = power_law_potential(1.0, 0.5, 1.5)
    gamma = gamma_of(2.0, 0.7)
    other = GridFunction(1, N, L, np.cos(np.pi * bump.axis() / L) ** 2)
    a, b = 2.0, -0.5
    combo = picard_solve(a * bump + b * other, [V], cfg, gamma, DIMS, sym, 1.0)
    one = picard_solve(bump, [V], cfg, gamma, DIMS, sym, 1.0)
    two = picard_solve(other, [V], cfg, gamma, DIMS, sym, 1.0)
    norm = _AlphaNorm(combo.alpha, DIMS, bump)
    d = gamma.gamma2 - combo.alpha.gamma2
    w = np.exp(-combo.theta * combo.times) * combo.times**d
    worst = max(
        wk * norm(c - a * u - b * v)
        for wk, c, u, v in zip(w, combo.states, one.states, two.states)
    )
    assert worst <= 10 * cfg.picard_tol


def test_consistency_across_gamma(sym, bump):
    """The same datum declared in two admissible spaces evolves identically.

    The two declarations pick different working indices, hence
    different singular-layer exponents in the quadrature, so agreement
    is limited by the two runs' time-discretization errors (about 1e-3
    at this node count), not by the stopping tolerance.
    """
    cfg = SolverConfig(horizon=0.25, nodes=48, picard_tol=1e-10)
    V = power_law_potential(1.0, 0.5, 1.5)
    t1 = picard_solve(bump, [V], cfg, gamma_of(2.0, 0.7), DIMS, sym, 1.0)
    t2 = picard_solve(bump, [V], cfg, gamma_of(4.0, 0.5), DIMS, sym, 1.0)
    worst = max(float(np.max(np.abs(a.values - b.values)))
                for a, b in zip(t1.states, t2.states))
    assert worst <= 2e-3


def test_apriori_weighted_bound(sym, bump):
    """sup_k e^{-theta t} t^d ||u||_alpha <= 2 C ||u0||_gamma with C fitted
    from the base flow."""
    from morreylab.duhamel import _AlphaNorm

    cfg = SolverConfig(horizon=0.25, nodes=48, picard_tol=1e-9)
    V = power_law_potential(1.0, 0.5, 1.5)
    gamma = gamma_of(2.0, 0.7)
    traj = picard_solve(bump, [V], cfg, gamma, DIMS, sym, 1.0)
    norm = _AlphaNorm(traj.alpha, DIMS, bump)
    from morreylab.norms import morrey_norm

    d = gamma.gamma2 - traj.alpha.gamma2
    w = np.exp(-traj.theta * traj.times) * traj.times**d
    u_norm = max(wk * norm(s) for wk, s in zip(w, traj.states))
    base_norm = max(
        wk * norm(apply_semigroup(bump, t, 1.0, sym))
        for wk, t in zip(w, traj.times)
    )
    gamma_norm = morrey_norm(bump, 2.0, 0.7)
    C_fit = base_norm / gamma_norm
    assert u_norm <= 2.0 * C_fit * gamma_norm


def test_residuals_contract_and_history_decreases(sym, bump):
    cfg = SolverConfig(horizon=0.25, nodes=48, picard_tol=1e-9)
    V = power_law_potential(1.0, 0.5, 1.5)
    traj = picard_solve(bump, [V], cfg, gamma_of(2.0, 0.7), DIMS, sym, 1.0)
    hist = traj.residual_history
    assert all(b < a for a, b in zip(hist, hist[1:]))
    ratios = [b / a for a, b in zip(hist, hist[1:])]
    assert max(ratios) <= traj.predicted_ratio + 0.1


def test_self_convergence_within_estimate(sym, bump):
    """Doubling the grid moves the answer by less than the declared tolerance."""
    V = power_law_potential(1.0, 0.5, 1.5)
    gamma = gamma_of(2.0, 0.7)
    cfg = SolverConfig(horizon=0.25, nodes=64, picard_tol=1e-8, estimate_tolerance=True)
    traj = picard_solve(bump, [V], cfg, gamma, DIMS, sym, 1.0)
    ref = picard_solve(bump, [V], SolverConfig(horizon=0.25, nodes=128, picard_tol=1e-9),
                       gamma, DIMS, sym, 1.0)
    gap = max(
        float(np.max(np.abs(traj.states[k].values - ref.states[2 * k + 1].values)))
        for k in range(cfg.nodes)
    )
    assert traj.tolerance_estimate is not None
    assert gap <= 5.0 * traj.tolerance_estimate


def test_blowup_reported(sym, bump):
    huge = constant_potential(1e6)
    cfg = SolverConfig(horizon=0.25, nodes=16, max_sweeps=3, theta=1.0)
    with pytest.raises(RuntimeError):
        picard_solve(bump, [huge], cfg, gamma_of(2.0, 1.0), DIMS, sym, 1.0)


# -- sequential composition -------------------------------------------------------------


def test_sequential_single_matches_joint(sym, bump):
    cfg = SolverConfig(horizon=0.25, nodes=32, grading=1.0, picard_tol=1e-9)
    V = power_law_potential(1.0, 0.5, 1.5)
    gamma = gamma_of(2.0, 0.7)
    a = picard_solve(bump, [V], cfg, gamma, DIMS, sym, 1.0)
    b = sequential_solve(bump, [V], cfg, gamma, DIMS, sym, 1.0)
    worst = max(float(np.max(np.abs(x.values - y.values)))
                for x, y in zip(a.states, b.states))
    assert worst == 0.0


def test_sequential_orders_and_joint_agree(sym, bump):
    cfg = SolverConfig(horizon=0.25, nodes=48, grading=1.0, picard_tol=1e-9)
    V0 = power_law_potential(1.0, 0.3, 2.0)
    V1 = power_law_potential(1.0, 0.5, 1.5)
    gamma = gamma_of(2.0, 0.3)
    joint = picard_solve(bump, [V0, V1], cfg, gamma, DIMS, sym, 1.0)
    s01 = sequential_solve(bump, [V0, V1], cfg, gamma, DIMS, sym, 1.0)
    s10 = sequential_solve(bump, [V1, V0], cfg, gamma, DIMS, sym, 1.0)
    d_orders = max(float(np.max(np.abs(a.values - b.values)))
                   for a, b in zip(s01.states, s10.states))
    d_joint = max(float(np.max(np.abs(a.values - b.values)))
                  for a, b in zip(s01.states, joint.states))
    assert d_orders < 0.05
    assert d_joint < 0.05


def test_sequential_needs_uniform_grid(sym, bump):
    cfg = SolverConfig(horizon=0.25, nodes=32, grading=2.0)
    V0 = power_law_potential(1.0, 0.3, 2.0)
    V1 = power_law_potential(1.0, 0.5, 1.5)
    with pytest.raises(ValueError):
        sequential_solve(bump, [V0, V1], cfg, gamma_of(2.0, 0.3), DIMS, sym, 1.0)


# -- pointwise evaluation ----------------------------------------------------------------


@pytest.fixture(scope="module")
def const_traj(sym, bump):
    cfg = SolverConfig(horizon=0.25, nodes=64, grading=1.0, picard_tol=1e-9)
    return picard_solve(bump, [constant_potential(1.0)], cfg, gamma_of(2.0, 1.0),
                        DIMS, sym, 1.0)


def test_evaluate_at_node(const_traj):
    k = 10
    out = evaluate(const_traj, float(const_traj.times[k]))
    assert np.array_equal(out.values, const_traj.states[k].values)


def test_evaluate_off_node(const_traj, sym, bump):
    t = 0.1303
    out = evaluate(const_traj, t)
    exact = math.exp(t) * apply_semigroup(bump, t, 1.0, sym)
    assert np.max(np.abs(out.values - exact.values)) < 1e-5


def test_evaluate_beyond_horizon_composition(const_traj, sym, bump):
    t = 0.5  # = 2T via composition at T
    out = evaluate(const_traj, t)
    exact = math.exp(t) * apply_semigroup(bump, t, 1.0, sym)
    assert np.max(np.abs(out.values - exact.values)) < 1e-5


def test_evaluate_small_time_matches_base(const_traj, sym, bump):
    t = 1e-3
    out = evaluate(const_traj, t)
    base = apply_semigroup(bump, t, 1.0, sym)
    assert np.max(np.abs(out.values - base.values)) < 5e-3


def test_trajectory_export(tmp_path, const_traj):
    d = tmp_path / "traj"
    const_traj.export(d)
    import json

    manifest = json.loads((d / "manifest.json").read_text())
    assert len(manifest["states"]) == const_traj.config.nodes
    assert manifest["theta"] == const_traj.theta
    first = GridFunction.load(d / manifest["states"][0])
    assert np.allclose(first.values, const_traj.states[0].values)


def test_2d_constant_potential_spot_check():
    sym2 = laplacian_power_symbol(2, 64, 8.0, 1)
    bump2 = gaussian_bump(2, 64, 8.0)
    dims2 = ProblemDims(2, 1, 1.0)
    cfg = SolverConfig(horizon=0.1, nodes=32, grading=1.0, picard_tol=1e-8)
    gamma = to_index(MorreyParams(2.0, 1.0), dims2)
    traj = picard_solve(bump2, [constant_potential(0.5, N=2)], cfg, gamma, dims2, sym2, 1.0)
    t = traj.times[-1]
    exact = math.exp(0.5 * t) * apply_semigroup(bump2, t, 1.0, sym2)
    assert np.max(np.abs(traj.states[-1].values - exact.values)) < 1e-6
