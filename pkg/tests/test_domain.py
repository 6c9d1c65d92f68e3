import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from csflab import (
    ConfigurationError,
    DivergentIntegralError,
    FlowParams,
    SpeedProfile,
    make_grid,
    quad_endpoint_singular,
    second_derivative,
    sin_power_integral,
)
from csflab.domain import _unsafe_grid, laplacian


# --------------------------------------------------------------------------
# params and grid
# --------------------------------------------------------------------------


def test_params_validation():
    FlowParams(alpha=1.0, t_end=1.0)
    with pytest.raises(ConfigurationError):
        FlowParams(alpha=0.0, t_end=1.0)
    with pytest.raises(ConfigurationError):
        FlowParams(alpha=1.0, t_end=1.0, cfl_safety=1.0)
    with pytest.raises(ConfigurationError):
        FlowParams(alpha=1.0, t_end=1.0, grid_size=8)
    with pytest.raises(ConfigurationError):
        FlowParams(alpha=0.5, t_end=1.0).require_slab()
    FlowParams(alpha=0.51, t_end=1.0).require_slab()


def test_grid_definition_four_nodes():
    g = _unsafe_grid(4)
    np.testing.assert_allclose(
        g.nodes, [math.pi / 8, 3 * math.pi / 8, 5 * math.pi / 8, 7 * math.pi / 8]
    )


def test_grid_sixteen():
    g = make_grid(16)
    assert g.spacing == pytest.approx(math.pi / 16, abs=0)
    assert g.nodes[0] == pytest.approx(math.pi / 32)
    assert 0.0 < g.nodes[0] and g.nodes[-1] < math.pi
    assert np.all(np.diff(g.nodes) > 0)
    np.testing.assert_allclose(np.diff(g.nodes), g.spacing)


def test_grid_symmetry_eight_nodes():
    g = _unsafe_grid(8)
    np.testing.assert_allclose(g.nodes + g.nodes[::-1], math.pi)


def test_grid_too_small_rejected():
    with pytest.raises(ConfigurationError):
        make_grid(8)


def test_speed_profile_requires_positive_values():
    g = make_grid(16)
    with pytest.raises(ConfigurationError):
        SpeedProfile(grid=g, values=np.zeros(16), alpha=1.0)
    with pytest.raises(ConfigurationError):
        SpeedProfile(grid=g, values=np.ones(8), alpha=1.0)


# --------------------------------------------------------------------------
# second derivative
# --------------------------------------------------------------------------


def test_second_derivative_sine_eigenfunction():
    g = make_grid(64)
    prof = SpeedProfile(grid=g, values=np.sin(g.nodes), alpha=1.0)
    d2 = second_derivative(prof)
    # sin is odd through both ends, so the ghost closure is exact and the
    # centered-stencil error bound h^2/12 applies at every node
    assert np.max(np.abs(d2 + np.sin(g.nodes))) < g.spacing**2 / 6


def test_second_derivative_constant_interior():
    g = make_grid(64)
    prof = SpeedProfile(grid=g, values=np.full(64, 3.7), alpha=1.0)
    d2 = second_derivative(prof)
    np.testing.assert_allclose(d2[1:-1], 0.0, atol=1e-12)


def test_second_derivative_refinement_order():
    # analytic oracle: (sin 2theta)'' = -4 sin 2theta; error must shrink ~4x
    errs = {}
    for n in (64, 128, 256):
        g = make_grid(n)
        vals = np.sin(2 * g.nodes) + 2.0  # keep positive for the profile type
        prof = SpeedProfile(grid=g, values=vals, alpha=1.0)
        d2 = second_derivative(prof)
        errs[n] = np.max(np.abs(d2[1:-1] + 4 * np.sin(2 * g.nodes[1:-1])))
    assert errs[64] / errs[128] == pytest.approx(4.0, rel=0.15)
    assert errs[128] / errs[256] == pytest.approx(4.0, rel=0.15)


def test_summation_by_parts_exact_identity():
    # sum v (D2 u) h = -(1/h) [sum_int du dv + 1/2 (du dv)_edges] with the
    # ghost-extended edge differences; exact discrete identity
    rng = np.random.default_rng(7)
    n = 64
    g = make_grid(n)
    u = rng.uniform(0.1, 2.0, n)
    v = rng.uniform(0.1, 2.0, n)
    h = g.spacing
    lhs = float(np.sum(v * laplacian(u, h)) * h)
    eu = np.concatenate([[-u[0]], u, [-u[-1]]])
    ev = np.concatenate([[-v[0]], v, [-v[-1]]])
    du, dv = np.diff(eu), np.diff(ev)
    w = np.ones(n + 1)
    w[0] = w[-1] = 0.5
    rhs = -float(np.sum(w * du * dv)) / h
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_summation_by_parts_matches_continuum():
    # for smooth u, v vanishing at both ends the pairing approaches
    # -int u' v' at second order
    vals = {}
    for n in (128, 256):
        g = make_grid(n)
        u = np.sin(g.nodes)
        v = np.sin(2 * g.nodes) + np.sin(g.nodes)
        vals[n] = float(np.sum(v * laplacian(u, g.spacing)) * g.spacing)
    exact = -quad(lambda x: np.cos(x) * (2 * np.cos(2 * x) + np.cos(x)), 0, np.pi)[0]
    assert abs(vals[128] - exact) < 1e-3
    assert abs(vals[256] - exact) < abs(vals[128] - exact) / 3.0


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_reflection_symmetry_commutes_bitwise(seed):
    # every discrete operator commutes with theta -> pi - theta; the stencil
    # is written symmetrically so this holds exactly, not just approximately
    rng = np.random.default_rng(seed)
    u = rng.uniform(0.05, 3.0, 32)
    h = math.pi / 32
    assert np.array_equal(laplacian(u[::-1], h), laplacian(u, h)[::-1])


# --------------------------------------------------------------------------
# quadrature
# --------------------------------------------------------------------------


def test_quad_constant_is_pi():
    val = quad_endpoint_singular(lambda y: np.ones_like(y), 0.0, math.pi)
    assert val == pytest.approx(math.pi, abs=1e-12)
    assert sin_power_integral(0.0) == pytest.approx(math.pi, abs=1e-12)


def test_quad_sqrt_sine_vs_adaptive_gauss_oracle():
    # adaptive Gauss-Kronrod oracle, split so each singular endpoint sits at
    # an interval end where the extrapolation certifies ~1e-12
    v1, e1 = quad(lambda y: math.sin(y) ** 0.5, 0.0, math.pi / 2, epsabs=1e-14, limit=300)
    v2, e2 = quad(lambda y: math.sin(y) ** 0.5, math.pi / 2, math.pi, epsabs=1e-14, limit=300)
    assert e1 + e2 < 1e-11
    mine = sin_power_integral(0.5)
    assert mine == pytest.approx(v1 + v2, abs=1e-11)
    assert mine == pytest.approx(2.39628, abs=5e-6)


def _graded_trapezoid_oracle(p, m=50_000, grade=6):
    # independent scheme: fold about pi/2, grade the mesh toward the
    # singular endpoint with y = (pi/2) xi**grade, trapezoid in xi
    xi = np.linspace(0.0, 1.0, m)
    y = (math.pi / 2) * xi**grade
    f = np.zeros_like(xi)
    f[1:] = np.sin(y[1:]) ** p * (math.pi / 2) * grade * xi[1:] ** (grade - 1)
    if p > -1:
        f[0] = 0.0
    return 2.0 * float(np.trapezoid(f, xi))


def test_quad_singular_two_thirds_vs_graded_mesh_oracle():
    # alpha = 0.6 width integrand: p = 1 - 1/alpha = -2/3
    mine = sin_power_integral(-2.0 / 3.0)
    oracle = _graded_trapezoid_oracle(-2.0 / 3.0)
    assert mine > 0.0
    assert mine == pytest.approx(oracle, abs=1e-8)


def test_quad_divergent_endpoint_raises():
    with pytest.raises(DivergentIntegralError):
        quad_endpoint_singular(lambda y: np.sin(y) ** -1.2, 0.0, math.pi / 2)
    with pytest.raises(DivergentIntegralError):
        sin_power_integral(-1.0)


def test_quad_order_improves_with_levels():
    # doubling the double-exponential levels must collapse the error on a
    # singular-endpoint integrand by far more than one order of magnitude
    from scipy.integrate import tanhsinh
    from scipy.special import gamma

    p = -0.5
    exact = math.sqrt(math.pi) * gamma((p + 1) / 2) / gamma(p / 2 + 1) / 2
    f = lambda y: np.sin(y) ** p
    coarse = abs(tanhsinh(f, 0.0, math.pi / 2, minlevel=1, maxlevel=1).integral - exact)
    fine = abs(tanhsinh(f, 0.0, math.pi / 2, minlevel=1, maxlevel=2).integral - exact)
    assert coarse > 0.0
    assert fine < coarse / 10


def test_quad_near_critical_exponent_regularized():
    # accuracy must not degrade as p -> -1 (the regime-threshold integrals)
    from scipy.special import gamma

    for p in (-0.95, -0.98, -0.995):
        exact = math.sqrt(math.pi) * gamma((p + 1) / 2) / gamma(p / 2 + 1)
        assert sin_power_integral(p) == pytest.approx(exact, rel=1e-10)
