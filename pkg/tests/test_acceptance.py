"""Acceptance suite: one test per numbered criterion, tolerances pinned.

Run ``pytest tests/test_acceptance.py -v -s`` to get one PASS line per
criterion.  The convergence experiment (criterion 3) is shared by criteria
4, 5, 6, 7, 12 and re-run from scratch for the determinism criterion 14.
"""

import math

import numpy as np
import pytest
from scipy.integrate import quad

import csflab
from csflab import (
    ExactTranslator,
    FlowParams,
    FlowState,
    MultiplicativePerturbation,
    SpeedProfile,
    SupportState,
    barrier_residual,
    bisect_barrier_amplitude,
    boundary_flux_product,
    build_initial,
    check_decay,
    check_harnack,
    entropy_identity,
    entropy_series,
    evolve,
    evolve_pair,
    evolve_pressure,
    fd_barrier_residual,
    make_grid,
    pressure_of,
    translator_speed,
    width,
)
from csflab.estimates import poincare_slack_exact, poincare_slack_quadrature
from csflab.io import write_trace_csv


def ok(num, detail):
    print(f"criterion {num:>2}: PASS  {detail}")


def convergence_samples():
    # dense early sampling resolves the fast initial transient for the
    # entropy identity; >= 40 samples per unit time throughout
    early = np.linspace(0.002, 1.0, 500)
    late = 1.0 + np.arange(1, 761) * 0.025
    return np.concatenate([early, late])


def run_convergence(n):
    """Criterion-3 configuration: perturbed translator, alpha=1, to t=20."""
    recipe = MultiplicativePerturbation.from_dicts(sin={3: 0.2})
    grid = make_grid(n)
    state = build_initial(recipe, grid, 1.0)
    params = FlowParams(alpha=1.0, t_end=20.0, grid_size=n, cfl_safety=0.25)
    final, trace = evolve(state, params, sample_times=convergence_samples())
    return trace


@pytest.fixture(scope="module")
def c3_512():
    return run_convergence(512)


@pytest.fixture(scope="module")
def c3_256():
    return run_convergence(256)


def interior_error(trace, k):
    m = translator_speed(trace.alpha)
    mask = trace.grid.interior_slice(math.pi / 6)
    target = m * np.sin(trace.grid.nodes[mask])
    return float(np.max(np.abs(trace.u[k][mask] - target) / target))


# --------------------------------------------------------------------------


def test_criterion_01_soliton_speed():
    m1 = translator_speed(1.0)
    assert abs(m1 - math.pi / 2) <= 1e-10
    v1 = quad(lambda y: math.sin(y) ** 0.5, 0.0, math.pi / 2, epsabs=1e-14, limit=300)
    v2 = quad(lambda y: math.sin(y) ** 0.5, math.pi / 2, math.pi, epsabs=1e-14, limit=300)
    oracle = ((v1[0] + v2[0]) / 2.0) ** 2
    m2 = translator_speed(2.0)
    assert abs(m2 - oracle) <= 1e-8
    ok(1, f"m(1) - pi/2 = {m1 - math.pi/2:.2e}; m(2) - oracle = {m2 - oracle:.2e}")


@pytest.mark.parametrize("alpha", [0.75, 1.0, 2.0])
def test_criterion_02_stationarity(alpha):
    drifts = {}
    for n in (256, 512):
        grid = make_grid(n)
        state = build_initial(ExactTranslator(), grid, alpha)
        params = FlowParams(alpha=alpha, t_end=5.0, grid_size=n)
        final, _ = evolve(state, params)
        m = translator_speed(alpha)
        drifts[n] = float(np.max(np.abs(final.u.values - m * np.sin(grid.nodes)))) / m
    assert drifts[256] <= 1e-3
    ratio = drifts[256] / drifts[512]
    assert ratio >= 3.5
    ok(2, f"alpha={alpha}: drift(256)={drifts[256]:.2e}, refinement ratio={ratio:.2f}")


def test_criterion_03_convergence_to_translator(c3_512):
    trace = c3_512
    k_end = trace.times.size - 1
    err_end = interior_error(trace, k_end)
    assert err_end <= 0.02
    k2 = int(np.argmin(np.abs(trace.times - 2.0)))
    errs = np.array([interior_error(trace, k) for k in range(k2, trace.times.size)])
    # monotone decrease beyond the transient, up to an additive allowance at
    # the O(dtheta^2) discretization floor (~4e-5 at n=512, far below the
    # 2e-2 pass bar); the error must also never exceed its t=2 value again
    assert float(np.max(np.diff(errs))) <= 1e-4
    assert float(np.max(errs)) == errs[0]
    ok(3, f"interior error at t=20: {err_end:.2e}; peak after t=2 at t=2 itself")


def test_criterion_04_harnack(c3_512):
    rep = check_harnack(c3_512, tol=1e-6)
    assert rep.passed
    assert rep.constants["slack"] >= -1e-6
    ok(4, f"min slack of t^(1/2) kappa monotonicity: {rep.constants['slack']:.2e}")


def test_criterion_05_entropy_identity(c3_512):
    rep = entropy_identity(c3_512, epsilon=0.2, window=1.0, rel_tol=0.05)
    assert rep.passed
    ok(5, f"worst unit-window residual: {rep.constants['worst_rel_error']:.2%}")


def test_criterion_06_dissipation_vanishing(c3_512):
    ent = entropy_series(c3_512, 0.2)
    d1 = float(ent.D[np.argmin(np.abs(ent.times - 1.0))])
    d20 = float(ent.D[-1])
    assert d20 <= 0.1 * d1
    ok(6, f"D(20)/D(1) = {d20/d1:.2e}")


def test_criterion_07_width_conservation(c3_512):
    trace = c3_512
    devs = np.array(
        [abs(width(trace.profile(k)) - 2.0) for k in range(trace.times.size)]
    )
    assert float(devs.max()) <= 1e-2
    ok(7, f"max |width - 2| over {devs.size} samples: {devs.max():.2e}")


def test_criterion_08_dual_form_oracle():
    errs = {}
    for n in (128, 256):
        recipe = MultiplicativePerturbation.from_dicts(sin={3: 0.2})
        grid = make_grid(n)
        state = build_initial(recipe, grid, 1.0)
        params = FlowParams(alpha=1.0, t_end=1.0, grid_size=n)
        final_u, _ = evolve(state, params)
        final_p, _, _ = evolve_pressure(pressure_of(state.u), params)
        errs[n] = float(np.max(np.abs(final_p.values - final_u.u.values**2)))
    ratio = errs[128] / errs[256]
    assert ratio >= 3.5
    ok(8, f"max|p - u^2| at t=1: {errs[128]:.2e} (n=128) -> {errs[256]:.2e}, ratio {ratio:.2f}")


def test_criterion_09_barrier():
    astar = bisect_barrier_amplitude(1.0, delta=1e-4, t0=2.0)
    rep = barrier_residual(1.0, astar, 1e-4, 2.0, n_theta=200, n_time=200)
    assert rep.passed
    assert rep.constants["min_residual"] >= -1e-10
    control = barrier_residual(1.0, astar / 10.0, 1e-4, 2.0)
    assert not control.passed
    ok(9, f"bisected amplitude {astar:.4f}; min residual {rep.constants['min_residual']:.2e}; A/10 fails")


def test_criterion_10_fast_diffusion_barrier():
    x = np.linspace(-5.0, 5.0, 101)
    t = np.linspace(0.5, 5.0, 46)
    worst = 0.0
    for mu in (0.5, 1.0, 2.0):
        rep = fd_barrier_residual(0.75, mu, x, t, rel_tol=1e-8)
        assert rep.passed
        worst = max(worst, rep.constants["max_rel_residual"])
    control = fd_barrier_residual(0.75, 1.0, x, t, b_scale=0.5)
    assert not control.passed
    ok(10, f"max relative residual over mu sweep: {worst:.2e}; wrong-b control fails")


def test_criterion_11_poincare():
    rng = np.random.default_rng(2026)
    worst_slack = math.inf
    worst_gap = 0.0
    for delta in (0.1, 0.3):
        for _ in range(100):
            coeffs = rng.uniform(-1.0, 1.0, size=rng.integers(1, 11))
            slack_q = poincare_slack_quadrature(coeffs, delta)
            slack_e = poincare_slack_exact(coeffs, delta)
            scale = max(1.0, float(np.sum(coeffs**2)))
            assert slack_q >= -1e-12 * scale
            assert abs(slack_q - slack_e) <= 1e-10 * scale
            worst_slack = min(worst_slack, slack_q / scale)
            worst_gap = max(worst_gap, abs(slack_q - slack_e) / scale)
    ok(11, f"200 random series: min slack {worst_slack:.2e}, max oracle gap {worst_gap:.2e}")


def test_criterion_12_curvature_decay(c3_512, c3_256):
    cs = {}
    for label, trace in (("512", c3_512), ("256", c3_256)):
        for t in (5.0, 10.0):
            k = int(np.argmin(np.abs(trace.times - t)))
            rep = check_decay(trace.profile(k), margin=0.3)
            assert rep.passed
            cs[(label, t)] = rep.constants["C_measured"]
    vals = np.array(list(cs.values()))
    assert np.all(np.isfinite(vals))
    assert float(vals.max() / vals.min()) <= 2.0
    ok(12, f"C range over t in (5,10) x n in (256,512): [{vals.min():.3f}, {vals.max():.3f}]")


def test_criterion_13_comparison_principle():
    grid = make_grid(256)
    m = translator_speed(1.0)
    lo = build_initial(ExactTranslator(), grid, 1.0)
    hi_vals = 1.1 * m * np.sin(grid.nodes)  # width-mismatched on purpose
    hi = FlowState(
        u=SpeedProfile(grid=grid, values=hi_vals, alpha=1.0, time=0.0),
        S=SupportState(grid=grid, values=lo.S.values, time=0.0),
    )
    params = FlowParams(alpha=1.0, t_end=5.0, grid_size=256)
    tr_lo, tr_hi = evolve_pair(lo, hi, params, sample_times=np.linspace(0.25, 5.0, 20))
    violation = float(np.max(tr_lo.u - tr_hi.u))
    assert violation <= 1e-6
    ok(13, f"worst ordering violation through t=5: {violation:.2e}")


def test_criterion_14_determinism(c3_512, tmp_path):
    first = tmp_path / "first.csv"
    write_trace_csv(first, c3_512)
    rerun = run_convergence(512)
    second = tmp_path / "second.csv"
    write_trace_csv(second, rerun)
    assert first.read_bytes() == second.read_bytes()
    ok(14, f"re-run trace CSV is byte-identical ({first.stat().st_size} bytes)")


# --------------------------------------------------------------------------
# collar-sensitivity sweep from the design decisions (not a numbered
# criterion): after decay the boundary term shrinks with the collar, and the
# flux product sits lower at theta = 0.05 than at theta = 0.3
# --------------------------------------------------------------------------


def test_boundary_flux_collar_trend(c3_512):
    trace = c3_512
    k10 = int(np.argmin(np.abs(trace.times - 10.0)))
    bs = {}
    for eps in (0.4, 0.2, 0.1):
        ent = entropy_series(trace, eps)
        bs[eps] = abs(float(ent.B[k10]))
    assert bs[0.1] < bs[0.2] < bs[0.4]
    for t in (10.0, 20.0):
        k = int(np.argmin(np.abs(trace.times - t)))
        prod = np.abs(boundary_flux_product(trace.profile(k)))
        theta = trace.grid.nodes
        at = lambda x: float(prod[int(np.argmin(np.abs(theta - x)))])
        assert at(0.05) < at(0.3)


def test_entropy_nonincreasing_beyond_transient(c3_512):
    # dJ/dt = -D + B with D >= 0: beyond the transient J can only creep up
    # by the small boundary-flux budget, never re-grow materially
    ent = entropy_series(c3_512, 0.2)
    k2 = int(np.argmin(np.abs(ent.times - 2.0)))
    J = ent.J[k2:]
    scale = abs(float(ent.J[k2]))
    assert float(np.max(np.diff(J))) <= 1e-3 * scale
    assert float(np.max(J)) <= float(J[0]) + 1e-2 * scale


def test_interior_lower_bound_emerges(c3_512):
    # late-time interior speed floor within a factor 2 of the limit value
    # m sin(arcsin(delta)) at the collar edge
    rep = csflab.check_curvature_bounds(c3_512, delta=0.1)
    assert rep.passed
    limit = rep.constants["limit_value"]
    assert rep.constants["interior_inf"] >= 0.5 * limit