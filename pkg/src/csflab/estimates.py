"""Runnable certificates for the quantitative estimates of the flow.

Each check measures a quantity the theory controls (Harnack monotonicity,
entropy dissipation, curvature and derivative decay, barrier residuals, the
sharp sine-basis Poincare inequality) and reports measured constants next to
a pass/fail verdict.  Asymptotic statements that cannot be falsified at
finite resolution are reported as trends, not verdicts.

Conventions shared by every check:

* time derivatives of the speed come from the evolution's right-hand side,
  never from differencing the trace in time;
* a slack is signed so that nonnegative means the estimate holds, and a
  check passes iff ``slack >= -tolerance``;
* the entropy boundary term and the boundary-flux product are the same
  expression up to the constant ``2 (alpha+1)^2 / alpha^2`` (single source
  of truth: :func:`boundary_flux_product`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domain import SpeedProfile, gradient, laplacian
from .errors import ParameterDomainError
from .flow import FlowTrace, rhs_u

__all__ = [
    "EstimateReport",
    "EntropyTrace",
    "boundary_flux_product",
    "entropy",
    "entropy_series",
    "entropy_identity",
    "check_harnack",
    "check_decay",
    "check_gradient_decay",
    "check_second_derivative_decay",
    "check_flux_decay",
    "check_curvature_bounds",
    "check_fd_lower_bound",
    "barrier_residual",
    "bisect_barrier_amplitude",
    "fd_barrier_residual",
    "check_poincare",
    "poincare_slack_quadrature",
    "poincare_slack_exact",
]

DEFAULT_SLACK_TOL = 1e-6  # explicit-scheme noise floor at n = 256


@dataclass(frozen=True)
class EstimateReport:
    """Outcome of one check: verdict, measured constants, worst location."""

    name: str
    passed: bool | None  # None: trend report, no pass/fail semantics
    constants: dict = field(default_factory=dict)
    worst_location: tuple[float, float] | None = None  # (theta, t)
    tolerance: float = DEFAULT_SLACK_TOL
    notes: str = ""

    @property
    def status(self) -> str:
        if self.passed is None:
            return "trend"
        return "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "passed": self.passed,
            "constants": {k: float(v) for k, v in self.constants.items()},
            "worst_location": list(self.worst_location) if self.worst_location else None,
            "tolerance": self.tolerance,
            "notes": self.notes,
        }


def _report_from_slack(name, slack, tol, constants, worst=None, notes="") -> EstimateReport:
    constants = dict(constants)
    constants["slack"] = slack
    return EstimateReport(
        name=name,
        passed=bool(slack >= -tol),
        constants=constants,
        worst_location=worst,
        tolerance=tol,
        notes=notes,
    )


# ---------------------------------------------------------------------------
# entropy machinery
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EntropyTrace:
    """Entropy J, dissipation D and boundary flux B along a run.

    ``dJ/dt = -D + B`` on the collar ``(epsilon, pi - epsilon)``, with
    ``D >= 0`` vanishing exactly on translators.
    """

    times: np.ndarray
    J: np.ndarray
    D: np.ndarray
    B: np.ndarray
    epsilon: float

    def __post_init__(self):
        if not (
            np.all(np.isfinite(self.J))
            and np.all(np.isfinite(self.D))
            and np.all(np.isfinite(self.B))
        ):
            raise ParameterDomainError("entropy trace has non-finite entries")
        if np.any(self.D < 0.0):
            raise ParameterDomainError("dissipation must be nonnegative")


def _collar_indices(profile_or_trace, epsilon: float) -> tuple[int, int]:
    grid = profile_or_trace.grid
    if not (0.0 < epsilon < math.pi / 4):
        raise ParameterDomainError(f"collar must lie in (0, pi/4), got {epsilon}")
    inside = np.where(grid.interior_slice(epsilon))[0]
    return int(inside[0]), int(inside[-1])


def _trapezoid(values: np.ndarray, i0: int, i1: int, h: float) -> float:
    chunk = values[i0 : i1 + 1]
    return h * (float(np.sum(chunk)) - 0.5 * float(chunk[0]) - 0.5 * float(chunk[-1]))


def boundary_flux_product(profile: SpeedProfile) -> np.ndarray:
    """Signed product ``u_theta * u_t`` with ``u_t`` from the evolution law.

    This is the integrand of the entropy boundary term and the quantity
    whose decay toward the ends the flux checks certify.
    """
    return gradient(profile.values, profile.grid.spacing) * rhs_u(profile)


def entropy(profile: SpeedProfile, epsilon: float) -> float:
    """Collar entropy ``(a+1)^2/a^2 int_eps^{pi-eps} u_theta^2 - u^2 dtheta``.

    Quadratically homogeneous in u, invariant under ``theta -> pi - theta``,
    and zero (as ``epsilon -> 0``) exactly on translators.
    """
    a = profile.alpha
    h = profile.grid.spacing
    i0, i1 = _collar_indices(profile, epsilon)
    du = gradient(profile.values, h)
    integrand = du * du - profile.values * profile.values
    return (a + 1.0) ** 2 / a**2 * _trapezoid(integrand, i0, i1, h)


def _entropy_terms(profile: SpeedProfile, i0: int, i1: int) -> tuple[float, float, float]:
    a = profile.alpha
    u = profile.values
    h = profile.grid.spacing
    coef = (a + 1.0) ** 2 / a**2
    du = gradient(u, h)
    shape = laplacian(u, h) + u
    J = coef * _trapezoid(du * du - u * u, i0, i1, h)
    D = 2.0 * coef * a * _trapezoid(u ** (1.0 + 1.0 / a) * shape * shape, i0, i1, h)
    flux = du * (a * u ** (1.0 + 1.0 / a) * shape)
    B = 2.0 * coef * (float(flux[i1]) - float(flux[i0]))
    return J, D, B


def entropy_series(trace: FlowTrace, epsilon: float) -> EntropyTrace:
    """Evaluate J, D, B at every sampled state of a run."""
    i0, i1 = _collar_indices(trace, epsilon)
    nt = trace.times.size
    J = np.empty(nt)
    D = np.empty(nt)
    B = np.empty(nt)
    for k in range(nt):
        J[k], D[k], B[k] = _entropy_terms(trace.profile(k), i0, i1)
    return EntropyTrace(times=trace.times.copy(), J=J, D=D, B=B, epsilon=epsilon)


def entropy_identity(
    trace: FlowTrace,
    epsilon: float,
    window: float = 1.0,
    rel_tol: float = 0.05,
    floor: float | None = None,
    t_start: float = 0.0,
) -> EstimateReport:
    """Check ``Delta J = -int (D - B) dt`` over consecutive windows.

    The time integral uses the trapezoid rule on the trace samples, so the
    trace must resolve the fast initial transient (at least 20 samples per
    unit time; denser early sampling tightens the residual).  The relative
    error of each window is measured against ``max(|Delta J|, floor)``.
    """
    ts = trace.times
    span = float(ts[-1] - ts[0])
    if span < window:
        raise ParameterDomainError("trace shorter than one window")
    if np.max(np.diff(ts)) > (1.0 / 20.0) + 1e-12:
        raise ParameterDomainError("trace too sparse: need >= 20 samples per unit time")
    ent = entropy_series(trace, epsilon)
    if floor is None:
        # default absolute floor: 1e-6 of |J| measured at t = 2 (or at the
        # earliest sampled time past 2)
        k2 = int(np.searchsorted(ts, min(2.0, float(ts[-1]))))
        k2 = min(k2, ts.size - 1)
        floor = 1e-6 * abs(float(ent.J[k2]))

    worst_rel = 0.0
    worst_t = float(ts[0])
    t0 = max(t_start, float(ts[0]))
    while t0 + window <= float(ts[-1]) + 1e-9:
        a_ = int(np.argmin(np.abs(ts - t0)))
        b_ = int(np.argmin(np.abs(ts - (t0 + window))))
        dJ = float(ent.J[b_] - ent.J[a_])
        integral = float(np.trapezoid((ent.D - ent.B)[a_ : b_ + 1], ts[a_ : b_ + 1]))
        rel = abs(dJ + integral) / max(abs(dJ), floor)
        if rel > worst_rel:
            worst_rel = rel
            worst_t = t0
        t0 += window
    return _report_from_slack(
        "entropy_identity",
        rel_tol - worst_rel,
        0.0,
        {"worst_rel_error": worst_rel, "epsilon": epsilon, "floor": floor},
        worst=(math.nan, worst_t),
        notes=f"worst window starts at t = {worst_t:g}",
    )


# ---------------------------------------------------------------------------
# monotonicity / decay checks
# ---------------------------------------------------------------------------


def check_harnack(trace: FlowTrace, tol: float = DEFAULT_SLACK_TOL) -> EstimateReport:
    """Monotonicity of ``t**(1/(alpha+1)) * kappa(theta, t)`` in t.

    The clock is absolute flow time (the run must start at t = 0); the check
    evaluates every node at every pair of consecutive sample times and
    reports the worst relative decrease as negative slack.
    """
    ts = trace.times
    positive = ts > 0.0
    if np.count_nonzero(positive) < 2:
        raise ParameterDomainError("need at least two samples at positive times")
    tp = ts[positive]
    kappa = trace.u[positive] ** (1.0 / trace.alpha)
    g = tp[:, None] ** (1.0 / (trace.alpha + 1.0)) * kappa
    rel = (g[1:] - g[:-1]) / g[:-1]
    slack = float(np.min(rel))
    k, i = np.unravel_index(int(np.argmin(rel)), rel.shape)
    return _report_from_slack(
        "harnack",
        slack,
        tol,
        {"alpha": trace.alpha},
        worst=(float(trace.grid.nodes[i]), float(tp[k + 1])),
    )


def check_decay(
    profile: SpeedProfile, margin: float = 0.3, exponent: float = 2.0 / 3.0
) -> EstimateReport:
    """Measured constant in the end decay ``u <= C theta**exponent``.

    Valid as a theorem only for t > 3; the report carries the measured
    ``C = max u / theta**exponent`` over both end regions.  Pass means the
    constant is finite; stability under refinement and in time is the
    caller's cross-check (see the acceptance suite).
    """
    if profile.time <= 3.0:
        raise ParameterDomainError(
            f"end decay is only guaranteed for t > 3, profile is at t = {profile.time}"
        )
    theta = profile.grid.nodes
    u = profile.values
    near = theta <= margin
    c_left = float(np.max(u[near] / theta[near] ** exponent))
    mirrored = theta[near]  # grid symmetry: right-end distances equal left nodes
    c_right = float(np.max(u[::-1][near] / mirrored**exponent))
    c = max(c_left, c_right)
    return _report_from_slack(
        "curvature_decay",
        math.inf if math.isfinite(c) else -math.inf,
        0.0,
        {"C_measured": c, "C_left": c_left, "C_right": c_right, "exponent": exponent},
        notes=f"max of u/theta^{exponent:g} over theta <= {margin}",
    )


def _end_slope(ratio: np.ndarray, theta: np.ndarray, n_fit: int = 12) -> float:
    # fitted log-log slope of a ratio near theta = 0; negative slope means
    # the ratio blows up toward the end
    r = ratio[:n_fit]
    th = theta[:n_fit]
    good = r > 0.0
    if np.count_nonzero(good) < 3:
        return 0.0
    return float(np.polyfit(np.log(th[good]), np.log(r[good]), 1)[0])


def check_gradient_decay(
    trace: FlowTrace,
    beta: float,
    t_min: float = 1.0,
    slope_tol: float = 0.05,
) -> EstimateReport:
    """Boundedness of ``|u_s| / u**beta`` with ``u_s = u**(1/alpha) u_theta``.

    Requires ``beta < min(1, 1/alpha)`` for a bounded ratio.  The check
    reports the supremum of the ratio after ``t_min`` and fails when the
    fitted end slope of the ratio is negative (the ratio diverges toward the
    ends), which is how an illegal exponent shows up at finite resolution.
    """
    a = trace.alpha
    h = trace.grid.spacing
    theta = trace.grid.nodes
    sup_ratio = 0.0
    worst = (float(theta[0]), float(trace.times[0]))
    min_slope = math.inf
    for k in range(trace.times.size):
        if trace.times[k] < t_min:
            continue
        u = trace.u[k]
        us = u ** (1.0 / a) * gradient(u, h)
        ratio = np.abs(us) / u**beta
        j = int(np.argmax(ratio))
        if float(ratio[j]) > sup_ratio:
            sup_ratio = float(ratio[j])
            worst = (float(theta[j]), float(trace.times[k]))
        min_slope = min(min_slope, _end_slope(ratio, theta), _end_slope(ratio[::-1], theta))
    return _report_from_slack(
        "gradient_decay",
        min_slope,
        slope_tol,
        {"sup_ratio": sup_ratio, "beta": beta, "end_slope": min_slope},
        worst=worst,
        notes="slack is the fitted log-log end slope of |u_s|/u^beta",
    )


def check_second_derivative_decay(
    trace: FlowTrace,
    beta: float,
    epsilon: float = 0.05,
    t_min: float = 1.0,
    slope_tol: float = 0.05,
) -> EstimateReport:
    """Boundedness of ``|u_ss| / u**(min(beta, 2 beta - 1) - epsilon)``.

    ``u_ss = u**(1/alpha) d/dtheta (u**(1/alpha) u_theta)`` via the gauge
    change to arclength; only the conclusion is monitored, with the same
    end-slope harness as the gradient check.
    """
    a = trace.alpha
    h = trace.grid.spacing
    theta = trace.grid.nodes
    target = min(beta, 2.0 * beta - 1.0) - epsilon
    sup_ratio = 0.0
    worst = (float(theta[0]), float(trace.times[0]))
    min_slope = math.inf
    for k in range(trace.times.size):
        if trace.times[k] < t_min:
            continue
        u = trace.u[k]
        us = u ** (1.0 / a) * gradient(u, h)
        uss = u ** (1.0 / a) * gradient(us, h)
        ratio = np.abs(uss) / u**target
        j = int(np.argmax(ratio))
        if float(ratio[j]) > sup_ratio:
            sup_ratio = float(ratio[j])
            worst = (float(theta[j]), float(trace.times[k]))
        min_slope = min(min_slope, _end_slope(ratio, theta), _end_slope(ratio[::-1], theta))
    return _report_from_slack(
        "second_derivative_decay",
        min_slope,
        slope_tol,
        {"sup_ratio": sup_ratio, "beta": beta, "target_exponent": target},
        worst=worst,
    )


def check_flux_decay(
    trace: FlowTrace, t0: float = 1.0, outer_fraction: float = 0.2
) -> EstimateReport:
    """Decay of the boundary product ``|u_theta u_t|`` toward the ends.

    Measures the product over the outer fraction of the angular range for
    ``t >= t0``, fits its power in u (the empirical exponent of
    ``|u_theta u_t| <= C u**eps``), and passes when the product decreases
    toward the ends.
    """
    if t0 <= 0.0:
        raise ParameterDomainError("t0 must be positive")
    theta = trace.grid.nodes
    cut = outer_fraction * math.pi
    outer_left = theta <= cut
    n_out = int(np.count_nonzero(outer_left))
    sup_prod = 0.0
    worst = (float(theta[0]), t0)
    slack = math.inf
    logs_u: list[np.ndarray] = []
    logs_p: list[np.ndarray] = []
    for k in range(trace.times.size):
        if trace.times[k] < t0:
            continue
        prof = trace.profile(k)
        prod = np.abs(boundary_flux_product(prof))
        u = prof.values
        for p_end, u_end in (
            (prod[:n_out], u[:n_out]),
            (prod[::-1][:n_out], u[::-1][:n_out]),
        ):
            j = int(np.argmax(p_end))
            if float(p_end[j]) > sup_prod:
                sup_prod = float(p_end[j])
                worst = (float(theta[j]), float(trace.times[k]))
            # product at the outermost node must sit below the inner edge of
            # the outer region; slack is the (normalized) observed drop
            inner = float(p_end[-1])
            outer = float(p_end[0])
            if inner > 0.0:
                slack = min(slack, (inner - outer) / inner)
            keep = p_end > 0.0
            logs_u.append(np.log(u_end[keep]))
            logs_p.append(np.log(p_end[keep]))
    fitted = float(
        np.polyfit(np.concatenate(logs_u), np.concatenate(logs_p), 1)[0]
    ) if logs_u else math.nan
    return _report_from_slack(
        "flux_decay",
        slack,
        DEFAULT_SLACK_TOL,
        {"sup_product": sup_prod, "fitted_exponent": fitted},
        worst=worst,
        notes="fitted_exponent is the empirical power of the product in u",
    )


def check_curvature_bounds(
    trace: FlowTrace,
    delta: float = 0.1,
    t0: float = 0.0,
    floor_factor: float = 0.25,
) -> EstimateReport:
    """Global upper bound and interior lower bound on the speed.

    Reports ``sup u`` over the whole run after ``t0`` and ``inf u`` over the
    collar ``sin(theta) >= delta`` in the last quartile of the run.  The
    lower bound passes if the late interior infimum stays above
    ``floor_factor * m(alpha) * delta`` (the limit value is
    ``m(alpha) sin(arcsin(delta)) = m delta`` at the collar edge).
    """
    from .soliton import translator_speed

    ts = trace.times
    sel_t = ts >= t0
    collar = trace.grid.interior_slice(math.asin(delta))
    sup_u = float(np.max(trace.u[sel_t]))
    last_quartile = ts >= ts[0] + 0.75 * (ts[-1] - ts[0])
    inf_u = float(np.min(trace.u[np.ix_(last_quartile, collar)]))
    m = translator_speed(trace.alpha)
    floor = floor_factor * m * delta
    slack = (inf_u - floor) / max(floor, 1e-300)
    return _report_from_slack(
        "curvature_bounds",
        slack if math.isfinite(sup_u) else -math.inf,
        0.0,
        {"sup_u": sup_u, "interior_inf": inf_u, "floor": floor, "delta": delta,
         "limit_value": m * delta},
    )


def check_fd_lower_bound(
    trace: FlowTrace, outer_radius_fraction: float = 0.5
) -> EstimateReport:
    """Trend report for ``|X|^2 kappa^(1-alpha) >= 2 alpha (1+alpha)/(1-alpha) t``.

    Only meaningful for ``alpha in (1/2, 1)``.  At each sampled time the
    floor of ``|X|^2 kappa^(1-alpha) / t`` over the outer region is compared
    with the self-similar constant; this is a liminf statement, so the check
    reports the measured trend instead of a verdict.
    """
    from .geometry import reconstruct, tip_anchor

    a = trace.alpha
    if not (0.5 < a < 1.0):
        raise ParameterDomainError(
            f"fast-diffusion lower bound needs alpha in (1/2, 1), got {a}"
        )
    b_inv = 2.0 * a * (1.0 + a) / (1.0 - a)
    ratios = []
    times = []
    for k in range(trace.times.size):
        t = float(trace.times[k])
        if t <= 0.0:
            continue
        prof = trace.profile(k)
        # anchor the reconstructed curve at the absolute tip position
        # encoded by the co-evolved support function
        curve = reconstruct(prof, anchor=tip_anchor(trace.state(k).S))
        dist2 = curve.x1 * curve.x1 + curve.x2 * curve.x2
        radius = math.sqrt(float(np.max(dist2))) * outer_radius_fraction
        outer = dist2 >= radius * radius
        kappa = prof.curvature()
        floor = float(np.min((dist2 * kappa ** (1.0 - a))[outer])) / t
        ratios.append(floor / b_inv)
        times.append(t)
    ratios_arr = np.asarray(ratios)
    return EstimateReport(
        name="fd_lower_bound",
        passed=None,
        constants={
            "self_similar_constant": b_inv,
            "min_ratio": float(np.min(ratios_arr)),
            "final_ratio": float(ratios_arr[-1]),
            "trend": float(ratios_arr[-1] - ratios_arr[0]),
        },
        notes=(
            "liminf-type statement reported as a trend; ratios are the measured "
            "floor of |X|^2 kappa^(1-alpha)/t against 2a(1+a)/(1-a); the sharp "
            "statement also carries an epsilon deduction not reflected here"
        ),
    )


# ---------------------------------------------------------------------------
# closed-form barriers
# ---------------------------------------------------------------------------


def _barrier_domain_check(alpha: float, t0: float):
    limit = min(3.0, 6.0 / (1.0 + 1.0 / alpha))
    if not (0.0 < t0 < limit):
        raise ParameterDomainError(
            f"barrier needs 0 < t0 < min(3, 6/(1+1/alpha)) = {limit:g}, got {t0}"
        )


def _barrier_fields(alpha, amplitude, delta, theta, t):
    # h = A sin(3 theta / t)**(t/3) + delta on 0 < theta < t pi / 6
    x = 3.0 * theta / t
    phi = np.sin(x)
    w = amplitude * phi ** (t / 3.0)
    # dw/dt = (A/3) phi**(t/3) (log phi - x cot x)
    w_t = (amplitude / 3.0) * phi ** (t / 3.0) * (np.log(phi) - x * np.cos(x) / phi)
    # exactly w_tt + w = A (1 - 3/t) phi**(t/3 - 2)
    shape = amplitude * (1.0 - 3.0 / t) * phi ** (t / 3.0 - 2.0)
    hfun = w + delta
    residual = w_t - alpha * hfun ** (1.0 + 1.0 / alpha) * (shape + delta)
    return residual


def barrier_residual(
    alpha: float,
    amplitude: float,
    delta: float,
    t0: float,
    n_theta: int = 200,
    n_time: int = 200,
    tol: float = 1e-10,
) -> EstimateReport:
    """Pointwise supersolution residual of the end barrier.

    Evaluates ``h_t - alpha h**(1+1/alpha) (h_tt + h)`` for
    ``h = A sin(3 theta/t)**(t/3) + delta`` on the cone
    ``0 < theta < t pi/6, 0 < t <= t0`` by closed-form differentiation, and
    passes if the minimum residual is at least ``-tol``.
    """
    _barrier_domain_check(alpha, t0)
    if amplitude <= 0.0 or delta < 0.0:
        raise ParameterDomainError("need amplitude > 0 and delta >= 0")
    worst = math.inf
    worst_at = (0.0, 0.0)
    for j in range(1, n_time + 1):
        t = t0 * j / n_time
        theta = (t * math.pi / 6.0) * (np.arange(1, n_theta + 1) / (n_theta + 1))
        res = _barrier_fields(alpha, amplitude, delta, theta, t)
        k = int(np.argmin(res))
        if float(res[k]) < worst:
            worst = float(res[k])
            worst_at = (float(theta[k]), t)
    return _report_from_slack(
        "barrier_residual",
        worst,
        tol,
        {"amplitude": amplitude, "delta": delta, "t0": t0, "min_residual": worst},
        worst=worst_at,
    )


def bisect_barrier_amplitude(
    alpha: float,
    delta: float,
    t0: float,
    n_theta: int = 200,
    n_time: int = 200,
    tol: float = 1e-10,
    rel_precision: float = 1e-3,
) -> float:
    """Smallest amplitude passing :func:`barrier_residual`, by bisection.

    The threshold amplitude is not explicit in the supersolution lemma; the
    residual is eventually monotone in the amplitude, so bisection against
    the sampled-minimum predicate is the oracle.
    """
    _barrier_domain_check(alpha, t0)

    def passes(amp: float) -> bool:
        return barrier_residual(
            alpha, amp, delta, t0, n_theta=n_theta, n_time=n_time, tol=tol
        ).passed

    lo, hi = 1e-3, 1.0
    while not passes(hi):
        lo, hi = hi, hi * 2.0
        if hi > 1e6:
            raise ParameterDomainError("no passing amplitude found below 1e6")
    while (hi - lo) / hi > rel_precision:
        mid = 0.5 * (lo + hi)
        if passes(mid):
            hi = mid
        else:
            lo = mid
    return hi


def fd_barrier_residual(
    alpha: float,
    mu: float,
    x: np.ndarray,
    t: np.ndarray,
    b_scale: float = 1.0,
    rel_tol: float = 1e-8,
) -> EstimateReport:
    """Closed-form residual of the self-similar fast-diffusion solution.

    ``U(x, t) = t**(-1/(a+1)) (mu**-2 + b x^2 t**(-2/(a+1)))**(-1/(1-a))``
    with ``1/b = 2a(1+a)/(1-a)`` solves ``f_t = (f**a)_xx`` exactly; both
    sides are evaluated by hard-coded exact derivatives and compared
    pointwise against ``rel_tol`` times the local scale.  ``b_scale != 1``
    is the negative-control knob (wrong constant, order-one residual).
    """
    a = alpha
    if not (0.0 < a < 1.0):
        raise ParameterDomainError(f"fast diffusion needs alpha in (0,1), got {a}")
    if mu <= 0.0:
        raise ParameterDomainError("mu must be positive")
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0.0):
        raise ParameterDomainError("t must be positive")
    X, T = np.meshgrid(x, t, indexing="ij")
    sigma = 1.0 / (a + 1.0)
    b = b_scale * (1.0 - a) / (2.0 * a * (1.0 + a))
    rho = mu**-2 + b * X**2 * T ** (-2.0 * sigma)
    e = 1.0 / (1.0 - a)
    U_t = (
        -sigma * T ** (-sigma - 1.0) * rho**-e
        + 2.0 * sigma * b * e * X**2 * T ** (-3.0 * sigma - 1.0) * rho ** (-e - 1.0)
    )
    Ua_xx = (
        -2.0 * a * b * e * T ** (-(a + 2.0) * sigma) * rho**-e
        + 4.0 * a * b**2 * e**2 * X**2 * T ** (-(a + 4.0) * sigma) * rho ** (-e - 1.0)
    )
    scale = np.maximum(np.abs(U_t), np.abs(Ua_xx))
    residual = np.abs(U_t - Ua_xx)
    rel = residual / np.maximum(scale, 1e-300)
    worst = float(np.max(rel))
    i, j = np.unravel_index(int(np.argmax(rel)), rel.shape)
    return _report_from_slack(
        "fd_barrier_residual",
        rel_tol - worst,
        0.0,
        {"max_rel_residual": worst, "mu": mu, "b": b, "b_scale": b_scale},
        worst=(float(X[i, j]), float(T[i, j])),
        notes="slack = rel_tol - max |U_t - (U^alpha)_xx| / scale",
    )


# ---------------------------------------------------------------------------
# sharp Poincare inequality on a symmetric subinterval
# ---------------------------------------------------------------------------


def _poincare_modes(coeffs: np.ndarray, delta: float):
    length = math.pi - 2.0 * delta
    ks = np.arange(1, coeffs.size + 1)
    freq = ks * math.pi / length
    return length, ks, freq


def poincare_slack_quadrature(
    coeffs: np.ndarray, delta: float, n_quad: int = 256
) -> float:
    """``int f'^2 - (pi/(pi-2 delta))^2 int f^2`` by Gauss-Legendre quadrature.

    ``f = sum_k a_k sin(k pi (theta - delta)/(pi - 2 delta))`` vanishes at
    both collar ends by construction.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    length, _, freq = _poincare_modes(coeffs, delta)
    xg, wg = np.polynomial.legendre.leggauss(n_quad)
    theta = delta + 0.5 * length * (xg + 1.0)
    wq = 0.5 * length * wg
    phase = np.outer(freq, theta - delta)
    f = coeffs @ np.sin(phase)
    fp = (coeffs * freq) @ np.cos(phase)
    int_fp2 = float(np.sum(wq * fp * fp))
    int_f2 = float(np.sum(wq * f * f))
    return int_fp2 - (math.pi / length) ** 2 * int_f2


def poincare_slack_exact(coeffs: np.ndarray, delta: float) -> float:
    """Mode-sum value of the same slack: ``(pi/L)^2 (L/2) sum (k^2-1) a_k^2``."""
    coeffs = np.asarray(coeffs, dtype=float)
    length, ks, _ = _poincare_modes(coeffs, delta)
    return float(
        (math.pi / length) ** 2 * (length / 2.0) * np.sum((ks**2 - 1) * coeffs**2)
    )


def check_poincare(
    coeffs: np.ndarray, delta: float, tol: float = 1e-12, oracle_tol: float = 1e-10
) -> EstimateReport:
    """Sharp Poincare inequality for sine series vanishing at the collar ends.

    Quadrature slack must be nonnegative (within ``tol``) and must agree
    with the independent mode-sum value to ``oracle_tol`` (both absolute and
    relative to the function's energy).
    """
    if not (0.0 < delta < math.pi / 2):
        raise ParameterDomainError(f"delta must lie in (0, pi/2), got {delta}")
    slack_q = poincare_slack_quadrature(coeffs, delta)
    slack_e = poincare_slack_exact(coeffs, delta)
    scale = max(1.0, float(np.sum(np.square(coeffs))))
    oracle_gap = abs(slack_q - slack_e) / scale
    passed = slack_q >= -tol and oracle_gap <= oracle_tol
    return EstimateReport(
        name="poincare",
        passed=bool(passed),
        constants={
            "slack": slack_q,
            "slack_exact": slack_e,
            "oracle_gap": oracle_gap,
            "delta": delta,
        },
        tolerance=tol,
    )
