"""Time integration of the speed evolution in the normal-angle gauge.

Primary field: ``u = kappa**alpha`` obeying
``du/dt = alpha * u**(1 + 1/alpha) * (u_theta_theta + u)``.
The support function ``S`` is co-evolved by the exact law ``dS/dt = -u``,
anchoring absolute geometry and providing a free consistency monitor.
A redundant stepper for the pressure ``p = kappa**(alpha + 1)`` with
``dp/dt = alpha p p_tt - alpha/(alpha+1) p_t**2 + (alpha+1) p**2`` serves as
a cross-validation lane.

Explicit Euler with a CFL-limited step
``dt = cfl_safety * dtheta**2 / (2 alpha max u**(1 + 1/alpha))`` keeps the
scheme monotone, so the discrete comparison principle used by the property
tests holds by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .domain import (
    AngularGrid,
    FlowParams,
    SpeedProfile,
    SupportState,
    laplacian,
    gradient,
    quad_endpoint_singular,
)
from .errors import (
    ConfigurationError,
    DivergentIntegralError,
    IntegrationFailureError,
    InvalidRecipeError,
    PositivityLossError,
)
from .soliton import translator_speed

__all__ = [
    "FlowState",
    "PressureState",
    "FlowTrace",
    "ExactTranslator",
    "MultiplicativePerturbation",
    "PiecewiseBuilt",
    "InitialDataRecipe",
    "rhs_u",
    "rhs_pressure",
    "cfl_dt",
    "step",
    "step_pressure",
    "evolve",
    "evolve_pressure",
    "evolve_pair",
    "build_initial",
    "pressure_of",
]

DEFAULT_MAX_HALVINGS = 10


@dataclass(frozen=True)
class FlowState:
    """Speed and support function sharing one grid and one time stamp."""

    u: SpeedProfile
    S: SupportState
    step_count: int = 0
    dt_last: float = 0.0

    def __post_init__(self):
        if self.u.grid is not self.S.grid and not np.array_equal(
            self.u.grid.nodes, self.S.grid.nodes
        ):
            raise ConfigurationError("u and S must share one grid")
        if self.u.time != self.S.time:
            raise ConfigurationError(
                f"u and S must share one time stamp, got {self.u.time} != {self.S.time}"
            )

    @property
    def t(self) -> float:
        return self.u.time

    @property
    def grid(self) -> AngularGrid:
        return self.u.grid

    @property
    def alpha(self) -> float:
        return self.u.alpha


@dataclass(frozen=True)
class PressureState:
    """Pressure field ``p = kappa**(alpha+1)`` on the grid."""

    grid: AngularGrid
    values: np.ndarray
    alpha: float
    time: float = 0.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if values.shape != (self.grid.n,):
            raise ConfigurationError("pressure values do not match the grid")
        if not np.all(np.isfinite(values)) or not np.all(values > 0.0):
            raise ConfigurationError("pressure must be finite and strictly positive")


@dataclass
class FlowTrace:
    """States sampled along one run, plus step statistics."""

    alpha: float
    grid: AngularGrid
    times: np.ndarray
    u: np.ndarray  # (len(times), n)
    S: np.ndarray  # (len(times), n)
    total_steps: int = 0
    dt_min: float = math.inf
    dt_max: float = 0.0
    metadata: dict = field(default_factory=dict)

    def profile(self, k: int) -> SpeedProfile:
        return SpeedProfile(
            grid=self.grid, values=self.u[k], alpha=self.alpha, time=float(self.times[k])
        )

    def state(self, k: int) -> FlowState:
        t = float(self.times[k])
        return FlowState(
            u=SpeedProfile(grid=self.grid, values=self.u[k], alpha=self.alpha, time=t),
            S=SupportState(grid=self.grid, values=self.S[k], time=t),
        )

    def index_at(self, t: float) -> int:
        k = int(np.argmin(np.abs(self.times - t)))
        if abs(float(self.times[k]) - t) > 1e-9 + 1e-9 * abs(t):
            raise KeyError(f"time {t} was not sampled")
        return k


def pressure_of(profile: SpeedProfile) -> PressureState:
    """Pressure ``p = u**((alpha+1)/alpha)`` matched to a speed profile."""
    a = profile.alpha
    return PressureState(
        grid=profile.grid,
        values=profile.values ** ((a + 1.0) / a),
        alpha=a,
        time=profile.time,
    )


# ---------------------------------------------------------------------------
# right-hand sides and single steps (numpy reference path)
# ---------------------------------------------------------------------------


def rhs_u(profile: SpeedProfile) -> np.ndarray:
    """Evolution speed of u: ``alpha u**(1+1/alpha) (D2 u + u)``."""
    a = profile.alpha
    u = profile.values
    return a * u ** (1.0 + 1.0 / a) * (laplacian(u, profile.grid.spacing) + u)


def _pressure_boundary_weights(alpha: float, h: float):
    # one-sided stencils exact on span{theta**k, theta**(k+2)}, k = 1 + 1/alpha
    kap = 1.0 + 1.0 / alpha
    c3 = 3.0**-kap
    inv_h2 = 1.0 / (h * h)
    wl0 = 0.5 * (8.0 * kap * kap - 12.0 * kap - 2.0) * inv_h2
    wl1 = 0.5 * (4.0 * kap + 2.0) * c3 * inv_h2
    wd0 = (8.0 * kap - 2.0) / (4.0 * h)
    wd1 = 2.0 * c3 / (4.0 * h)
    return wl0, wl1, wd0, wd1


def rhs_pressure(state: PressureState) -> np.ndarray:
    """Evolution speed of p: ``alpha p D2 p - alpha/(alpha+1) (D p)**2 + (alpha+1) p**2``."""
    a = state.alpha
    p = state.values
    h = state.grid.spacing
    lap = laplacian(p, h)
    dp = gradient(p, h)
    wl0, wl1, wd0, wd1 = _pressure_boundary_weights(a, h)
    lap[0] = wl0 * p[0] + wl1 * p[1]
    lap[-1] = wl0 * p[-1] + wl1 * p[-2]
    dp[0] = wd0 * p[0] + wd1 * p[1]
    dp[-1] = -(wd0 * p[-1] + wd1 * p[-2])
    return a * p * lap - a / (a + 1.0) * dp * dp + (a + 1.0) * p * p


def cfl_dt(values: np.ndarray, alpha: float, spacing: float, cfl_safety: float) -> float:
    """Explicit stability step for diffusion coefficient ``alpha u**(1+1/alpha)``."""
    coef = float(np.max(values ** (1.0 + 1.0 / alpha)))
    return cfl_safety * spacing * spacing / (2.0 * alpha * coef)


def step(
    state: FlowState, params: FlowParams, max_halvings: int = DEFAULT_MAX_HALVINGS
) -> FlowState:
    """One explicit Euler step of (u, S) at the CFL-limited step size.

    On loss of strict positivity the step is retried with ``dt/2``, at most
    ``max_halvings`` times; exhaustion raises :class:`PositivityLossError`
    rather than silently clipping.
    """
    u = state.u.values
    a = state.alpha
    h = state.grid.spacing
    dt = cfl_dt(u, a, h, params.cfl_safety)
    rhs = rhs_u(state.u)
    for _ in range(max_halvings + 1):
        unew = u + dt * rhs
        if np.all(unew > 0.0):
            t = state.t + dt
            return FlowState(
                u=state.u.with_values(unew, time=t),
                S=SupportState(grid=state.grid, values=state.S.values - dt * u, time=t),
                step_count=state.step_count + 1,
                dt_last=dt,
            )
        dt *= 0.5
    raise PositivityLossError(
        f"positivity lost at t = {state.t} after {max_halvings} step halvings",
        time=state.t,
    )


def step_pressure(
    state: PressureState, params: FlowParams, max_halvings: int = DEFAULT_MAX_HALVINGS
) -> PressureState:
    """One explicit Euler step of the pressure form under the same CFL policy."""
    p = state.values
    a = state.alpha
    # diffusion coefficient of the pressure form is alpha * p
    dt = params.cfl_safety * state.grid.spacing**2 / (2.0 * a * float(np.max(p)))
    rhs = rhs_pressure(state)
    for _ in range(max_halvings + 1):
        pnew = p + dt * rhs
        if np.all(pnew > 0.0):
            return PressureState(
                grid=state.grid, values=pnew, alpha=a, time=state.time + dt
            )
        dt *= 0.5
    raise PositivityLossError(
        f"pressure positivity lost at t = {state.time}", time=state.time
    )


# ---------------------------------------------------------------------------
# full evolutions (compiled path)
# ---------------------------------------------------------------------------


def _check_status(status: int, t: float):
    if status == _kernels.POSITIVITY_LOSS:
        raise PositivityLossError(
            f"positivity lost at t = {t} after {DEFAULT_MAX_HALVINGS} halvings", time=t
        )
    if status == _kernels.BLOW_UP:
        raise IntegrationFailureError(f"speed blew up at t = {t}", time=t)


def _resolve_sample_times(t0: float, t_end: float, sample_times) -> np.ndarray:
    if sample_times is None:
        samples = np.array([t_end], dtype=float)
    else:
        samples = np.asarray(sample_times, dtype=float)
    if samples.size == 0:
        samples = np.array([t_end], dtype=float)
    if np.any(np.diff(samples) <= 0.0):
        raise ConfigurationError("sample_times must be strictly increasing")
    if samples[0] < t0 - 1e-12 or samples[-1] > t_end + 1e-12:
        raise ConfigurationError("sample_times must lie within [state.t, t_end]")
    if abs(samples[-1] - t_end) > 1e-12:
        samples = np.append(samples, t_end)
    return samples


def evolve(
    state: FlowState,
    params: FlowParams,
    observers: Sequence[Callable[[FlowState], None]] = (),
    sample_times=None,
) -> tuple[FlowState, FlowTrace]:
    """Advance a state to ``params.t_end``, sampling along the way.

    Observers are invoked with a read-only state snapshot at every sample
    time (and at the initial time).  The returned trace carries the sampled
    fields; integration failures propagate with the failing time attached.
    """
    if params.t_end < state.t:
        raise ConfigurationError(f"t_end={params.t_end} is before state.t={state.t}")
    a = state.alpha
    grid = state.grid
    if params.t_end == state.t:
        trace = FlowTrace(
            alpha=a,
            grid=grid,
            times=np.array([state.t]),
            u=state.u.values[None, :].copy(),
            S=state.S.values[None, :].copy(),
        )
        for obs in observers:
            obs(state)
        return state, trace

    samples = _resolve_sample_times(state.t, params.t_end, sample_times)
    times = np.concatenate([[state.t], samples])
    n = grid.n
    us = np.empty((times.size, n))
    Ss = np.empty((times.size, n))
    us[0] = state.u.values
    Ss[0] = state.S.values

    u = state.u.values.copy()
    S = state.S.values.copy()
    c = u ** (1.0 + 1.0 / a)
    t = state.t
    total = 0
    dt_min, dt_max = math.inf, 0.0
    for obs in observers:
        obs(state)
    for k, t_target in enumerate(samples):
        t, steps, status, dt_last = _kernels.advance_speed(
            u, S, c, t, float(t_target), a, grid.spacing, params.cfl_safety,
            DEFAULT_MAX_HALVINGS,
        )
        _check_status(status, t)
        total += steps
        if steps:
            dt_min = min(dt_min, dt_last)
            dt_max = max(dt_max, dt_last)
        t = float(t_target)
        us[k + 1] = u
        Ss[k + 1] = S
        snapshot = FlowState(
            u=SpeedProfile(grid=grid, values=us[k + 1], alpha=a, time=t),
            S=SupportState(grid=grid, values=Ss[k + 1], time=t),
            step_count=state.step_count + total,
            dt_last=dt_last,
        )
        for obs in observers:
            obs(snapshot)

    trace = FlowTrace(
        alpha=a, grid=grid, times=times, u=us, S=Ss,
        total_steps=total, dt_min=dt_min, dt_max=dt_max,
    )
    return snapshot, trace


def evolve_pressure(
    state: PressureState, params: FlowParams, sample_times=None
) -> tuple[PressureState, np.ndarray, np.ndarray]:
    """Advance the pressure form; returns final state, times, sampled values."""
    if params.t_end < state.time:
        raise ConfigurationError("t_end is before the state time")
    samples = _resolve_sample_times(state.time, params.t_end, sample_times)
    p = state.values.copy()
    vals = np.empty((samples.size + 1, p.size))
    vals[0] = p
    t = state.time
    for k, t_target in enumerate(samples):
        t, steps, status, _ = _kernels.advance_pressure(
            p, t, float(t_target), state.alpha, state.grid.spacing,
            params.cfl_safety, DEFAULT_MAX_HALVINGS,
        )
        _check_status(status, t)
        t = float(t_target)
        vals[k + 1] = p
    final = PressureState(grid=state.grid, values=p, alpha=state.alpha, time=t)
    return final, np.concatenate([[state.time], samples]), vals


def evolve_pair(
    state_a: FlowState,
    state_b: FlowState,
    params: FlowParams,
    sample_times=None,
) -> tuple[FlowTrace, FlowTrace]:
    """Advance two states with a shared step sequence (comparison runs).

    The shared ``dt = min(dt_a, dt_b)`` preserves the discrete comparison
    principle exactly, so initially ordered states remain ordered up to
    roundoff.
    """
    if not np.array_equal(state_a.grid.nodes, state_b.grid.nodes):
        raise ConfigurationError("paired states must share one grid")
    if state_a.t != state_b.t or state_a.alpha != state_b.alpha:
        raise ConfigurationError("paired states must share time and exponent")
    a = state_a.alpha
    grid = state_a.grid
    samples = _resolve_sample_times(state_a.t, params.t_end, sample_times)
    times = np.concatenate([[state_a.t], samples])
    ua, Sa = state_a.u.values.copy(), state_a.S.values.copy()
    ub, Sb = state_b.u.values.copy(), state_b.S.values.copy()
    ca = ua ** (1.0 + 1.0 / a)
    cb = ub ** (1.0 + 1.0 / a)
    usa = np.empty((times.size, grid.n))
    usb = np.empty((times.size, grid.n))
    Ssa = np.empty_like(usa)
    Ssb = np.empty_like(usb)
    usa[0], usb[0], Ssa[0], Ssb[0] = ua, ub, Sa, Sb
    t = state_a.t
    for k, t_target in enumerate(samples):
        t, steps, status, _ = _kernels.advance_speed_pair(
            ua, Sa, ca, ub, Sb, cb, t, float(t_target), a, grid.spacing,
            params.cfl_safety, DEFAULT_MAX_HALVINGS,
        )
        _check_status(status, t)
        t = float(t_target)
        usa[k + 1], usb[k + 1] = ua, ub
        Ssa[k + 1], Ssb[k + 1] = Sa, Sb
    tr_a = FlowTrace(alpha=a, grid=grid, times=times, u=usa, S=Ssa)
    tr_b = FlowTrace(alpha=a, grid=grid, times=times, u=usb, S=Ssb)
    return tr_a, tr_b


# ---------------------------------------------------------------------------
# initial data
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExactTranslator:
    """Start from the stationary profile ``u0 = m(alpha) sin(theta)``."""

    normalize_width: bool = True


@dataclass(frozen=True)
class MultiplicativePerturbation:
    """Translator times a positive trigonometric factor.

    ``g(theta) = 1 + sum_k sin_coeffs[k] sin(k theta) + sum_k cos_coeffs[k] cos(k theta)``
    must stay strictly positive on ``(0, pi)``.
    """

    sin_coeffs: tuple[tuple[int, float], ...] = ()
    cos_coeffs: tuple[tuple[int, float], ...] = ()
    normalize_width: bool = True

    @staticmethod
    def from_dicts(sin=None, cos=None, normalize_width=True) -> "MultiplicativePerturbation":
        to_items = lambda d: tuple(sorted((int(k), float(v)) for k, v in (d or {}).items()))
        return MultiplicativePerturbation(
            sin_coeffs=to_items(sin), cos_coeffs=to_items(cos),
            normalize_width=normalize_width,
        )

    def factor(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        g = np.ones_like(theta)
        for k, ak in self.sin_coeffs:
            g = g + ak * np.sin(k * theta)
        for k, bk in self.cos_coeffs:
            g = g + bk * np.cos(k * theta)
        return g


@dataclass(frozen=True)
class PiecewiseBuilt:
    """Speed profile interpolated from explicit (theta, u) samples."""

    points: tuple[tuple[float, float], ...]
    normalize_width: bool = True


InitialDataRecipe = ExactTranslator | MultiplicativePerturbation | PiecewiseBuilt


def _raw_speed(recipe: InitialDataRecipe, grid: AngularGrid, alpha: float):
    """Node values of the un-normalized u0 plus an accurate width functional."""
    m = translator_speed(alpha)
    theta = grid.nodes
    p = 1.0 - 1.0 / alpha

    if isinstance(recipe, ExactTranslator):
        u0 = m * np.sin(theta)
        width = 2.0
        return u0, width

    if isinstance(recipe, MultiplicativePerturbation):
        g_nodes = recipe.factor(theta)
        if np.any(g_nodes <= 0.0):
            raise InvalidRecipeError("perturbation factor touches zero on the grid")
        u0 = m * np.sin(theta) * g_nodes

        # width integrand m**(-1/a) sin**p(y) g(y)**(-1/a); fold about pi/2 so
        # the endpoint singularity is evaluated where sin is accurate
        def folded(v):
            return np.sin(v) ** p * (
                recipe.factor(v) ** (-1.0 / alpha)
                + recipe.factor(math.pi - v) ** (-1.0 / alpha)
            )

        try:
            width = m ** (-1.0 / alpha) * quad_endpoint_singular(
                folded, 0.0, math.pi / 2, rtol=1e-12
            )
        except DivergentIntegralError as exc:
            raise InvalidRecipeError(f"perturbed width integral diverges: {exc}") from exc
        if not math.isfinite(width) or width <= 0.0:
            raise InvalidRecipeError("perturbed width integral is not a positive number")
        return u0, width

    if isinstance(recipe, PiecewiseBuilt):
        from scipy.interpolate import PchipInterpolator

        pts = np.asarray(recipe.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 4:
            raise InvalidRecipeError("piecewise recipe needs at least 4 (theta, u) points")
        order = np.argsort(pts[:, 0])
        th, uv = pts[order, 0], pts[order, 1]
        if np.any(np.diff(th) <= 0.0):
            raise InvalidRecipeError("piecewise recipe thetas must be distinct")
        if np.any(uv <= 0.0):
            raise InvalidRecipeError("piecewise recipe has non-positive samples")
        # monotone interpolation of log u keeps the rebuilt speed positive and
        # extends the sampled end behavior smoothly onto the outermost cells
        interp = PchipInterpolator(th, np.log(uv), extrapolate=True)
        u0 = np.exp(interp(grid.nodes))
        from .geometry import width as grid_width

        profile = SpeedProfile(grid=grid, values=u0, alpha=alpha, time=0.0)
        return u0, grid_width(profile)

    raise ConfigurationError(f"unknown recipe type {type(recipe).__name__}")


def _support_from_speed(u0: np.ndarray, grid: AngularGrid, alpha: float) -> np.ndarray:
    """Solve S'' + S = u**(-1/alpha) with S(0+) = S(pi-) = 1, tip at height 0.

    Variation of parameters anchored at pi/2 (where the data is regular):
    ``S_p(theta) = integral_{pi/2}^theta sin(theta - y) r(y) dy`` plus
    ``c1 cos(theta)`` with ``c1 = 1 - S_p(0+)``; the free ``sin`` component
    (vertical translation) is set to zero, placing the tip at the origin.
    """
    theta = grid.nodes
    h = grid.spacing
    r = u0 ** (-1.0 / alpha)

    # cumulative integrals K_c(theta) = int_{pi/2}^theta cos(y) r(y) dy and
    # K_s likewise with sin, on the half-open node chain; trapezoid between
    # nodes, anchored by symmetry at the center of the grid.
    def cumulative(f):
        inc = 0.5 * h * (f[1:] + f[:-1])
        out = np.concatenate([[0.0], np.cumsum(inc)])
        # shift so the value at theta = pi/2 (midway of the chain) is zero
        mid = 0.5 * (out[grid.n // 2] + out[grid.n // 2 - 1]) if grid.n % 2 == 0 else out[grid.n // 2]
        return out - mid

    Kc = cumulative(np.cos(theta) * r)
    Ks = cumulative(np.sin(theta) * r)
    # S_p(theta) = sin(theta) * Kc(theta) - cos(theta) * Ks(theta)
    Sp = np.sin(theta) * Kc - np.cos(theta) * Ks

    # limit S_p(0+): extrapolate the tail integral of sin(y) r(y) over (0, theta_0]
    # with the fitted power of u near the end (same policy as the width tails)
    nfit = 5
    qL, lncL = np.polyfit(np.log(theta[:nfit]), np.log(u0[:nfit]), 1)
    eL = 1.0 - qL / alpha
    if eL <= -1.0:
        raise InvalidRecipeError("support integral diverges at theta = 0")
    tail0 = math.exp(-lncL / alpha) * theta[0] ** (eL + 1.0) / (eL + 1.0)
    # K_s(0+) = K_s(theta_0) - tail; S_p(0+) = -cos(0) * K_s(0+) = -K_s(0+)
    Sp0 = -(Ks[0] - tail0)
    c1 = 1.0 - Sp0
    return Sp + c1 * np.cos(theta)


def build_initial(
    recipe: InitialDataRecipe, grid: AngularGrid, alpha: float
) -> FlowState:
    """Construct a width-normalized initial state from a recipe.

    The width acts on the speed by ``width(lam * u) = lam**(-1/alpha) width(u)``,
    so the exact normalizer is ``lam = (width(u0)/2)**alpha``.  The support
    function is integrated from the compatibility identity and centered so
    that ``S(0+) = S(pi-) = 1``.
    """
    if alpha <= 0.5:
        raise ConfigurationError(f"slab initial data requires alpha > 1/2, got {alpha}")
    u0, width = _raw_speed(recipe, grid, alpha)
    if np.any(u0 <= 0.0):
        raise InvalidRecipeError("recipe produced non-positive initial speed")
    if recipe.normalize_width:
        lam = (width / 2.0) ** alpha
        u0 = lam * u0
    S0 = _support_from_speed(u0, grid, alpha)
    return FlowState(
        u=SpeedProfile(grid=grid, values=u0, alpha=alpha, time=0.0),
        S=SupportState(grid=grid, values=S0, time=0.0),
    )
