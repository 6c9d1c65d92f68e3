"""Core value types, the angular grid, and discrete calculus.

The evolving curve is parametrized by the angle ``theta`` of its inner
normal.  All grid functions live on a cell-centered uniform grid on
``(0, pi)`` so that the degenerate endpoints ``theta = 0, pi`` (where the
speed vanishes and the equation loses parabolicity) are never nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import tanhsinh

from .errors import ConfigurationError, DivergentIntegralError

MIN_GRID_SIZE = 16

__all__ = [
    "FlowParams",
    "AngularGrid",
    "SpeedProfile",
    "SupportState",
    "CurveSample",
    "make_grid",
    "second_derivative",
    "first_derivative",
    "laplacian",
    "gradient",
    "quad_endpoint_singular",
    "sin_power_integral",
    "sin_power_half_integral",
]


def _frozen_array(a) -> np.ndarray:
    arr = np.asarray(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FlowParams:
    """Run parameters of the speed evolution.

    Attributes
    ----------
    alpha : float
        Exponent of the normal speed ``kappa**alpha``.  Must be positive;
        slab evolutions additionally require ``alpha > 1/2``.
    t_end : float
        Time horizon for :func:`csflab.flow.evolve`.
    grid_size : int
        Number of interior nodes of the angular grid (``>= 16``).
    cfl_safety : float
        Safety factor in ``(0, 1)`` multiplying the explicit stability step.
    """

    alpha: float
    t_end: float
    grid_size: int = 256
    cfl_safety: float = 0.25

    def __post_init__(self):
        if not (self.alpha > 0.0):
            raise ConfigurationError(f"alpha must be positive, got {self.alpha}")
        if not (0.0 < self.cfl_safety < 1.0):
            raise ConfigurationError(
                f"cfl_safety must lie in (0, 1), got {self.cfl_safety}"
            )
        if self.grid_size < MIN_GRID_SIZE:
            raise ConfigurationError(
                f"grid_size must be >= {MIN_GRID_SIZE}, got {self.grid_size}"
            )
        if not math.isfinite(self.t_end):
            raise ConfigurationError(f"t_end must be finite, got {self.t_end}")

    def require_slab(self) -> None:
        """Reject exponents for which no slab-bound evolution exists."""
        if self.alpha <= 0.5:
            raise ConfigurationError(
                f"slab evolution requires alpha > 1/2, got alpha={self.alpha}"
            )


@dataclass(frozen=True)
class AngularGrid:
    """Cell-centered uniform grid on ``(0, pi)``.

    Nodes are ``theta_i = (i + 1/2) * pi / n`` for ``i = 0..n-1``; no node
    coincides with the degenerate boundary angles ``0`` and ``pi``.
    """

    n: int
    nodes: np.ndarray = field(repr=False)
    spacing: float

    def __post_init__(self):
        object.__setattr__(self, "nodes", _frozen_array(self.nodes))

    def interior_slice(self, margin: float) -> np.ndarray:
        """Boolean mask of nodes with ``margin <= theta <= pi - margin``."""
        return (self.nodes >= margin) & (self.nodes <= math.pi - margin)


def make_grid(n: int) -> AngularGrid:
    """Build the cell-centered angular grid with ``n`` interior nodes.

    Parameters
    ----------
    n : int
        Node count, at least 16.

    Raises
    ------
    ConfigurationError
        If ``n`` is below the minimum.
    """
    if n < MIN_GRID_SIZE:
        raise ConfigurationError(f"grid size must be >= {MIN_GRID_SIZE}, got {n}")
    spacing = math.pi / n
    nodes = (np.arange(n) + 0.5) * spacing
    return AngularGrid(n=n, nodes=nodes, spacing=spacing)


def _unsafe_grid(n: int) -> AngularGrid:
    # test-only escape hatch for tiny illustrative grids
    spacing = math.pi / n
    return AngularGrid(n=n, nodes=(np.arange(n) + 0.5) * spacing, spacing=spacing)


@dataclass(frozen=True)
class SpeedProfile:
    """The speed ``u = kappa**alpha`` sampled on the angular grid at one time.

    ``u`` is extended by zero at the two ends ``theta in {0, pi}``; strict
    positivity at every node encodes strict convexity of the curve.
    """

    grid: AngularGrid
    values: np.ndarray
    alpha: float
    time: float = 0.0

    def __post_init__(self):
        values = _frozen_array(self.values)
        object.__setattr__(self, "values", values)
        if values.shape != (self.grid.n,):
            raise ConfigurationError(
                f"values shape {values.shape} does not match grid size {self.grid.n}"
            )
        if not (self.alpha > 0.0):
            raise ConfigurationError(f"alpha must be positive, got {self.alpha}")
        if not np.all(np.isfinite(values)) or not np.all(values > 0.0):
            raise ConfigurationError("speed values must be finite and strictly positive")

    def curvature(self) -> np.ndarray:
        """Curvature ``kappa = u**(1/alpha)`` at the nodes."""
        return self.values ** (1.0 / self.alpha)

    def with_values(self, values, time=None) -> "SpeedProfile":
        return SpeedProfile(
            grid=self.grid,
            values=values,
            alpha=self.alpha,
            time=self.time if time is None else time,
        )


@dataclass(frozen=True)
class SupportState:
    """Support distance ``S(theta) = sup <-n, X>`` sampled on the grid.

    For width-2 slab data centered on ``{x1 = +-1}`` the boundary limits are
    ``S(0+) = S(pi-) = 1``.
    """

    grid: AngularGrid
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        values = _frozen_array(self.values)
        object.__setattr__(self, "values", values)
        if values.shape != (self.grid.n,):
            raise ConfigurationError(
                f"values shape {values.shape} does not match grid size {self.grid.n}"
            )
        if not np.all(np.isfinite(values)):
            raise ConfigurationError("support values must be finite")


@dataclass(frozen=True)
class CurveSample:
    """Planar points of a convex curve indexed by the normal angle.

    ``x1`` must be strictly increasing (the curve is a graph over the slab
    cross-section) and ``width`` is the full horizontal extent including the
    parts beyond the outermost sampled angles.
    """

    theta: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    width: float
    tip_index: int

    def __post_init__(self):
        object.__setattr__(self, "theta", _frozen_array(self.theta))
        object.__setattr__(self, "x1", _frozen_array(self.x1))
        object.__setattr__(self, "x2", _frozen_array(self.x2))
        if not (self.x1.shape == self.x2.shape == self.theta.shape):
            raise ConfigurationError("theta, x1, x2 must have matching shapes")


# ---------------------------------------------------------------------------
# discrete calculus
#
# Boundary closure: u is continued through theta = 0 and theta = pi by the
# odd reflection u(-theta) = -u(theta), the unique linear-leading-order
# continuation with u(boundary) = 0.  This is exact for the translator
# profile m*sin(theta) and second-difference stable for the sublinear
# theta**(2/3) end behavior; it is the recorded, swappable closure policy.
# ---------------------------------------------------------------------------


def laplacian(values: np.ndarray, spacing: float) -> np.ndarray:
    """Second difference with odd-reflection ghosts at both ends.

    Symmetric stencil ``((left + right) - 2 u) / h**2`` so the operator
    commutes bitwise with the reflection ``theta -> pi - theta``.
    """
    u = np.asarray(values, dtype=float)
    out = np.empty_like(u)
    out[1:-1] = (u[:-2] + u[2:]) - 2.0 * u[1:-1]
    out[0] = (-u[0] + u[1]) - 2.0 * u[0]
    out[-1] = (u[-2] - u[-1]) - 2.0 * u[-1]
    out /= spacing * spacing
    return out


def gradient(values: np.ndarray, spacing: float) -> np.ndarray:
    """Centered first difference with the same odd-reflection ghosts."""
    u = np.asarray(values, dtype=float)
    out = np.empty_like(u)
    out[1:-1] = u[2:] - u[:-2]
    out[0] = u[1] + u[0]
    out[-1] = -(u[-1] + u[-2])
    out /= 2.0 * spacing
    return out


def second_derivative(profile: SpeedProfile) -> np.ndarray:
    """O(dtheta^2) second derivative of a speed profile in theta.

    Interior nodes use the centered stencil; the first and last node use the
    odd-reflection ghost value consistent with ``u(0) = u(pi) = 0`` and
    linear leading behavior ``u ~ c*theta``.
    """
    return laplacian(profile.values, profile.grid.spacing)


def first_derivative(profile: SpeedProfile) -> np.ndarray:
    """Centered first derivative of a speed profile in theta."""
    return gradient(profile.values, profile.grid.spacing)


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------


def quad_endpoint_singular(f, a: float, b: float, rtol: float = 1e-10) -> float:
    """Integrate ``f`` over ``[a, b]`` by double-exponential quadrature.

    Handles integrable endpoint singularities ``(x - a)**p`` / ``(b - x)**p``
    with ``p > -1``.  The singular endpoint must sit at an abscissa where the
    integrand evaluates accurately in floating point (place it at 0 via a
    change of variables when needed; see :func:`sin_power_integral`).

    Parameters
    ----------
    f : callable
        Vectorized integrand.
    a, b : float
        Integration limits.
    rtol : float
        Requested relative tolerance (default ``1e-10``, far below the PDE
        discretization error so quadrature never dominates the error budget).

    Raises
    ------
    DivergentIntegralError
        When the double-exponential levels fail to converge, which for this
        integrand class signals a non-integrable endpoint (``p <= -1``).
    """
    if a == b:
        return 0.0
    res = tanhsinh(f, a, b, rtol=rtol)
    if not res.success:
        raise DivergentIntegralError(
            f"tanh-sinh quadrature did not converge on [{a}, {b}]; "
            "endpoint behavior is non-integrable or the integrand is invalid"
        )
    return float(res.integral)


def sin_power_half_integral(p: float, upper) -> np.ndarray:
    """Cumulative ``integral_0^upper sin(y)**p dy`` for ``upper <= pi/2``.

    Vectorized over ``upper``.  The singular endpoint sits at 0, where
    ``sin`` evaluates to full relative accuracy.  Near the critical exponent
    (``p`` close to -1) the substitution ``y = s**(1/(p+1))`` removes the
    singularity entirely, turning the integrand into the smooth bounded
    function ``(sin(y)/y)**p / (p+1)``.
    """
    if p <= -1.0:
        raise DivergentIntegralError(
            f"sin**p has a non-integrable endpoint for p = {p} <= -1"
        )
    upper = np.asarray(upper, dtype=float)
    if np.any(upper < 0.0) or np.any(upper > math.pi / 2 + 1e-12):
        raise ConfigurationError("upper limits must lie in [0, pi/2]")
    if p < -0.9:
        e = p + 1.0

        def regularized(s):
            y = s ** (1.0 / e)
            ratio = np.divide(np.sin(y), y, out=np.ones_like(y), where=y > 0.0)
            return ratio**p / e

        res = tanhsinh(regularized, np.zeros_like(upper), upper**e, rtol=1e-12)
    else:
        res = tanhsinh(lambda y: np.sin(y) ** p, np.zeros_like(upper), upper, rtol=1e-12)
    if not np.all(res.success):
        raise DivergentIntegralError(f"sin-power quadrature failed for p = {p}")
    return np.asarray(res.integral, dtype=float)


def sin_power_integral(p: float, a: float = 0.0, b: float = math.pi) -> float:
    """Accurate ``integral_a^b sin(y)**p dy`` on ``[0, pi]`` for ``p > -1``.

    Folds the integral about ``pi/2`` so that both singular endpoints are
    mapped to 0; this avoids the precision loss of evaluating ``sin`` near
    the floating-point ``pi``.
    """
    if not (0.0 <= a <= b <= math.pi + 1e-12):
        raise ConfigurationError(f"require 0 <= a <= b <= pi, got [{a}, {b}]")

    def cum(theta: float) -> float:
        # integral from 0 to theta, theta in [0, pi]
        if theta <= math.pi / 2:
            return float(sin_power_half_integral(p, theta))
        total = 2.0 * float(sin_power_half_integral(p, math.pi / 2))
        return total - float(sin_power_half_integral(p, math.pi - theta))

    return cum(b) - cum(a)
