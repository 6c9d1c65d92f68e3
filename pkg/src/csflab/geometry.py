"""Planar geometry derived from angular states.

Positions come from integrating the tangent against the radius of curvature:
``X(t1) - X(t0) = (int sin/kappa, int -cos/kappa) dtheta``.  The integrand
has power-law endpoint behavior, so the uniform grid undersamples the tails;
wherever a full-interval integral is needed the outermost decade of nodes is
fit with ``u ~ c theta**q`` and the fitted tail is integrated analytically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import AngularGrid, CurveSample, SpeedProfile, SupportState, laplacian
from .errors import DivergentIntegralError, ReconstructionError

__all__ = [
    "GraphFunction",
    "reconstruct",
    "width",
    "to_graph",
    "support_of",
    "tip_anchor",
    "support_compatibility_defect",
]

_TAIL_FIT_NODES = 5  # one decade in theta on a cell-centered grid


@dataclass(frozen=True)
class GraphFunction:
    """Convex graph representation ``(x, f(x), f_x(x))`` over the slab."""

    x: np.ndarray
    f: np.ndarray
    fx: np.ndarray


def _tail_power_fit(values: np.ndarray, nodes: np.ndarray) -> tuple[float, float]:
    """Least-squares fit ``u ~ exp(lnc) * theta**q`` over the outermost nodes."""
    k = _TAIL_FIT_NODES
    q, lnc = np.polyfit(np.log(nodes[:k]), np.log(values[:k]), 1)
    return float(q), float(lnc)


def _tail_width(q: float, lnc: float, alpha: float, a: float) -> float:
    """``int_0^a sin(y) (c y**q)**(-1/alpha) dy`` with ``sin y ~ y - y^3/6``."""
    e = 1.0 - q / alpha
    if e <= -1.0:
        raise DivergentIntegralError(
            f"width tail diverges: fitted end behavior u ~ theta**{q:.3f} "
            f"is too heavy for alpha = {alpha}"
        )
    c = math.exp(-lnc / alpha)
    lead = c * a ** (e + 1.0) / (e + 1.0)
    corr = -c * a ** (e + 3.0) / (6.0 * (e + 3.0))
    return lead + corr


def width(profile: SpeedProfile) -> float:
    """Horizontal slab extent ``int_0^pi sin(theta) u**(-1/alpha) dtheta``.

    Midpoint rule over the interior cells, with the first and last cell
    replaced by analytically integrated power-law tails fitted to the
    outermost decade of nodes.

    Raises
    ------
    DivergentIntegralError
        If the fitted end behavior makes the integrand non-integrable.
    """
    grid = profile.grid
    theta = grid.nodes
    h = grid.spacing
    u = profile.values
    a = profile.alpha
    f = np.sin(theta) * u ** (-1.0 / a)
    core = h * float(np.sum(f[1:-1]))
    qL, lncL = _tail_power_fit(u, theta)
    qR, lncR = _tail_power_fit(u[::-1], theta)
    # cell 0 covers (0, h); by grid symmetry the mirrored tail uses the same
    # node coordinates measured from the right end
    return core + _tail_width(qL, lncL, a, h) + _tail_width(qR, lncR, a, h)


def reconstruct(profile: SpeedProfile, anchor=(0.0, 0.0)) -> CurveSample:
    """Rebuild curve points from the speed, tip anchored at ``anchor``.

    Cumulative trapezoid of ``(sin/kappa, -cos/kappa)`` outward from
    ``theta = pi/2``; the accumulated position at ``pi/2`` is shifted onto
    the anchor.  The stored width includes the fitted tails beyond the
    outermost nodes.
    """
    grid = profile.grid
    theta = grid.nodes
    h = grid.spacing
    inv_kappa = profile.values ** (-1.0 / profile.alpha)
    fx = np.sin(theta) * inv_kappa
    fy = -np.cos(theta) * inv_kappa

    def cum(f):
        inc = 0.5 * h * (f[1:] + f[:-1])
        out = np.concatenate([[0.0], np.cumsum(inc)])
        n = grid.n
        mid = 0.5 * (out[n // 2] + out[n // 2 - 1]) if n % 2 == 0 else out[n // 2]
        return out - mid

    x1 = cum(fx) + anchor[0]
    x2 = cum(fy) + anchor[1]
    if np.any(np.diff(x1) <= 0.0):
        raise ReconstructionError("reconstructed x1 is not strictly increasing")
    total_width = width(profile)
    tip_index = int(np.argmin(np.abs(theta - math.pi / 2)))
    return CurveSample(theta=theta, x1=x1, x2=x2, width=total_width, tip_index=tip_index)


def to_graph(curve: CurveSample, num_points: int = 0) -> GraphFunction:
    """Resample a convex curve as a graph ``f`` on a uniform x-grid.

    Monotone cubic interpolation preserves convexity; the slope comes from
    the tangent relation ``f_x(x1(theta)) = -cot(theta)`` rather than from
    differencing the interpolant.
    """
    from scipy.interpolate import PchipInterpolator

    if np.any(np.diff(curve.x1) <= 0.0):
        raise ReconstructionError("curve sample is not a graph: x1 not increasing")
    n = num_points if num_points > 0 else curve.x1.size
    x = np.linspace(curve.x1[0], curve.x1[-1], n)
    f = PchipInterpolator(curve.x1, curve.x2)(x)
    slopes = -np.cos(curve.theta) / np.sin(curve.theta)
    fx = PchipInterpolator(curve.x1, slopes)(x)
    return GraphFunction(x=x, f=f, fx=fx)


def tip_anchor(state: SupportState) -> tuple[float, float]:
    """Absolute position of the tip encoded by the support function.

    The point with vertical inner normal sits at
    ``(S_theta(pi/2), -S(pi/2))``; on an even grid both quantities are read
    off the two middle nodes.
    """
    S = state.values
    h = state.grid.spacing
    n = state.grid.n
    if n % 2 == 0:
        s_mid = 0.5 * (S[n // 2 - 1] + S[n // 2])
        ds_mid = (S[n // 2] - S[n // 2 - 1]) / h
    else:
        s_mid = float(S[n // 2])
        ds_mid = (S[n // 2 + 1] - S[n // 2 - 1]) / (2.0 * h)
    return float(ds_mid), float(-s_mid)


def support_of(curve: CurveSample, time: float = 0.0) -> SupportState:
    """Support distances ``S(theta_i) = <-n(theta_i), X(theta_i)>``.

    On a convex sample the supremum over the curve is attained at the point
    whose inner normal is ``n(theta) = (cos theta, sin theta)``.
    """
    theta = curve.theta
    values = -np.cos(theta) * curve.x1 - np.sin(theta) * curve.x2
    n = theta.size
    grid = AngularGrid(n=n, nodes=theta, spacing=float(theta[1] - theta[0]))
    return SupportState(grid=grid, values=values, time=time)


def support_compatibility_defect(
    state_S: SupportState, profile: SpeedProfile, margin: float = 0.2
) -> float:
    """Max of ``|D2 S + S - u**(-1/alpha)|`` over a fixed interior collar.

    The radius of curvature diverges at the ends, so the second difference
    of S only converges on collars bounded away from ``theta in {0, pi}``;
    there the defect is O(dtheta^2).
    """
    mask = profile.grid.interior_slice(margin)
    r = profile.values ** (-1.0 / profile.alpha)
    lap = laplacian(state_S.values, profile.grid.spacing)
    return float(np.max(np.abs((lap + state_S.values - r)[mask])))
