"""Translating solitons of the power curve-shortening flow.

A curve translating vertically with speed ``c`` satisfies
``kappa**alpha = c * sin(theta)``.  For ``alpha > 1/2`` there is exactly one
such curve spanning the slab ``(-1, 1)``; its speed ``m(alpha)`` and profile
are computed here by endpoint-singular quadrature.  For ``alpha <= 1/2`` the
width integral diverges and translators are entire graphs instead.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .domain import (
    AngularGrid,
    CurveSample,
    sin_power_half_integral,
    sin_power_integral,
)
from .errors import ConfigurationError, EntireGraphRegimeError

__all__ = [
    "Regime",
    "SolitonData",
    "classify_regime",
    "translator_speed",
    "translator_profile",
    "translator_height_limit",
]


class Regime(enum.Enum):
    """Qualitative type of the translator at a given exponent."""

    #: alpha in (1/2, 1]: confined to a slab, ends climb to infinite height.
    STRIP_BOUND = "strip_bound"
    #: alpha > 1: confined to a slab with finite height, continued by two
    #: vertical rays (C^1 only at the junctions).
    STRIP_BOUND_WITH_RAYS = "strip_bound_with_rays"
    #: alpha in (0, 1/2]: translators are entire graphs over the line.
    ENTIRE_GRAPH = "entire_graph"


def classify_regime(alpha: float) -> Regime:
    """Classify the translator regime by exact comparison on ``alpha``."""
    if not (alpha > 0.0):
        raise ConfigurationError(f"alpha must be positive, got {alpha}")
    if alpha <= 0.5:
        return Regime.ENTIRE_GRAPH
    if alpha <= 1.0:
        return Regime.STRIP_BOUND
    return Regime.STRIP_BOUND_WITH_RAYS


@dataclass(frozen=True)
class SolitonData:
    """Speed and sampled profile of the unique slab translator.

    The stationary speed field is ``u*(theta) = speed * sin(theta)``; the
    profile is anchored with its tip (the point with vertical normal) at the
    origin, ``x1`` odd and ``x2`` even about ``theta = pi/2``.
    """

    alpha: float
    speed: float
    profile: CurveSample
    regime: Regime

    def stationary_speed(self, theta) -> np.ndarray:
        return self.speed * np.sin(np.asarray(theta, dtype=float))


def translator_speed(alpha: float, width: float = 2.0) -> float:
    """Vertical speed of the translator spanning a slab of the given width.

    The speed is ``(I(alpha) / width)**alpha`` with
    ``I(alpha) = integral_0^pi sin(y)**(1 - 1/alpha) dy``; the default
    ``width = 2`` corresponds to the slab ``(-1, 1)``.

    Raises
    ------
    EntireGraphRegimeError
        For ``alpha <= 1/2``: the width integral diverges and no slab-bound
        translator exists.
    """
    if classify_regime(alpha) is Regime.ENTIRE_GRAPH:
        raise EntireGraphRegimeError(
            f"no slab-bound translator for alpha = {alpha} <= 1/2 "
            "(translators are entire graphs)"
        )
    if not (width > 0.0):
        raise ConfigurationError(f"width must be positive, got {width}")
    total = sin_power_integral(1.0 - 1.0 / alpha)
    return (total / width) ** alpha


def translator_height_limit(alpha: float) -> float:
    """Height of the profile ends over the tip: ``lim x2`` as ``theta -> pi``.

    Infinite for ``alpha in (1/2, 1]``; for ``alpha > 1`` the end integral is
    integrable and the limit equals ``m**(-1/alpha) * alpha / (alpha - 1)``.
    """
    regime = classify_regime(alpha)
    if regime is Regime.ENTIRE_GRAPH:
        raise EntireGraphRegimeError(
            f"no slab-bound translator for alpha = {alpha} <= 1/2"
        )
    if regime is Regime.STRIP_BOUND:
        return math.inf
    m = translator_speed(alpha)
    return m ** (-1.0 / alpha) * alpha / (alpha - 1.0)


def _height_above_tip(alpha: float, m: float, theta: np.ndarray) -> np.ndarray:
    # x2(theta) = -m**(-1/alpha) * integral_{pi/2}^theta sin(y)**(-1/alpha) cos(y) dy,
    # with the exact antiderivative sin(y)**(1 - 1/alpha) / (1 - 1/alpha).
    s = np.sin(theta)
    if alpha == 1.0:
        return -np.log(s) / m
    e = 1.0 - 1.0 / alpha
    return m ** (-1.0 / alpha) * (1.0 - s**e) / e


def translator_profile(alpha: float, grid: AngularGrid) -> SolitonData:
    """Sample the slab translator profile on an angular grid.

    Horizontal position by cumulative quadrature of ``sin**(1 - 1/alpha)``
    from the tip, vertical position by the closed-form antiderivative of
    ``sin**(-1/alpha) * cos``; the tip ``theta = pi/2`` is anchored at the
    origin.
    """
    m = translator_speed(alpha)
    regime = classify_regime(alpha)
    p = 1.0 - 1.0 / alpha
    theta = grid.nodes
    half = math.pi / 2

    # signed integral of sin**p from pi/2 to theta, folded so the singular
    # endpoints are evaluated at 0
    quarter = float(sin_power_half_integral(p, half))
    lower = theta <= half
    from_zero = np.empty_like(theta)
    from_zero[lower] = sin_power_half_integral(p, theta[lower])
    from_zero[~lower] = 2.0 * quarter - sin_power_half_integral(
        p, math.pi - theta[~lower]
    )
    x1 = m ** (-1.0 / alpha) * (from_zero - quarter)
    x2 = _height_above_tip(alpha, m, theta)

    width = m ** (-1.0 / alpha) * 2.0 * quarter  # exactly 2 by choice of m
    tip_index = int(np.argmin(np.abs(theta - half)))
    profile = CurveSample(theta=theta, x1=x1, x2=x2, width=width, tip_index=tip_index)
    return SolitonData(alpha=alpha, speed=m, profile=profile, regime=regime)
