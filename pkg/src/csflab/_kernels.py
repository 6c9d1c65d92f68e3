"""Compiled inner loops of the explicit time steppers.

The numpy implementations in :mod:`csflab.flow` are the readable reference;
these kernels repeat the same arithmetic operation-for-operation (same
stencils, same association order, fastmath off) so that both paths produce
bit-identical trajectories.
"""

import numba
import numpy as np

# status codes returned by the advance loops
OK = 0
POSITIVITY_LOSS = 1
BLOW_UP = 2

_SPEED_CAP = 1e100  # max u**(1+1/alpha) before the run is declared blown up


@numba.njit(cache=True)
def advance_speed(u, S, c, t, t_target, alpha, h, cfl, max_halvings):
    """Advance (u, S) in place from t to t_target.

    ``c`` must hold ``u**(1 + 1/alpha)`` on entry and is kept current.
    Returns ``(t, steps, status, dt_last)``.
    """
    n = u.shape[0]
    q = 1.0 + 1.0 / alpha
    inv_h2 = 1.0 / (h * h)
    unew = np.empty(n)
    cnew = np.empty(n)
    steps = 0
    dt = 0.0
    while t < t_target:
        m = 0.0
        for i in range(n):
            if c[i] > m:
                m = c[i]
        if not np.isfinite(m) or m > _SPEED_CAP:
            return t, steps, BLOW_UP, dt
        dt = cfl * h * h / (2.0 * alpha * m)
        if t + dt >= t_target:
            dt = t_target - t
        halvings = 0
        while True:
            ok = True
            for i in range(n):
                left = -u[0] if i == 0 else u[i - 1]
                right = -u[n - 1] if i == n - 1 else u[i + 1]
                lap = ((left + right) - 2.0 * u[i]) * inv_h2
                v = u[i] + dt * (alpha * c[i] * (lap + u[i]))
                if not (v > 0.0):
                    ok = False
                    break
                unew[i] = v
                if alpha == 1.0:
                    cnew[i] = v * v
                elif alpha == 2.0:
                    cnew[i] = v * np.sqrt(v)
                else:
                    cnew[i] = v**q
            if ok:
                break
            halvings += 1
            if halvings > max_halvings:
                return t, steps, POSITIVITY_LOSS, dt
            dt = 0.5 * dt
        for i in range(n):
            S[i] -= dt * u[i]
            u[i] = unew[i]
            c[i] = cnew[i]
        t += dt
        steps += 1
    return t, steps, OK, dt


@numba.njit(cache=True)
def advance_speed_pair(ua, Sa, ca, ub, Sb, cb, t, t_target, alpha, h, cfl, max_halvings):
    """Advance two states with a shared time step sequence.

    Using ``dt = min(dt_a, dt_b)`` each step keeps the explicit scheme's
    discrete comparison principle exact up to roundoff, so pointwise-ordered
    states stay ordered.  Returns ``(t, steps, status, dt_last)``.
    """
    n = ua.shape[0]
    q = 1.0 + 1.0 / alpha
    inv_h2 = 1.0 / (h * h)
    anew = np.empty(n)
    bnew = np.empty(n)
    steps = 0
    dt = 0.0
    while t < t_target:
        m = 0.0
        for i in range(n):
            if ca[i] > m:
                m = ca[i]
            if cb[i] > m:
                m = cb[i]
        if not np.isfinite(m) or m > _SPEED_CAP:
            return t, steps, BLOW_UP, dt
        dt = cfl * h * h / (2.0 * alpha * m)
        if t + dt >= t_target:
            dt = t_target - t
        halvings = 0
        while True:
            ok = True
            for i in range(n):
                la = -ua[0] if i == 0 else ua[i - 1]
                ra = -ua[n - 1] if i == n - 1 else ua[i + 1]
                va = ua[i] + dt * (alpha * ca[i] * (((la + ra) - 2.0 * ua[i]) * inv_h2 + ua[i]))
                lb = -ub[0] if i == 0 else ub[i - 1]
                rb = -ub[n - 1] if i == n - 1 else ub[i + 1]
                vb = ub[i] + dt * (alpha * cb[i] * (((lb + rb) - 2.0 * ub[i]) * inv_h2 + ub[i]))
                if not (va > 0.0 and vb > 0.0):
                    ok = False
                    break
                anew[i] = va
                bnew[i] = vb
            if ok:
                break
            halvings += 1
            if halvings > max_halvings:
                return t, steps, POSITIVITY_LOSS, dt
            dt = 0.5 * dt
        for i in range(n):
            Sa[i] -= dt * ua[i]
            Sb[i] -= dt * ub[i]
            ua[i] = anew[i]
            ub[i] = bnew[i]
            if alpha == 1.0:
                ca[i] = ua[i] * ua[i]
                cb[i] = ub[i] * ub[i]
            elif alpha == 2.0:
                ca[i] = ua[i] * np.sqrt(ua[i])
                cb[i] = ub[i] * np.sqrt(ub[i])
            else:
                ca[i] = ua[i] ** q
                cb[i] = ub[i] ** q
        t += dt
        steps += 1
    return t, steps, OK, dt


@numba.njit(cache=True)
def advance_pressure(p, t, t_target, alpha, h, cfl, max_halvings):
    """Advance the pressure field p = kappa**(alpha+1) in place.

    Boundary closure: one-sided stencils exact on span{theta**k, theta**(k+2)}
    with k = 1 + 1/alpha, the leading end behavior of the pressure of a curve
    whose speed vanishes linearly.  Returns ``(t, steps, status, dt_last)``.
    """
    n = p.shape[0]
    inv_h2 = 1.0 / (h * h)
    kap = 1.0 + 1.0 / alpha
    c3 = 3.0**-kap
    wl0 = 0.5 * (8.0 * kap * kap - 12.0 * kap - 2.0) * inv_h2
    wl1 = 0.5 * (4.0 * kap + 2.0) * c3 * inv_h2
    wd0 = (8.0 * kap - 2.0) / (4.0 * h)
    wd1 = 2.0 * c3 / (4.0 * h)
    grad_coef = alpha / (alpha + 1.0)
    pnew = np.empty(n)
    steps = 0
    dt = 0.0
    while t < t_target:
        m = 0.0
        for i in range(n):
            if p[i] > m:
                m = p[i]
        if not np.isfinite(m) or m > _SPEED_CAP:
            return t, steps, BLOW_UP, dt
        dt = cfl * h * h / (2.0 * alpha * m)
        if t + dt >= t_target:
            dt = t_target - t
        halvings = 0
        while True:
            ok = True
            for i in range(n):
                if i == 0:
                    lap = wl0 * p[0] + wl1 * p[1]
                    dp = wd0 * p[0] + wd1 * p[1]
                elif i == n - 1:
                    lap = wl0 * p[n - 1] + wl1 * p[n - 2]
                    dp = -(wd0 * p[n - 1] + wd1 * p[n - 2])
                else:
                    lap = ((p[i - 1] + p[i + 1]) - 2.0 * p[i]) * inv_h2
                    dp = (p[i + 1] - p[i - 1]) / (2.0 * h)
                v = p[i] + dt * (
                    alpha * p[i] * lap - grad_coef * dp * dp + (alpha + 1.0) * p[i] * p[i]
                )
                if not (v > 0.0):
                    ok = False
                    break
                pnew[i] = v
            if ok:
                break
            halvings += 1
            if halvings > max_halvings:
                return t, steps, POSITIVITY_LOSS, dt
            dt = 0.5 * dt
        for i in range(n):
            p[i] = pnew[i]
        t += dt
        steps += 1
    return t, steps, OK, dt
