#!/usr/bin/env python3
"""Closed-form certificates: end barrier, self-similar residual, Poincare.

Three checks that need no PDE run at all:

  * the end barrier A sin(3 theta/t)**(t/3) + delta is a pointwise
    supersolution once A clears a threshold; the threshold is found by
    bisection and the residual map is plotted;
  * the self-similar fast-diffusion profile solves f_t = (f**alpha)_xx to
    machine precision, and a wrong constant is loudly order-one off;
  * random sine series on a symmetric collar obey the sharp Poincare
    inequality with slack matching the mode-sum oracle.

Writes certificates.png next to this script.
"""

import json
from pathlib import Path

import numpy as np

from csflab import (
    barrier_residual,
    bisect_barrier_amplitude,
    check_poincare,
    fd_barrier_residual,
)
from csflab.estimates import _barrier_fields

HERE = Path(__file__).resolve().parent


def main():
    alpha, t0, delta = 1.0, 2.0, 1e-4
    astar = bisect_barrier_amplitude(alpha, delta=delta, t0=t0)
    rep = barrier_residual(alpha, astar, delta, t0)
    control = barrier_residual(alpha, astar / 10.0, delta, t0)
    print("barrier supersolution:")
    print(json.dumps(rep.to_dict(), indent=2))
    print(f"negative control at A/10: {control.status}")

    x = np.linspace(-5, 5, 101)
    t = np.linspace(0.5, 5, 46)
    fd = fd_barrier_residual(0.75, 1.0, x, t)
    fd_bad = fd_barrier_residual(0.75, 1.0, x, t, b_scale=0.5)
    print(f"\nself-similar residual: {fd.constants['max_rel_residual']:.2e} ({fd.status})")
    print(f"wrong-constant control: {fd_bad.constants['max_rel_residual']:.2e} ({fd_bad.status})")

    rng = np.random.default_rng(1)
    print("\nsharp Poincare inequality, random sine series:")
    for delta_c in (0.1, 0.3):
        worst = min(
            check_poincare(rng.uniform(-1, 1, rng.integers(1, 9)), delta_c).constants["slack"]
            for _ in range(50)
        )
        print(f"  collar {delta_c}: min slack over 50 draws = {worst:.3e}")

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.2))
    tt = np.linspace(0.05, t0, 300)
    th = np.linspace(1e-4, t0 * np.pi / 6, 300)
    T, TH = np.meshgrid(tt, th)
    res = np.full_like(T, np.nan)
    inside = TH < T * np.pi / 6
    res[inside] = _barrier_fields(alpha, astar, delta, TH[inside], T[inside])
    pc = ax1.pcolormesh(T, TH, np.log10(np.maximum(res, 1e-12)), shading="auto")
    fig.colorbar(pc, ax=ax1, label="log10 residual")
    ax1.plot(tt, tt * np.pi / 6, "k-", lw=1)
    ax1.set_xlabel("t")
    ax1.set_ylabel("theta")
    ax1.set_title(f"supersolution residual at bisected A = {astar:.3f}")

    sigma = 1.0 / (0.75 + 1.0)
    b = (1.0 - 0.75) / (2.0 * 0.75 * 1.75)
    for mu in (0.5, 1.0, 2.0):
        rho = mu**-2 + b * x**2
        ax2.plot(x, rho ** (-1.0 / 0.25), label=f"mu = {mu:g}")
    ax2.set_xlabel("x")
    ax2.set_ylabel("profile at t = 1")
    ax2.legend()
    ax2.set_title("self-similar fast-diffusion family")
    fig.tight_layout()
    fig.savefig(HERE / "certificates.png", dpi=130)
    print(f"\nwrote {HERE / 'certificates.png'}")


if __name__ == "__main__":
    main()
