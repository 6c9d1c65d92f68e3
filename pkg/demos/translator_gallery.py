#!/usr/bin/env python3
"""Gallery of slab translators across the exponent range.

Computes the translation speed m(alpha), samples the profiles, and shows how
the shape changes through the regimes:

  * alpha in (1/2, 1]  -- confined to the slab (-1, 1), ends climb forever
  * alpha > 1          -- finite height, continued by vertical rays
  * alpha <= 1/2       -- no slab translator at all (entire graphs)

Writes translator_gallery.png and translator_speeds.csv next to this script.
"""

from pathlib import Path

import numpy as np

from csflab import (
    EntireGraphRegimeError,
    classify_regime,
    make_grid,
    translator_height_limit,
    translator_profile,
    translator_speed,
)

HERE = Path(__file__).resolve().parent


def main():
    grid = make_grid(1025)

    print(f"{'alpha':>8} {'regime':>22} {'speed m':>12} {'end height':>12}")
    rows = []
    for alpha in (0.4, 0.5, 0.55, 0.75, 1.0, 1.5, 2.0, 4.0):
        regime = classify_regime(alpha)
        try:
            m = translator_speed(alpha)
            height = translator_height_limit(alpha)
            h_str = f"{height:.4f}" if np.isfinite(height) else "inf"
            print(f"{alpha:>8} {regime.value:>22} {m:>12.6f} {h_str:>12}")
            rows.append((alpha, m, height if np.isfinite(height) else np.inf))
        except EntireGraphRegimeError:
            print(f"{alpha:>8} {regime.value:>22} {'--':>12} {'--':>12}")

    with open(HERE / "translator_speeds.csv", "w") as fh:
        fh.write("alpha,speed,end_height\n")
        for alpha, m, height in rows:
            fh.write(f"{alpha!r},{m!r},{height!r}\n")

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4.5))
    for alpha in (0.55, 0.75, 1.0, 1.5, 2.0, 4.0):
        sol = translator_profile(alpha, grid)
        ax1.plot(sol.profile.x1, sol.profile.x2, label=f"alpha = {alpha:g}")
        if np.isfinite(translator_height_limit(alpha)):
            lim = translator_height_limit(alpha)
            ax1.plot([-1, -1], [lim, lim + 1.0], "k:", lw=0.8)
            ax1.plot([1, 1], [lim, lim + 1.0], "k:", lw=0.8)
    ax1.set_ylim(0, 4)
    ax1.set_xlabel("x1")
    ax1.set_ylabel("x2")
    ax1.set_title("slab translators, width 2 (dotted: ray continuations)")
    ax1.legend(fontsize=8)

    alphas = np.linspace(0.505, 4.0, 200)
    ax2.semilogy(alphas, [translator_speed(a) for a in alphas])
    ax2.axvline(0.5, color="k", ls="--", lw=0.8)
    ax2.set_xlabel("alpha")
    ax2.set_ylabel("speed m(alpha)")
    ax2.set_title("translation speed blows up at the critical exponent")
    fig.tight_layout()
    fig.savefig(HERE / "translator_gallery.png", dpi=130)
    print(f"\nwrote {HERE / 'translator_gallery.png'}")


if __name__ == "__main__":
    main()
