import numpy as np
import pytest

from csflab import (
    ExactTranslator,
    FlowParams,
    MultiplicativePerturbation,
    build_initial,
    evolve,
    make_grid,
)


def run_flow(alpha, n, t_end, recipe=None, sample_step=0.02, cfl=0.25):
    """Small-run helper shared by the unit tests."""
    recipe = recipe if recipe is not None else ExactTranslator()
    grid = make_grid(n)
    state = build_initial(recipe, grid, alpha)
    params = FlowParams(alpha=alpha, t_end=t_end, grid_size=n, cfl_safety=cfl)
    samples = np.round(
        np.arange(1, int(round(t_end / sample_step)) + 1) * sample_step, 12
    )
    return evolve(state, params, sample_times=samples)


@pytest.fixture(scope="session")
def perturbed_run_a1():
    """alpha=1, N=128 run from a 20% third-mode perturbation to t=3."""
    recipe = MultiplicativePerturbation.from_dicts(sin={3: 0.2})
    final, trace = run_flow(1.0, 128, 3.0, recipe=recipe)
    return trace


@pytest.fixture(scope="session")
def perturbed_run_a075():
    """alpha=0.75 (fast-diffusion range), N=128, to t=2."""
    recipe = MultiplicativePerturbation.from_dicts(sin={3: 0.15})
    final, trace = run_flow(0.75, 128, 2.0, recipe=recipe)
    return trace
