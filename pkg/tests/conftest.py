"""Shared instance generators for the solver and pipeline tests."""

from __future__ import annotations

import numpy as np

from editgame.model import GameInstance


def sample_feasible_betas(
    rng: np.random.Generator,
    n: int,
    t: float,
    L: float = 1.0,
    beta_mean: float = 8.4,
    margin: float = 0.95,
) -> np.ndarray:
    """Exponential-like betas conditioned into the all-feasible region.

    Draws i.i.d. exponentials, then resamples any contributor violating a
    margined feasibility bound from the exponential truncated below that
    bound, iterating until the whole vector satisfies the bound with slack.
    The margin keeps every equilibrium share strictly positive, which the
    gradient and governance-limit checks rely on.
    """
    beta = rng.exponential(beta_mean, n) + 1.0
    for _ in range(500):
        bound = margin * (L * beta.sum() + t) / ((n - 1) * L)
        bad = beta >= bound
        if not bad.any():
            return beta
        u = rng.random(int(bad.sum()))
        truncated = -beta_mean * np.log1p(-u * (1.0 - np.exp(-bound / beta_mean)))
        beta[bad] = np.maximum(truncated, 1e-2)
    raise AssertionError("feasible-instance sampling did not settle")


def random_feasible_game(
    rng: np.random.Generator,
    n_range: tuple[int, int] = (2, 50),
    t_range: tuple[float, float] = (0.0, 10.0),
    L: float = 1.0,
) -> GameInstance:
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    t = float(rng.uniform(*t_range))
    return GameInstance.from_betas(sample_feasible_betas(rng, n, t, L), L, t)


def random_unconstrained_game(
    rng: np.random.Generator,
    n_range: tuple[int, int] = (2, 50),
    t_range: tuple[float, float] = (0.0, 10.0),
    L: float = 1.0,
) -> GameInstance:
    """Raw exponential betas; large games usually contain infeasible contributors."""
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    t = float(rng.uniform(*t_range))
    return GameInstance.from_betas(rng.exponential(8.4, n) + 1.0, L, t)
