"""Independent equilibrium computations used as oracles against the closed form.

Two routes are provided:

* a spectral route that diagonalizes the all-ones rank-one matrix appearing in
  the stacked first-order conditions and recovers the contributions by
  backward substitution in the transformed coordinates, and
* a damped synchronous best-response fixed-point iteration.

Both reproduce the closed form to floating-point accuracy on feasible games.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import ConvergenceError, DegenerateOpponentsError, InfeasibleGameError
from .model import (
    Allocation,
    EquilibriumSolution,
    GameInstance,
    feasibility,
    fractional_ownership,
)


@dataclass(frozen=True)
class SolverConfig:
    """Convergence knobs for the best-response iteration."""

    tolerance: float = 1e-12
    max_iterations: int = 100_000
    damping: float = 0.5

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if not 0.0 < self.damping <= 1.0:
            raise ValueError("damping must lie in (0, 1]")


@dataclass(frozen=True)
class Eigenbasis:
    """Orthonormal eigenbasis of the all-ones matrix 11^T.

    Column 1 is the constant vector 1/sqrt(N); column j (j >= 2) has entries
    -1/sqrt(j(j-1)) above the diagonal, (j-1)/sqrt(j(j-1)) on it, and zeros
    below.  11^T maps to diag(N, 0, ..., 0) in this basis.
    """

    order: int
    matrix: np.ndarray

    def __post_init__(self):
        self.matrix.setflags(write=False)


def eigenbasis(n: int) -> Eigenbasis:
    """Exact orthonormal eigenbasis of the N-by-N all-ones matrix."""
    if n < 2:
        raise ValueError("eigenbasis requires n >= 2")
    P = np.zeros((n, n))
    P[:, 0] = 1.0 / np.sqrt(n)
    for j in range(2, n + 1):
        norm = np.sqrt(j * (j - 1))
        P[: j - 1, j - 1] = -1.0 / norm
        P[j - 1, j - 1] = (j - 1) / norm
    return Eigenbasis(order=n, matrix=P)


def spectral_equilibrium(game: GameInstance) -> EquilibriumSolution:
    """Equilibrium via the eigenbasis transform and backward substitution.

    Solves the unconstrained stationarity system, so every contributor must be
    feasible; callers holding infeasible games should exclude first (see
    ``model.exclusion_active_set``).
    """
    if not feasibility(game).all():
        raise InfeasibleGameError(
            "spectral route solves the unconstrained system; "
            "drop infeasible contributors (iterative-exclusion) first"
        )
    n = game.n
    a = game.marginal_costs  # a_i = 1/alpha_i
    G = a.sum()
    sqrt_n = np.sqrt(n)
    z1 = (n - 1) / (sqrt_n * G)

    # w_k = z_k / sqrt(k(k-1)) for k = 2..N.  The backward substitution gives
    # w_k = (N-1)^2/(k(k-1)) * G^-2 * (sum_{j<k} a_j - (k-1) a_k); the suffix
    # sums below evaluate it in O(N).
    ks = np.arange(2, n + 1, dtype=float)
    kk = ks * (ks - 1.0)
    csum = np.cumsum(a)
    inner = 1.0 - (ks * a[1:] + (G - csum[1:])) / G
    w = (n - 1) ** 2 / kk / G * inner

    # x = P z, expanded per coordinate: the mean part z1/sqrt(N), the diagonal
    # term (k-1) w_k, minus the suffix sum of w beyond k.
    tail = np.concatenate([np.cumsum(w[::-1])[::-1], [0.0]])  # tail[k-1] = sum_{j>k} w_j
    x = np.empty(n)
    base = z1 / sqrt_n
    x[0] = base - tail[0]
    x[1:] = base + (ks - 1.0) * w - tail[1:]

    ownership = fractional_ownership(Allocation(tuple(x)))
    return EquilibriumSolution(
        contributions=Allocation(tuple(x)),
        ownership=tuple(ownership),
        feasible=tuple(True for _ in range(n)),
        active_set=tuple(range(n)),
        solver="spectral",
    )


def best_response_step(game: GameInstance, alloc: Allocation, i: int) -> float:
    """Unique utility-maximizing contribution for ``i`` given the others fixed.

    Solves the first-order condition for x_i: sqrt(sigma/(L*beta_i+t)) - sigma
    with sigma the opposing total, clamped at zero.
    """
    if not 0 <= i < game.n:
        raise IndexError(f"contributor index {i} out of range for N={game.n}")
    x = alloc.as_array
    if x.size != game.n:
        raise ValueError("allocation length does not match the game")
    sigma = float(x.sum() - x[i])
    if sigma <= 0.0:
        raise DegenerateOpponentsError(
            "best response undefined against zero opposing content; "
            "seed allocations strictly positive"
        )
    a_i = float(game.marginal_costs[i])
    return max(np.sqrt(sigma / a_i) - sigma, 0.0)


def _effective_damping(n: int, damping: float) -> float:
    # The synchronous map is linearly unstable in the aggregate direction for
    # damping above ~4/(N+2); cap there so large games still converge.
    return min(damping, 4.0 / (n + 2.0))


def best_response_equilibrium(
    game: GameInstance, cfg: SolverConfig | None = None
) -> EquilibriumSolution:
    """Damped synchronous best-response iteration from a strictly positive seed."""
    cfg = cfg or SolverConfig()
    n = game.n
    a = game.marginal_costs
    damping = _effective_damping(n, cfg.damping)
    seed = np.full(n, 1.0 / (n * a.mean()))
    x, iters, resid, converged = _kernels.br_iterate(
        a, seed, damping, cfg.tolerance, cfg.max_iterations
    )
    if not converged:
        raise ConvergenceError(
            f"best-response iteration did not converge within {cfg.max_iterations} "
            f"iterations (residual {resid:.3e})",
            residual=resid,
            iterations=iters,
        )
    # Coordinates driven to zero decay geometrically at rate (1 - damping);
    # anything below the final step size over the damping factor is inactive.
    threshold = 10.0 * cfg.tolerance / damping
    x = np.where(x > threshold, x, 0.0)
    active = tuple(int(i) for i in np.nonzero(x > 0)[0])
    feas = np.zeros(n, dtype=bool)
    feas[list(active)] = True
    ownership = fractional_ownership(Allocation(tuple(x)))
    return EquilibriumSolution(
        contributions=Allocation(tuple(x)),
        ownership=tuple(ownership),
        feasible=tuple(bool(f) for f in feas),
        active_set=active,
        solver="best_response",
    )
