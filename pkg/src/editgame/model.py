"""Domain types and closed-form equilibrium mathematics of the contributor game.

A game is a set of contributors competing for fractional ownership of one
article.  Contributor ``i`` carries a per-unit effort trait ``beta`` (average
edit size); contributing ``x_i`` units against a governance level ``t`` costs
``(L*beta_i + t) * x_i`` plus an optional fixed cost, while the payoff is the
ownership share ``x_i / sum(x)``.

Writing ``a_i = L*beta_i + t`` and ``A = sum(a)``, the interior equilibrium is

    x_i* = (N - 1) * (A - (N - 1) * a_i) / A**2
    c_i* = 1 - (N - 1) * a_i / A

and contributor ``i`` can hold positive content iff
``(N - 1) * L * beta_i < sum(L * beta_j) + t``.  Contributors violating that
bound are handled by one of two modes:

* ``iterative-exclusion`` (default): repeatedly drop the largest-beta
  infeasible contributor and re-solve the reduced game.  The result is the
  exact equilibrium of the non-negativity-constrained game (the first-order
  condition holds at every positive coordinate).
* ``clamp``: evaluate the interior formulas over everyone, clamp negatives to
  zero, and renormalize ownership over the positive part.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import UndefinedOwnershipError

MODE_ITERATIVE_EXCLUSION = "iterative-exclusion"
MODE_CLAMP = "clamp"
MODES = (MODE_ITERATIVE_EXCLUSION, MODE_CLAMP)

#: Absolute tolerance for equilibrium identities; the closed forms are exact,
#: leaving only floating-point error.
EQUILIBRIUM_TOL = 1e-9


@dataclass(frozen=True)
class ContributorProfile:
    """A contributor's identity and average edit size (Levenshtein units per edit)."""

    contributor_id: str
    beta: float

    def __post_init__(self):
        if not self.contributor_id:
            raise ValueError("contributor_id must be a non-empty string")
        if not (float(self.beta) > 0.0 and np.isfinite(self.beta)):
            raise ValueError(f"beta must be a positive finite real, got {self.beta!r}")


@dataclass(frozen=True)
class GameInstance:
    """One article's competition: N contributor profiles, effort constant L, governance t."""

    profiles: tuple[ContributorProfile, ...]
    effort_constant: float = 1.0
    governance: float = 0.0
    fixed_costs: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "profiles", tuple(self.profiles))
        if len(self.profiles) < 2:
            raise ValueError("a game needs at least 2 contributors")
        ids = [p.contributor_id for p in self.profiles]
        if len(set(ids)) != len(ids):
            raise ValueError("contributor_id values must be unique within a game")
        if not (self.effort_constant > 0 and np.isfinite(self.effort_constant)):
            raise ValueError("effort_constant must be positive")
        if not (self.governance >= 0 and np.isfinite(self.governance)):
            raise ValueError("governance must be non-negative")
        if self.fixed_costs is not None:
            object.__setattr__(self, "fixed_costs", tuple(float(f) for f in self.fixed_costs))
            if len(self.fixed_costs) != len(self.profiles):
                raise ValueError("fixed_costs must have one entry per contributor")
            if any(f < 0 for f in self.fixed_costs):
                raise ValueError("fixed_costs must be non-negative")

    @classmethod
    def from_betas(
        cls,
        betas: Iterable[float],
        effort_constant: float = 1.0,
        governance: float = 0.0,
        fixed_costs: Sequence[float] | None = None,
    ) -> "GameInstance":
        profiles = tuple(
            ContributorProfile(f"c{i + 1}", float(b)) for i, b in enumerate(betas)
        )
        return cls(
            profiles,
            effort_constant,
            governance,
            tuple(fixed_costs) if fixed_costs is not None else None,
        )

    @property
    def n(self) -> int:
        return len(self.profiles)

    @property
    def betas(self) -> np.ndarray:
        return np.array([p.beta for p in self.profiles], dtype=float)

    @property
    def marginal_costs(self) -> np.ndarray:
        """Per-unit cost a_i = L*beta_i + t."""
        return self.effort_constant * self.betas + self.governance

    @property
    def fixed_cost_array(self) -> np.ndarray:
        if self.fixed_costs is None:
            return np.zeros(self.n)
        return np.asarray(self.fixed_costs, dtype=float)


@dataclass(frozen=True)
class Allocation:
    """Contribution vector (abstract content units), one entry per contributor."""

    contributions: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "contributions", tuple(float(x) for x in self.contributions)
        )
        arr = np.asarray(self.contributions)
        if arr.size == 0:
            raise ValueError("allocation must not be empty")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise ValueError("contributions must be finite and non-negative")

    @property
    def as_array(self) -> np.ndarray:
        return np.asarray(self.contributions, dtype=float)

    @property
    def total(self) -> float:
        return float(np.sum(self.as_array))


@dataclass(frozen=True)
class EquilibriumSolution:
    """Equilibrium contributions and ownership plus feasibility bookkeeping."""

    contributions: Allocation
    ownership: tuple[float, ...]
    feasible: tuple[bool, ...]
    active_set: tuple[int, ...]
    solver: str

    def __post_init__(self):
        object.__setattr__(self, "ownership", tuple(float(c) for c in self.ownership))
        object.__setattr__(self, "feasible", tuple(bool(f) for f in self.feasible))
        object.__setattr__(self, "active_set", tuple(int(i) for i in self.active_set))
        n = len(self.contributions.contributions)
        if not (len(self.ownership) == len(self.feasible) == n):
            raise ValueError("ownership/feasible must match the allocation length")
        if self.active_set and abs(sum(self.ownership) - 1.0) > EQUILIBRIUM_TOL:
            raise ValueError("ownership must sum to 1 over a non-empty active set")
        for i, ok in enumerate(self.feasible):
            if not ok and self.ownership[i] != 0.0:
                raise ValueError("infeasible contributors must hold zero ownership")

    @property
    def contribution_array(self) -> np.ndarray:
        return self.contributions.as_array

    @property
    def ownership_array(self) -> np.ndarray:
        return np.asarray(self.ownership, dtype=float)


def fractional_ownership(alloc: Allocation) -> np.ndarray:
    """Ownership shares x_i / sum(x); undefined for an all-zero allocation."""
    x = alloc.as_array
    total = x.sum()
    if total <= 0.0:
        raise UndefinedOwnershipError("ownership undefined: total contribution is zero")
    return x / total


def net_utility(game: GameInstance, alloc: Allocation, i: int) -> float:
    """Ownership share minus effort and fixed costs for contributor ``i``."""
    if not 0 <= i < game.n:
        raise IndexError(f"contributor index {i} out of range for N={game.n}")
    x = alloc.as_array
    if x.size != game.n:
        raise ValueError("allocation length does not match the game")
    share = fractional_ownership(alloc)[i]
    return float(share - game.marginal_costs[i] * x[i] - game.fixed_cost_array[i])


def feasibility(game: GameInstance) -> np.ndarray:
    """Whether each contributor can hold positive content at equilibrium.

    Entry i is true iff (N-1)*L*beta_i < sum_j(L*beta_j) + t.
    """
    lb = game.effort_constant * game.betas
    return (game.n - 1) * lb < lb.sum() + game.governance


def asymptotic_ownership(beta_i: float, mean_beta: float, L: float = 1.0, t: float = 0.0) -> float:
    """Large-population ownership limit ((L*mean - L*beta_i) / (L*mean + t))+."""
    if not (beta_i > 0 and mean_beta > 0 and L > 0):
        raise ValueError("beta_i, mean_beta and L must be positive")
    if t < 0:
        raise ValueError("t must be non-negative")
    return max((L * mean_beta - L * beta_i) / (L * mean_beta + t), 0.0)


def _interior_solution(a: np.ndarray) -> np.ndarray:
    """Equilibrium contributions when every contributor is feasible."""
    n = a.size
    A = a.sum()
    return (n - 1) * (A - (n - 1) * a) / (A * A)


def _interior_ownership(a: np.ndarray) -> np.ndarray:
    n = a.size
    return 1.0 - (n - 1) * a / a.sum()


def _subset_feasible(a: np.ndarray) -> np.ndarray:
    return (a.size - 1) * a < a.sum()


def exclusion_active_set(game: GameInstance) -> tuple[int, ...]:
    """Active set of the constrained equilibrium via iterative exclusion.

    Repeatedly drops the largest-beta infeasible contributor and re-solves the
    reduced game until everyone remaining is feasible.  A 2-player game is
    always feasible, so the loop never empties the set.
    """
    a = game.marginal_costs
    betas = game.betas
    active = list(range(game.n))
    while True:
        sub = a[active]
        ok = _subset_feasible(sub)
        if ok.all():
            return tuple(active)
        bad = [idx for idx, good in zip(active, ok) if not good]
        drop = max(bad, key=lambda idx: (betas[idx], idx))
        active.remove(drop)


def equilibrium_ownership(
    game: GameInstance, mode: str = MODE_ITERATIVE_EXCLUSION, renormalize: bool = True
) -> np.ndarray:
    """Equilibrium ownership shares c_i* = [1 - (N-1)(L*beta_i+t)/sum(L*beta+t)]+.

    In clamp mode ``renormalize=False`` returns the bare positive-part values
    (which exceed 1 in total when anyone is clamped); the default rescales
    them to a distribution.  Exclusion mode sums to 1 by construction.
    """
    if mode not in MODES:
        raise ValueError(f"unknown feasibility mode {mode!r}")
    a = game.marginal_costs
    if mode == MODE_CLAMP:
        raw = np.maximum(_interior_ownership(a), 0.0)
        if not renormalize:
            return raw
        return raw / raw.sum()
    active = exclusion_active_set(game)
    c = np.zeros(game.n)
    c[list(active)] = _interior_ownership(a[list(active)])
    return c


def closed_form_equilibrium(
    game: GameInstance, mode: str = MODE_ITERATIVE_EXCLUSION
) -> EquilibriumSolution:
    """Closed-form Nash equilibrium of the contribution game."""
    if mode not in MODES:
        raise ValueError(f"unknown feasibility mode {mode!r}")
    a = game.marginal_costs
    x = np.zeros(game.n)
    if mode == MODE_CLAMP:
        x = np.maximum(_interior_solution(a), 0.0)
        feas = feasibility(game)
        active = tuple(int(i) for i in np.nonzero(x > 0)[0])
    else:
        active = exclusion_active_set(game)
        idx = list(active)
        x[idx] = _interior_solution(a[idx])
        feas = np.zeros(game.n, dtype=bool)
        feas[idx] = True
    ownership = equilibrium_ownership(game, mode=mode)
    return EquilibriumSolution(
        contributions=Allocation(tuple(x)),
        ownership=tuple(ownership),
        feasible=tuple(bool(f) for f in feas),
        active_set=active,
        solver="closed_form",
    )


def stationarity_residuals(game: GameInstance, x: np.ndarray) -> np.ndarray:
    """First-order-condition residuals sigma_{-i}/S^2 - (L*beta_i + t) at ``x``."""
    x = np.asarray(x, dtype=float)
    total = x.sum()
    if total <= 0:
        raise UndefinedOwnershipError("residuals undefined at the zero allocation")
    return (total - x) / (total * total) - game.marginal_costs
