"""Leader side of the governance game: ownership entropy and enforcement search.

The community picks a neutrality-enforcement level ``t`` anticipating the
contributors' equilibrium response.  Its objective is the Shannon entropy of
the resulting ownership distribution, maximized over ``t`` in [0, z_star]
where ``z_star`` caps how much compliance effort can be imposed.  Entropy is
non-decreasing in ``t`` on typical asymmetric games (ownership flattens as
enforcement grows), so the constrained argmax usually sits on the boundary;
the search verifies the direction numerically instead of assuming it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InfeasibleGameError
from .model import (
    MODE_ITERATIVE_EXCLUSION,
    ContributorProfile,
    GameInstance,
    equilibrium_ownership,
    feasibility,
)

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_TIE_EPS = 1e-12


@dataclass(frozen=True)
class GovernanceSearch:
    """Search bounds for the enforcement level: cap z_star, tolerance, normalization."""

    z_star: float
    search_tolerance: float | None = None
    normalization: bool = True

    def __post_init__(self):
        if not self.z_star > 0:
            raise ValueError("z_star must be positive")
        if self.search_tolerance is not None and not self.search_tolerance > 0:
            raise ValueError("search_tolerance must be positive")

    @property
    def resolved_tolerance(self) -> float:
        if self.search_tolerance is not None:
            return self.search_tolerance
        return 1e-6 * self.z_star


@dataclass(frozen=True)
class EntropyProfile:
    """Entropy evaluated on a t-grid plus the constrained argmax."""

    grid: tuple[tuple[float, float], ...]
    argmax_t: float
    constrained: bool

    def __post_init__(self):
        ts = [t for t, _ in self.grid]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("grid t-values must be strictly increasing")


def entropy(ownership: Sequence[float], normalized: bool = False) -> float:
    """Shannon entropy -sum(c ln c) of an ownership distribution.

    Zero entries contribute nothing (0 ln 0 = 0).  With ``normalized`` the
    value is divided by ln(N) for N list entries, mapping onto [0, 1].
    """
    c = np.asarray(ownership, dtype=float)
    if c.size == 0:
        raise ValueError("ownership distribution is empty")
    if np.any(c < -1e-12):
        raise ValueError("ownership entries must be non-negative")
    c = np.clip(c, 0.0, None)
    if abs(c.sum() - 1.0) > 1e-9:
        raise ValueError(f"ownership entries must sum to 1, got {c.sum()!r}")
    pos = c[c > 0]
    h = float(-(pos * np.log(pos)).sum())
    if not normalized:
        return h
    if c.size == 1:
        return 0.0
    return h / math.log(c.size)


def entropy_at(
    profiles: Sequence[ContributorProfile],
    L: float,
    t: float,
    normalized: bool = False,
    mode: str = MODE_ITERATIVE_EXCLUSION,
) -> float:
    """Entropy of the equilibrium ownership at governance level ``t``."""
    game = GameInstance(tuple(profiles), effort_constant=L, governance=t)
    return entropy(equilibrium_ownership(game, mode=mode), normalized=normalized)


def ownership_gradient(
    profiles: Sequence[ContributorProfile], L: float, t: float
) -> np.ndarray:
    """Analytic d(c_i*)/dt, valid when every contributor is feasible.

    Entry i is N(N-1)L(beta_i - mean(beta)) / (N t + sum(L beta))^2; the
    entries cancel exactly, so the gradient sums to zero.
    """
    game = GameInstance(tuple(profiles), effort_constant=L, governance=t)
    if not feasibility(game).all():
        raise InfeasibleGameError("ownership gradient requires an all-feasible game")
    betas = game.betas
    n = game.n
    denom = (n * t + L * betas.sum()) ** 2
    return n * (n - 1) * L * (betas - betas.mean()) / denom


def entropy_gradient(profiles: Sequence[ContributorProfile], L: float, t: float) -> float:
    """Analytic dH/dt = -sum_i dc_i/dt (1 + ln c_i*)."""
    game = GameInstance(tuple(profiles), effort_constant=L, governance=t)
    grad = ownership_gradient(profiles, L, t)
    c = equilibrium_ownership(game)
    if np.any(c <= 0):
        raise ValueError("entropy gradient undefined when any ownership share is zero")
    return float(-(grad * (1.0 + np.log(c))).sum())


def _golden_section_argmax(f, lo: float, hi: float, tol: float) -> float:
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def optimal_governance(
    profiles: Sequence[ContributorProfile],
    L: float,
    search: GovernanceSearch,
    grid_points: int = 65,
    mode: str = MODE_ITERATIVE_EXCLUSION,
) -> EntropyProfile:
    """Maximize equilibrium-ownership entropy over t in [0, z_star].

    Runs a golden-section search refined to the search tolerance on top of a
    uniform evaluation grid.  Where the entropy is flat the smallest optimal t
    wins (least governance burden), so symmetric games report t = 0.  The
    ``constrained`` flag records an argmax on the z_star boundary.
    """
    if grid_points < 2:
        raise ValueError("grid_points must be at least 2")
    z = search.z_star
    tol = search.resolved_tolerance

    def h(t: float) -> float:
        return entropy_at(profiles, L, float(t), normalized=search.normalization, mode=mode)

    ts = np.linspace(0.0, z, grid_points)
    grid = tuple((float(t), h(t)) for t in ts)
    refined = _golden_section_argmax(h, 0.0, z, tol)
    candidates = list(grid) + [(float(refined), h(refined))]
    best = max(v for _, v in candidates)
    eps = _TIE_EPS * max(1.0, abs(best))
    argmax_t = min(t for t, v in candidates if v >= best - eps)
    constrained = argmax_t >= z - max(tol, _TIE_EPS * z)
    return EntropyProfile(grid=grid, argmax_t=float(argmax_t), constrained=bool(constrained))
