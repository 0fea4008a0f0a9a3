"""Validation pipeline: temporal brackets, prediction comparison, fits, correlations.

Per article, the game is built from the corpus-wide effort traits of that
article's contributors and solved for predicted ownership, which is paired
with the ownership measured from the revision history.  Articles are also cut
into yearly brackets (365.25-day years from inception) so the comparison can
be repeated at each stage of an article's life.  Plain least squares and
Pearson machinery quantify the agreement; quality scores supplied externally
can be correlated against ownership entropy.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import timedelta
from typing import Mapping, Sequence

import numpy as np
from scipy import stats

from .corpus import Article, EffortProfile, OwnershipLedger, RevisionCorpus, track_ownership
from .errors import SingularFitError, ZeroVarianceError
from .governance import entropy
from .model import (
    MODE_ITERATIVE_EXCLUSION,
    ContributorProfile,
    GameInstance,
    equilibrium_ownership,
)

YEAR = timedelta(days=365.25)


@dataclass(frozen=True)
class BracketSnapshot:
    """Observed vs predicted ownership at the end of year ``year_index``."""

    article_id: str
    year_index: int
    observed: Mapping[str, float]
    predicted: Mapping[str, float]
    n_active: int

    def __post_init__(self):
        if self.year_index < 1:
            raise ValueError("year_index starts at 1")
        for name, mapping in (("observed", self.observed), ("predicted", self.predicted)):
            if mapping and abs(sum(mapping.values()) - 1.0) > 1e-9:
                raise ValueError(f"{name} ownership must sum to 1 over its support")


@dataclass(frozen=True)
class ArticleComparison:
    """Predicted and observed shares, contributors in decreasing-beta order."""

    article_id: str
    contributor_ids: tuple[str, ...]
    betas: tuple[float, ...]
    predicted: tuple[float, ...]
    observed: tuple[float, ...]


@dataclass(frozen=True)
class ComparisonReport:
    articles: tuple[ArticleComparison, ...]
    skipped: tuple[str, ...]

    def pooled(self) -> tuple[np.ndarray, np.ndarray]:
        """All (predicted, observed) pairs concatenated across articles."""
        if not self.articles:
            return np.empty(0), np.empty(0)
        pred = np.concatenate([np.asarray(a.predicted) for a in self.articles])
        obs = np.concatenate([np.asarray(a.observed) for a in self.articles])
        return pred, obs


@dataclass(frozen=True)
class FitResult:
    rho: float
    delta: float
    mean_abs_error: float
    p_value: float

    def __post_init__(self):
        if self.mean_abs_error < 0:
            raise ValueError("mean_abs_error must be non-negative")


@dataclass(frozen=True)
class ValidationSummary:
    """Distributions over repeated train/test splits."""

    train_errors: tuple[float, ...]
    test_errors: tuple[float, ...]
    p_values: tuple[float, ...]

    def describe(self) -> dict:
        def _stats(values: tuple[float, ...]) -> dict:
            arr = np.asarray(values)
            return {
                "mean": float(arr.mean()),
                "std": float(arr.std()),
                "min": float(arr.min()),
                "max": float(arr.max()),
            }

        return {
            "repeats": len(self.train_errors),
            "train_error": _stats(self.train_errors),
            "test_error": _stats(self.test_errors),
            "p_value": _stats(self.p_values),
        }


def _game_for(
    contributor_ids: Sequence[str],
    profiles: Mapping[str, EffortProfile],
    L: float,
    t: float,
) -> GameInstance:
    missing = [cid for cid in contributor_ids if cid not in profiles]
    if missing:
        raise ValueError(f"profiles missing for contributors: {missing[:5]}")
    return GameInstance(
        tuple(ContributorProfile(cid, profiles[cid].beta) for cid in contributor_ids),
        effort_constant=L,
        governance=t,
    )


def _by_decreasing_beta(
    contributor_ids: Sequence[str], profiles: Mapping[str, EffortProfile]
) -> list[str]:
    return sorted(contributor_ids, key=lambda cid: (-profiles[cid].beta, cid))


def bracket(
    article: Article,
    ledger: OwnershipLedger,
    profiles: Mapping[str, EffortProfile],
    L: float = 1.0,
    t: float = 0.0,
    mode: str = MODE_ITERATIVE_EXCLUSION,
) -> list[BracketSnapshot]:
    """Yearly ownership snapshots from inception to the end of the history.

    Bracket k reflects the last revision strictly before inception + k years;
    the final (in-progress) year carries the end-of-study state.  Brackets
    whose cumulative author set is smaller than 2, or in which no sentence has
    an owner yet, are omitted.
    """
    revisions = article.revisions
    inception = revisions[0].timestamp
    lifespan = revisions[-1].timestamp - inception
    n_brackets = int(lifespan / YEAR) + 1
    out: list[BracketSnapshot] = []
    for k in range(1, n_brackets + 1):
        cutoff = inception + k * YEAR
        idx = 0
        for j, rev in enumerate(revisions):
            if rev.timestamp < cutoff:
                idx = j
            else:
                break
        snap = ledger.snapshots[idx]
        owned_total = sum(snap.owned.values())
        active = sorted({r.contributor_id for r in revisions[: idx + 1]})
        if owned_total == 0 or len(active) < 2:
            continue
        order = _by_decreasing_beta(active, profiles)
        game = _game_for(order, profiles, L, t)
        shares = equilibrium_ownership(game, mode=mode)
        out.append(
            BracketSnapshot(
                article_id=article.article_id,
                year_index=k,
                observed={cid: snap.owned.get(cid, 0) / owned_total for cid in order},
                predicted={cid: float(c) for cid, c in zip(order, shares)},
                n_active=len(active),
            )
        )
    return out


def predict_vs_observe(
    corpus: RevisionCorpus,
    profiles: Mapping[str, EffortProfile],
    L: float = 1.0,
    t: float = 0.0,
    mode: str = MODE_ITERATIVE_EXCLUSION,
    ledgers: Mapping[str, OwnershipLedger] | None = None,
) -> ComparisonReport:
    """Model predictions against measured final ownership, article by article.

    Single-contributor articles are skipped (reported in ``skipped``); pass
    precomputed ledgers to avoid re-tracking ownership.
    """
    comparisons = []
    skipped = []
    for article in corpus:
        cids = article.contributor_ids
        if len(cids) < 2:
            skipped.append(article.article_id)
            continue
        ledger = ledgers[article.article_id] if ledgers else track_ownership(article)
        order = _by_decreasing_beta(cids, profiles)
        game = _game_for(order, profiles, L, t)
        shares = equilibrium_ownership(game, mode=mode)
        comparisons.append(
            ArticleComparison(
                article_id=article.article_id,
                contributor_ids=tuple(order),
                betas=tuple(profiles[cid].beta for cid in order),
                predicted=tuple(float(c) for c in shares),
                observed=tuple(ledger.final_fractions.get(cid, 0.0) for cid in order),
            )
        )
    return ComparisonReport(articles=tuple(comparisons), skipped=tuple(skipped))


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.size != y.size:
        raise ValueError("inputs must have equal length")
    if x.size < 2:
        raise ValueError("correlation needs at least 2 points")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx <= 0.0 or syy <= 0.0:
        raise ZeroVarianceError("correlation undefined for a constant input")
    r = float(dx @ dy) / np.sqrt(sxx * syy)
    return float(np.clip(r, -1.0, 1.0))


def linear_fit(a: Sequence[float], d: Sequence[float]) -> FitResult:
    """Least-squares line d = rho*a + delta with a slope t-test p-value."""
    x = np.asarray(a, dtype=float)
    y = np.asarray(d, dtype=float)
    if x.size != y.size:
        raise ValueError("inputs must have equal length")
    if x.size < 3:
        raise ValueError("fit needs at least 3 points")
    dx = x - x.mean()
    sxx = float(dx @ dx)
    if sxx <= 0.0:
        raise SingularFitError("regressor is constant; slope undefined")
    rho = float(dx @ (y - y.mean())) / sxx
    delta = float(y.mean() - rho * x.mean())
    resid = y - (rho * x + delta)
    mae = float(np.abs(resid).mean())
    dof = x.size - 2
    rss = float(resid @ resid)
    if rss <= 0.0:
        p_value = 0.0
    else:
        se = np.sqrt(rss / dof / sxx)
        p_value = float(2.0 * stats.t.sf(abs(rho / se), dof))
    return FitResult(rho=rho, delta=delta, mean_abs_error=mae, p_value=p_value)


def train_test_validation(
    articles: Sequence[ArticleComparison],
    train_count: int,
    repeats: int = 1000,
    seed: int = 0,
) -> ValidationSummary:
    """Repeated random train/test splits of the per-article comparison pairs.

    Each repeat fits on the pooled training pairs, evaluates the fitted line's
    mean absolute error on the held-out pool, and measures the held-out
    pool's own slope significance.
    """
    if len(articles) < 2:
        raise ValueError("need at least 2 articles to split")
    if not 1 <= train_count < len(articles):
        raise ValueError("train_count must leave at least one held-out article")
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    preds = [np.asarray(a.predicted) for a in articles]
    obs = [np.asarray(a.observed) for a in articles]
    rng = np.random.default_rng(seed)
    train_errors = []
    test_errors = []
    p_values = []
    for _ in range(repeats):
        perm = rng.permutation(len(articles))
        train_idx, test_idx = perm[:train_count], perm[train_count:]
        a_train = np.concatenate([preds[i] for i in train_idx])
        d_train = np.concatenate([obs[i] for i in train_idx])
        a_test = np.concatenate([preds[i] for i in test_idx])
        d_test = np.concatenate([obs[i] for i in test_idx])
        fit = linear_fit(a_train, d_train)
        train_errors.append(fit.mean_abs_error)
        test_errors.append(float(np.abs(d_test - (fit.rho * a_test + fit.delta)).mean()))
        p_values.append(linear_fit(a_test, d_test).p_value)
    return ValidationSummary(
        train_errors=tuple(train_errors),
        test_errors=tuple(test_errors),
        p_values=tuple(p_values),
    )


def quality_correlation(
    entropies: Mapping[str, float], scores: Mapping[str, float]
) -> float:
    """Pearson correlation between ownership entropy and quality over shared articles."""
    common = sorted(set(entropies) & set(scores))
    if len(common) < 2:
        raise ValueError("need at least 2 articles present in both maps")
    return pearson([entropies[k] for k in common], [scores[k] for k in common])


def observed_entropy(article: Article, ledger: OwnershipLedger) -> float:
    """Normalized entropy of the measured final ownership of an article."""
    if not ledger.final_fractions:
        return 0.0
    cids = article.contributor_ids
    shares = [ledger.final_fractions.get(cid, 0.0) for cid in cids]
    return entropy(shares, normalized=True)


def rank_averaged_curve(articles: Sequence[ArticleComparison]) -> list[dict]:
    """Mean predicted/observed share per beta rank across articles.

    Rank 1 is each article's largest-beta contributor; articles contribute
    only to ranks they have.  One aggregation of many per-article curves —
    per-article data remains the primary output.
    """
    if not articles:
        return []
    max_n = max(len(a.contributor_ids) for a in articles)
    out = []
    for r in range(max_n):
        preds = [a.predicted[r] for a in articles if len(a.predicted) > r]
        obss = [a.observed[r] for a in articles if len(a.observed) > r]
        out.append(
            {
                "rank": r + 1,
                "mean_predicted": float(np.mean(preds)),
                "mean_observed": float(np.mean(obss)),
                "articles": len(preds),
            }
        )
    return out
