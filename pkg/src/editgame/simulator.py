"""Seeded synthetic population and revision-corpus generation.

Inverts the measurement pipeline so the whole stack can be validated without
real data: sample contributor populations matching the observed distributions
(uniform contributor counts, exponential-like edit sizes), solve each
article's game, and emit a revision stream whose measured sentence ownership
reproduces the equilibrium shares and whose measured average edit sizes
reproduce the sampled traits.

Every sentence is authored wholly by one contributor and every revision
appends exactly one sentence, so each revision's edit distance equals the
author's per-edit target and the ownership tracker recovers the planted
sentence counts exactly.  All randomness flows through per-article generators
derived from (seed, article index); outputs are pure functions of the
configs.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import Mapping, Sequence

import numpy as np

from .corpus import Article, Revision, RevisionCorpus
from .model import ContributorProfile, GameInstance, equilibrium_ownership

logger = logging.getLogger(__name__)

_EPOCH = datetime(2003, 1, 1, tzinfo=timezone.utc)
_TARGET_SPAN_SECONDS = 700 * 86400
#: A sentence needs at least two visible characters plus its separator, so
#: per-edit sizes are floored at 3 when turning betas into emitted text.
_MIN_EDIT_SIZE = 3


@dataclass(frozen=True)
class PopulationConfig:
    """Sampling ranges for articles and contributor traits.

    The default contributor range (2, 247) is the integer uniform law closest
    to the reported mean 124.6 / std 71.9, truncated at 2; betas are floored
    exponentials (floor + Exp(mean - floor)) so the configured mean is exact.
    """

    article_count: int
    contributors_range: tuple[int, int] = (2, 247)
    beta_mean: float = 8.4
    beta_min: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.article_count < 1:
            raise ValueError("article_count must be at least 1")
        lo, hi = self.contributors_range
        if lo < 2 or hi < lo:
            raise ValueError("contributors_range must satisfy 2 <= low <= high")
        if not self.beta_min > 0:
            raise ValueError("beta_min must be positive")
        if not self.beta_mean > self.beta_min:
            raise ValueError("beta_mean must exceed beta_min")


@dataclass(frozen=True)
class SynthesisConfig:
    """Game parameters and emission shape for corpus synthesis."""

    effort_constant: float = 1.0
    governance: float = 0.0
    rounds: int = 3
    noise: float = 0.0
    sentences_per_article: int = 120
    seed: int = 0

    def __post_init__(self):
        if not self.effort_constant > 0:
            raise ValueError("effort_constant must be positive")
        if self.governance < 0:
            raise ValueError("governance must be non-negative")
        if self.rounds < 1:
            raise ValueError("rounds must be at least 1")
        if not 0.0 <= self.noise < 1.0:
            raise ValueError("noise must lie in [0, 1)")
        if self.sentences_per_article < 1:
            raise ValueError("sentences_per_article must be at least 1")


@dataclass(frozen=True)
class Population:
    """Per-article contributor rosters plus the shared beta trait table."""

    articles: tuple[tuple[str, tuple[str, ...]], ...]
    betas: Mapping[str, float]

    def profiles_for(self, article_id: str) -> tuple[ContributorProfile, ...]:
        for aid, members in self.articles:
            if aid == article_id:
                return tuple(ContributorProfile(cid, self.betas[cid]) for cid in members)
        raise KeyError(article_id)


def sample_population(cfg: PopulationConfig) -> Population:
    """Draw rosters and traits; deterministic in the seed, article by article."""
    lo, hi = cfg.contributors_range
    counts = []
    for k in range(cfg.article_count):
        rng = np.random.default_rng([cfg.seed, 11, k])
        counts.append(int(rng.integers(lo, hi + 1)))
    pool_size = max(max(counts), math.ceil(0.75 * sum(counts)), 2)
    rng_pool = np.random.default_rng([cfg.seed, 13])
    beta_values = cfg.beta_min + rng_pool.exponential(
        cfg.beta_mean - cfg.beta_min, pool_size
    )
    ids = [f"u{i:06d}" for i in range(pool_size)]
    betas = {cid: float(b) for cid, b in zip(ids, beta_values)}
    articles = []
    for k, n in enumerate(counts):
        rng = np.random.default_rng([cfg.seed, 17, k])
        members = tuple(ids[j] for j in rng.choice(pool_size, size=n, replace=False))
        articles.append((f"a{k:05d}", members))
    return Population(articles=tuple(articles), betas=betas)


def implied_edit_size(beta: float) -> int:
    """Per-revision edit distance actually emitted for a beta trait."""
    return max(int(round(beta)), _MIN_EDIT_SIZE)


def _apportion(weights: np.ndarray, total: int) -> np.ndarray:
    """Largest-remainder rounding of ``weights * total`` to integers summing to total."""
    quota = weights * total
    base = np.floor(quota).astype(int)
    short = total - int(base.sum())
    if short > 0:
        order = np.argsort(-(quota - base), kind="stable")
        base[order[:short]] += 1
    return base


def _target_sentence_counts(
    members: Sequence[str],
    edit_sizes: Mapping[str, int],
    cfg: SynthesisConfig,
    rng: np.random.Generator,
) -> dict[str, int]:
    """Sentence quota per contributor approximating the equilibrium shares.

    Re-solves the game on the retained roster until every retained
    contributor receives at least one sentence, so the emitted article's
    contributor set is exactly the game the analyzer will reconstruct.
    """
    retained = list(members)
    while len(retained) >= 2:
        game = GameInstance(
            tuple(ContributorProfile(cid, float(edit_sizes[cid])) for cid in retained),
            effort_constant=cfg.effort_constant,
            governance=cfg.governance,
        )
        shares = equilibrium_ownership(game)
        counts = _apportion(shares, cfg.sentences_per_article)
        keep = [cid for cid, c in zip(retained, counts) if c > 0]
        if len(keep) == len(retained):
            break
        retained = keep
    if len(retained) < 2:
        logger.warning(
            "degenerate target ownership: article reduces to a single owner %s",
            retained[0],
        )
        return {retained[0]: cfg.sentences_per_article}
    if cfg.noise > 0.0:
        jitter = rng.dirichlet(np.ones(len(retained)))
        shares = (1.0 - cfg.noise) * shares + cfg.noise * jitter
        counts = _apportion(shares, cfg.sentences_per_article)
    return {cid: int(c) for cid, c in zip(retained, counts) if c > 0}


def _make_sentence(rng: np.random.Generator, length: int) -> str:
    """Random lowercase sentence of exactly ``length`` characters ending in '.'."""
    budget = length - 1
    parts: list[int] = []
    rem = budget
    while rem > 0:
        if parts:
            rem -= 1
        take = min(rem, int(rng.integers(3, 9)))
        if rem - take == 1:
            take -= 1
        parts.append(take)
        rem -= take
    words = [
        "".join(chr(97 + c) for c in rng.integers(0, 26, size=p)) for p in parts
    ]
    return " ".join(words) + "."


def _chunk_sizes(count: int, rounds: int) -> list[int]:
    base, rem = divmod(count, rounds)
    return [base + (1 if r < rem else 0) for r in range(rounds)]


def synthesize_corpus(population: Population, cfg: SynthesisConfig) -> RevisionCorpus:
    """Emit a revision corpus whose measured ownership matches the game solution.

    Revisions interleave contributors round-robin (seeded shuffle per round),
    one appended sentence per revision.  With noise = 0 the tracked sentence
    fractions match the equilibrium ownership within one sentence quantum.
    """
    articles = []
    for index, (article_id, members) in enumerate(population.articles):
        rng = np.random.default_rng([cfg.seed, 7919, index])
        edit_sizes = {
            cid: implied_edit_size(population.betas[cid]) for cid in members
        }
        counts = _target_sentence_counts(members, edit_sizes, cfg, rng)

        sentences = {
            cid: [
                _make_sentence(rng, edit_sizes[cid] - 1) for _ in range(count)
            ]
            for cid, count in counts.items()
        }
        chunked = {cid: _chunk_sizes(len(s), cfg.rounds) for cid, s in sentences.items()}
        cursor = {cid: 0 for cid in sentences}

        edits: list[tuple[str, str]] = []
        text_parts: list[str] = []
        order_pool = [cid for cid in members if cid in sentences]
        for r in range(cfg.rounds):
            participants = [cid for cid in order_pool if chunked[cid][r] > 0]
            perm = rng.permutation(len(participants))
            for cid in (participants[i] for i in perm):
                for _ in range(chunked[cid][r]):
                    text_parts.append(sentences[cid][cursor[cid]] + " ")
                    cursor[cid] += 1
                    edits.append((cid, "".join(text_parts)))

        inception = _EPOCH + timedelta(days=index % 365)
        step = max(3600, int(round(_TARGET_SPAN_SECONDS / len(edits))))
        revisions = tuple(
            Revision(
                article_id=article_id,
                revision_id=j + 1,
                timestamp=inception + timedelta(seconds=(j + 1) * step),
                contributor_id=cid,
                text=text,
            )
            for j, (cid, text) in enumerate(edits)
        )
        articles.append(Article(article_id, revisions))
    return RevisionCorpus(tuple(articles))
