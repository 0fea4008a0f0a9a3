"""CSV/JSON report emission for analysis runs.

A run directory holds ``summary.json``, ``per_contributor.csv``,
``brackets.csv`` and ``metadata.json``.  Files are written to a temporary
name and renamed into place, so partial outputs never appear under the final
name.  All content is deterministic for fixed inputs (sorted keys, no clock
reads).
"""

from __future__ import annotations

import csv
import io
import json
import os
from pathlib import Path
from typing import Mapping, Sequence

from . import __version__
from ._kernels import BACKEND
from .analysis import (
    BracketSnapshot,
    ComparisonReport,
    bracket,
    linear_fit,
    observed_entropy,
    pearson,
    predict_vs_observe,
    quality_correlation,
    rank_averaged_curve,
    train_test_validation,
)
from .corpus import RevisionCorpus, contributor_profiles, track_ownership
from .errors import SingularFitError, ZeroVarianceError
from .model import MODE_ITERATIVE_EXCLUSION


def atomic_write_text(path: Path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def write_json(path: Path, obj) -> None:
    atomic_write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def write_csv(path: Path, header: Sequence[str], rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    atomic_write_text(path, buf.getvalue())


def load_quality_scores(path: str | Path) -> dict[str, float]:
    """Read an ``article_id,score`` CSV (header optional)."""
    scores: dict[str, float] = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row:
                continue
            if i == 0 and row[0].strip().lower() == "article_id":
                continue
            if len(row) < 2:
                raise ValueError(f"quality scores row {i + 1}: expected article_id,score")
            scores[row[0].strip()] = float(row[1])
    return scores


def _safe_pearson(xs, ys):
    try:
        return pearson(xs, ys)
    except (ValueError, ZeroVarianceError):
        return None


def analyze_corpus(
    corpus: RevisionCorpus,
    out_dir: str | Path,
    L: float = 1.0,
    t: float = 0.0,
    mode: str = MODE_ITERATIVE_EXCLUSION,
    quality_scores: Mapping[str, float] | None = None,
    train_count: int | None = None,
    repeats: int = 1000,
    seed: int = 0,
    metadata: Mapping[str, object] | None = None,
) -> dict:
    """Run the full measurement pipeline and write the report directory.

    Note the governance level used for predictions defaults to t = 0 (the
    data itself never pins it down); it is recorded prominently in the
    summary and metadata.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    profiles = contributor_profiles(corpus)
    ledgers = {a.article_id: track_ownership(a) for a in corpus}
    report = predict_vs_observe(corpus, profiles, L=L, t=t, mode=mode, ledgers=ledgers)

    brackets: list[BracketSnapshot] = []
    compared_ids = {a.article_id for a in report.articles}
    for article in corpus:
        if article.article_id in compared_ids:
            brackets.extend(
                bracket(article, ledgers[article.article_id], profiles, L=L, t=t, mode=mode)
            )

    pred, obs = report.pooled()
    summary: dict = {
        "parameters": {"L": L, "t": t, "mode": mode, "seed": seed},
        "articles_total": len(corpus),
        "articles_compared": len(report.articles),
        "skipped_single_contributor": list(report.skipped),
        "pairs": int(pred.size),
        "pearson_pooled": _safe_pearson(pred, obs) if pred.size >= 2 else None,
        "pearson_article_mean": None,
        "fit": None,
        "per_year": {},
        "rank_average": rank_averaged_curve(report.articles),
        "article_entropy": {},
    }

    per_article_r = [
        r
        for r in (
            _safe_pearson(a.predicted, a.observed)
            for a in report.articles
            if len(a.predicted) >= 2
        )
        if r is not None
    ]
    if per_article_r:
        summary["pearson_article_mean"] = float(sum(per_article_r) / len(per_article_r))

    if pred.size >= 3:
        try:
            fit = linear_fit(pred, obs)
            summary["fit"] = {
                "rho": fit.rho,
                "delta": fit.delta,
                "mean_abs_error": fit.mean_abs_error,
                "p_value": fit.p_value,
            }
        except SingularFitError:
            summary["fit"] = None

    by_year: dict[int, list[BracketSnapshot]] = {}
    for snap in brackets:
        by_year.setdefault(snap.year_index, []).append(snap)
    for year in sorted(by_year):
        snaps = by_year[year]
        ys_pred = [v for s in snaps for v in s.predicted.values()]
        ys_obs = [s.observed[c] for s in snaps for c in s.predicted]
        summary["per_year"][str(year)] = {
            "articles": len(snaps),
            "pairs": len(ys_pred),
            "pearson": _safe_pearson(ys_pred, ys_obs) if len(ys_pred) >= 2 else None,
        }

    entropies = {
        a.article_id: observed_entropy(corpus.get(a.article_id), ledgers[a.article_id])
        for a in report.articles
    }
    summary["article_entropy"] = {k: entropies[k] for k in sorted(entropies)}

    if quality_scores is not None:
        common = sorted(set(entropies) & set(quality_scores))
        summary["quality"] = {
            "articles": len(common),
            "pearson": quality_correlation(entropies, quality_scores)
            if len(common) >= 2
            else None,
        }

    if train_count is not None:
        validation = train_test_validation(
            report.articles, train_count=train_count, repeats=repeats, seed=seed
        )
        summary["train_test"] = validation.describe()

    write_csv(
        out / "per_contributor.csv",
        ["article_id", "contributor_id", "beta", "predicted", "observed"],
        (
            [a.article_id, cid, b, p, o]
            for a in report.articles
            for cid, b, p, o in zip(a.contributor_ids, a.betas, a.predicted, a.observed)
        ),
    )
    write_csv(
        out / "brackets.csv",
        ["article_id", "year_index", "contributor_id", "beta", "predicted", "observed"],
        (
            [s.article_id, s.year_index, cid, profiles[cid].beta, s.predicted[cid], s.observed[cid]]
            for s in brackets
            for cid in s.predicted
        ),
    )
    write_json(out / "summary.json", summary)
    write_json(
        out / "metadata.json",
        {
            "tool": "editgame",
            "version": __version__,
            "kernel_backend": BACKEND,
            "parameters": summary["parameters"],
            "counts": {
                "articles": len(corpus),
                "revisions": sum(len(a.revisions) for a in corpus),
                "contributors": len(profiles),
            },
            **(dict(metadata) if metadata else {}),
        },
    )
    return summary
