"""Revision-history ingestion and measurement: sentence ownership and effort traits.

Corpus format: UTF-8 line-delimited JSON, one revision per line with fields
``article_id`` (string), ``revision_id`` (integer), ``timestamp`` (ISO-8601
UTC, seconds precision), ``contributor_id`` (string) and ``text`` (full
post-edit article text).  Unknown fields are ignored.

Ownership is tracked at word granularity: every word of the current text
carries the contributor who introduced it, words surviving between
consecutive revisions (decided by a longest-common-subsequence diff over the
word sequences) keep their originator, and new words belong to the editor.
A sentence is owned by whoever holds a strict majority (> 50%) of its words,
otherwise it is ownerless.  Exactly 50% is not a majority.
"""

from __future__ import annotations

import io
import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable, Iterator, Mapping

import numpy as np

from . import _kernels
from .errors import CorpusFormatError, CorpusOrderingError

_SENTENCE_BOUNDARY = re.compile(r"(?<=[.!?])(?=\s)")
_TERMINATORS = (".", "!", "?")

_REQUIRED_FIELDS = ("article_id", "revision_id", "timestamp", "contributor_id", "text")


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 timestamp, normalizing to UTC; naive values count as UTC."""
    raw = value.strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    dt = datetime.fromisoformat(raw)
    if dt.tzinfo is None:
        return dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_timestamp(dt: datetime) -> str:
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class Revision:
    """One edit: full article text after the change, with author and time."""

    article_id: str
    revision_id: int
    timestamp: datetime
    contributor_id: str
    text: str


@dataclass(frozen=True)
class Article:
    article_id: str
    revisions: tuple[Revision, ...]

    def __post_init__(self):
        if not self.revisions:
            raise ValueError("an article needs at least one revision")
        if any(r.article_id != self.article_id for r in self.revisions):
            raise ValueError("all revisions must share the article_id")

    @property
    def inception(self) -> datetime:
        return self.revisions[0].timestamp

    @property
    def contributor_ids(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for r in self.revisions:
            seen.setdefault(r.contributor_id, None)
        return tuple(seen)


@dataclass(frozen=True)
class RevisionCorpus:
    articles: tuple[Article, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "articles", tuple(sorted(self.articles, key=lambda a: a.article_id))
        )

    def __len__(self) -> int:
        return len(self.articles)

    def __iter__(self) -> Iterator[Article]:
        return iter(self.articles)

    def get(self, article_id: str) -> Article:
        for a in self.articles:
            if a.article_id == article_id:
                return a
        raise KeyError(article_id)

    def excluding(self, contributor_ids: Iterable[str]) -> "RevisionCorpus":
        """Corpus with all revisions by the given contributors removed.

        Used for bot exclusion; articles left with no revisions are dropped.
        """
        drop = set(contributor_ids)
        kept = []
        for art in self.articles:
            revs = tuple(r for r in art.revisions if r.contributor_id not in drop)
            if revs:
                kept.append(Article(art.article_id, revs))
        return RevisionCorpus(tuple(kept))


@dataclass(frozen=True)
class RevisionSnapshot:
    """Per-revision ownership state: sentence counts per owner plus ownerless."""

    revision_id: int
    owned: Mapping[str, int]
    ownerless: int

    @property
    def total_sentences(self) -> int:
        return sum(self.owned.values()) + self.ownerless


@dataclass(frozen=True)
class OwnershipLedger:
    article_id: str
    snapshots: tuple[RevisionSnapshot, ...]
    final_fractions: Mapping[str, float]


@dataclass(frozen=True)
class EffortProfile:
    """Corpus-wide effort trait: summed edit distance over number of edits."""

    contributor_id: str
    total_edit_size: int
    edit_count: int

    def __post_init__(self):
        if self.edit_count < 1:
            raise ValueError("edit_count must be at least 1")
        if self.total_edit_size < 0:
            raise ValueError("total_edit_size must be non-negative")

    @property
    def beta(self) -> float:
        return self.total_edit_size / self.edit_count


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance over unicode scalar values."""
    if a == b:
        return 0
    return _kernels.levenshtein_codes(_kernels.codepoints(a), _kernels.codepoints(b))


def segment_sentences(text: str) -> list[str]:
    """Split on '.', '!' or '?' followed by whitespace (or end of text).

    Segments are whitespace-trimmed and empty ones dropped; trailing
    unterminated text counts as one sentence.
    """
    if not text:
        return []
    parts = _SENTENCE_BOUNDARY.split(text)
    return [p for p in (part.strip() for part in parts) if p]


def _sentence_word_spans(words: list[str]) -> list[tuple[int, int]]:
    """Half-open word-index spans of the sentences in a tokenized text.

    Word boundaries coincide with sentence boundaries because a terminator
    only ends a sentence when followed by whitespace, which also ends the
    word.
    """
    spans = []
    start = 0
    for i, w in enumerate(words):
        if w.endswith(_TERMINATORS):
            spans.append((start, i + 1))
            start = i + 1
    if start < len(words):
        spans.append((start, len(words)))
    return spans


def _word_ids(old: list[str], new: list[str]) -> tuple[np.ndarray, np.ndarray]:
    vocab: dict[str, int] = {}
    for w in old:
        vocab.setdefault(w, len(vocab))
    for w in new:
        vocab.setdefault(w, len(vocab))
    a = np.fromiter((vocab[w] for w in old), dtype=np.int64, count=len(old))
    b = np.fromiter((vocab[w] for w in new), dtype=np.int64, count=len(new))
    return a, b


def track_ownership(article: Article) -> OwnershipLedger:
    """Word-provenance sentence ownership for every revision of an article."""
    words: list[str] = []
    owners: list[str] = []
    snapshots: list[RevisionSnapshot] = []
    for rev in article.revisions:
        new_words = rev.text.split()
        new_owners = [rev.contributor_id] * len(new_words)
        if words and new_words:
            ia, ib = _kernels.lcs_match(*_word_ids(words, new_words))
            for src, dst in zip(ia.tolist(), ib.tolist()):
                new_owners[dst] = owners[src]
        words, owners = new_words, new_owners

        counts: dict[str, int] = {}
        ownerless = 0
        for start, end in _sentence_word_spans(words):
            tally: dict[str, int] = {}
            for owner in owners[start:end]:
                tally[owner] = tally.get(owner, 0) + 1
            owner, top = max(tally.items(), key=lambda kv: kv[1])
            if 2 * top > end - start:
                counts[owner] = counts.get(owner, 0) + 1
            else:
                ownerless += 1
        snapshots.append(
            RevisionSnapshot(
                revision_id=rev.revision_id,
                owned=dict(sorted(counts.items())),
                ownerless=ownerless,
            )
        )
    final = snapshots[-1].owned
    total = sum(final.values())
    fractions = (
        {cid: s / total for cid, s in final.items()} if total > 0 else {}
    )
    return OwnershipLedger(
        article_id=article.article_id,
        snapshots=tuple(snapshots),
        final_fractions=fractions,
    )


def contributor_profiles(corpus: RevisionCorpus) -> dict[str, EffortProfile]:
    """Average edit size per contributor, aggregated over the whole corpus.

    The first revision of an article counts as an edit from empty text.
    """
    if len(corpus) == 0:
        raise ValueError("profiles undefined for an empty corpus")
    effort: dict[str, int] = {}
    edits: dict[str, int] = {}
    for article in corpus:
        prev = ""
        for rev in article.revisions:
            size = levenshtein(prev, rev.text)
            effort[rev.contributor_id] = effort.get(rev.contributor_id, 0) + size
            edits[rev.contributor_id] = edits.get(rev.contributor_id, 0) + 1
            prev = rev.text
    return {
        cid: EffortProfile(cid, effort[cid], edits[cid]) for cid in sorted(edits)
    }


def _parse_record(line_number: int, raw: str) -> Revision:
    try:
        record = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CorpusFormatError(line_number, f"invalid JSON: {exc.msg}") from exc
    if not isinstance(record, dict):
        raise CorpusFormatError(line_number, "record must be a JSON object")
    for name in _REQUIRED_FIELDS:
        if name not in record:
            raise CorpusFormatError(line_number, f"missing field {name!r}")
    if not isinstance(record["article_id"], str) or not record["article_id"]:
        raise CorpusFormatError(line_number, "article_id must be a non-empty string")
    rid = record["revision_id"]
    if isinstance(rid, bool) or not isinstance(rid, int):
        raise CorpusFormatError(line_number, "revision_id must be an integer")
    if not isinstance(record["contributor_id"], str) or not record["contributor_id"]:
        raise CorpusFormatError(line_number, "contributor_id must be a non-empty string")
    if not isinstance(record["text"], str):
        raise CorpusFormatError(line_number, "text must be a string")
    if not isinstance(record["timestamp"], str):
        raise CorpusFormatError(line_number, "timestamp must be an ISO-8601 string")
    try:
        ts = parse_timestamp(record["timestamp"])
    except ValueError as exc:
        raise CorpusFormatError(line_number, f"bad timestamp: {exc}") from exc
    return Revision(
        article_id=record["article_id"],
        revision_id=rid,
        timestamp=ts,
        contributor_id=record["contributor_id"],
        text=record["text"],
    )


def load_corpus(source) -> RevisionCorpus:
    """Load a line-delimited revision corpus.

    ``source`` may be a path, bytes, or a (binary or text) file object.
    Revisions are grouped per article and sorted by (timestamp, revision_id);
    duplicate revision ids are rejected, and a revision whose id order
    contradicts its timestamp order raises an ordering error.
    """
    if isinstance(source, (str, Path)):
        with open(source, "rb") as fh:
            return load_corpus(fh)
    if isinstance(source, bytes):
        return load_corpus(io.BytesIO(source))

    by_article: dict[str, list[Revision]] = {}
    for line_number, raw in enumerate(source, start=1):
        if isinstance(raw, bytes):
            try:
                raw = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise CorpusFormatError(line_number, "invalid UTF-8") from exc
        if not raw.strip():
            continue
        rev = _parse_record(line_number, raw)
        by_article.setdefault(rev.article_id, []).append(rev)

    articles = []
    for article_id in sorted(by_article):
        revs = sorted(by_article[article_id], key=lambda r: (r.timestamp, r.revision_id))
        ids = [r.revision_id for r in revs]
        if len(set(ids)) != len(ids):
            dup = next(i for i in ids if ids.count(i) > 1)
            raise CorpusOrderingError(
                f"article {article_id!r}: duplicate revision_id {dup}"
            )
        if any(b <= a for a, b in zip(ids, ids[1:])):
            raise CorpusOrderingError(
                f"article {article_id!r}: timestamp order contradicts revision_id order"
            )
        articles.append(Article(article_id, tuple(revs)))
    return RevisionCorpus(tuple(articles))


def revision_to_json(rev: Revision) -> str:
    return json.dumps(
        {
            "article_id": rev.article_id,
            "revision_id": rev.revision_id,
            "timestamp": format_timestamp(rev.timestamp),
            "contributor_id": rev.contributor_id,
            "text": rev.text,
        },
        ensure_ascii=False,
        sort_keys=True,
        separators=(",", ":"),
    )


def write_corpus_jsonl(corpus: RevisionCorpus, path: str | Path) -> None:
    """Write the canonical line-delimited format (deterministic byte-for-byte)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for article in corpus:
            for rev in article.revisions:
                fh.write(revision_to_json(rev))
                fh.write("\n")
