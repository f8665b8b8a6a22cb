"""Quote traceability: verify supporting quotes against their cited pages.

Each quote is checked at graded strictness.  Exact means literal substring of
the cited page.  Normalized retries after case folding, whitespace collapse,
and quote/dash unification.  Fuzzy runs a sliding edit-distance alignment
over the normalized page and accepts similarity at or above a threshold.
Anything else is Failed with score 0.  A quote that only matches some other
page stays Failed with a "found on page k" note; it is never re-homed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .corpus import Corpus
from .errors import EmptyCodebook
from .outparse import CodeRecord
from .textnorm import normalize_with_map

EXACT = "Exact"
NORMALIZED = "Normalized"
FUZZY = "Fuzzy"
FAILED = "Failed"
LEVELS = (EXACT, NORMALIZED, FUZZY, FAILED)

DEFAULT_THRESHOLD = 0.85

_SENTENCE_SPLIT = re.compile(r"(?<=[.!?…])\s+")


@dataclass(frozen=True)
class TraceResult:
    record: CodeRecord
    level: str
    score: float
    matched_span: tuple[int, int] | None = None
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.level not in LEVELS:
            raise ValueError(f"unknown trace level {self.level!r}")
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score must be in [0, 1], got {self.score}")


@dataclass(frozen=True)
class TraceabilityReport:
    results: tuple[TraceResult, ...]
    threshold: float = DEFAULT_THRESHOLD

    @property
    def counts(self) -> dict[str, int]:
        tally = {level: 0 for level in LEVELS}
        for result in self.results:
            tally[result.level] += 1
        return tally

    @property
    def failures(self) -> tuple[TraceResult, ...]:
        return tuple(r for r in self.results if r.level == FAILED)

    @property
    def verified_share(self) -> float:
        """Percentage of quotes matched at any level above Failed."""
        if not self.results:
            return 100.0
        verified = sum(1 for r in self.results if r.level != FAILED)
        return verified * 100.0 / len(self.results)


def _semi_global_align(pattern: str, text: str) -> tuple[int, int, int]:
    """Best infix alignment of pattern inside text.

    Returns (edit_distance, start, end) where text[start:end] is the aligned
    window.  Prefix and suffix of the text are free; ties resolve to the
    leftmost window for determinism.
    """
    m, n = len(pattern), len(text)
    if m == 0:
        return 0, 0, 0
    if n == 0:
        return m, 0, 0
    prev_cost = [0] * (n + 1)
    prev_start = list(range(n + 1))
    for i in range(1, m + 1):
        char = pattern[i - 1]
        cur_cost = [i] + [0] * n
        cur_start = [0] * (n + 1)
        for j in range(1, n + 1):
            cost = prev_cost[j - 1] + (0 if char == text[j - 1] else 1)
            start = prev_start[j - 1]
            alt = prev_cost[j] + 1
            if alt < cost or (alt == cost and prev_start[j] < start):
                cost, start = alt, prev_start[j]
            alt = cur_cost[j - 1] + 1
            if alt < cost or (alt == cost and cur_start[j - 1] < start):
                cost, start = alt, cur_start[j - 1]
            cur_cost[j] = cost
            cur_start[j] = start
        prev_cost, prev_start = cur_cost, cur_start
    best_j = 0
    for j in range(1, n + 1):
        if prev_cost[j] < prev_cost[best_j] or (
            prev_cost[j] == prev_cost[best_j] and prev_start[j] < prev_start[best_j]
        ):
            best_j = j
    return prev_cost[best_j], prev_start[best_j], best_j


def _map_span(index_map: list[int], start: int, end: int, source_len: int) -> tuple[int, int]:
    if start >= len(index_map):
        return source_len, source_len
    source_start = index_map[start]
    source_end = index_map[end - 1] + 1 if end > start else source_start
    return source_start, min(source_end, source_len)


def _match_on_text(quote: str, text: str) -> tuple[str, float, tuple[int, int] | None, float]:
    """Match quote against one page text.

    Returns (level, score, span, best_similarity); best_similarity is the
    fuzzy similarity even when below threshold, for diagnostics.
    """
    position = text.find(quote)
    if position >= 0:
        return EXACT, 1.0, (position, position + len(quote)), 1.0
    norm_quote, _ = normalize_with_map(quote)
    norm_text, index_map = normalize_with_map(text)
    if norm_quote:
        position = norm_text.find(norm_quote)
        if position >= 0:
            span = _map_span(index_map, position, position + len(norm_quote), len(text))
            return NORMALIZED, 1.0, span, 1.0
        distance, start, end = _semi_global_align(norm_quote, norm_text)
        similarity = max(0.0, 1.0 - distance / len(norm_quote))
        span = _map_span(index_map, start, end, len(text))
        return FUZZY, similarity, span, similarity
    return FAILED, 0.0, None, 0.0


def verify_quote(record: CodeRecord, corpus: Corpus,
                 threshold: float = DEFAULT_THRESHOLD) -> TraceResult:
    """Verify one record's quote against its cited page at the strongest level.

    Out-of-range cited pages produce a Failed result with an explanatory
    note; the quote is still checked against every page so the note can say
    where it actually lives.
    """
    notes: list[str] = []
    quote = record.quote
    page_index = None
    if record.page is not None and 1 <= record.page <= corpus.page_count:
        page_index = record.page - 1
    elif record.page is None:
        notes.append("record cites no page")
    else:
        notes.append(f"cited page {record.page} outside corpus range 1..{corpus.page_count}")

    best_similarity = 0.0
    if page_index is not None:
        level, score, span, best_similarity = _match_on_text(quote, corpus.pages[page_index].text)
        if level == FUZZY and score >= threshold:
            return TraceResult(record=record, level=FUZZY, score=score,
                               matched_span=span, notes=tuple(notes))
        if level in (EXACT, NORMALIZED):
            return TraceResult(record=record, level=level, score=score,
                               matched_span=span, notes=tuple(notes))
        notes.append(f"best similarity on cited page {best_similarity:.4f} below threshold {threshold}")

    for page in corpus.pages:
        if page_index is not None and page.number == record.page:
            continue
        level, _, _, _ = _match_on_text(quote, page.text)
        if level in (EXACT, NORMALIZED):
            notes.append(f"found on page {page.number} ({level.lower()})")
            break

    pieces = [piece for piece in _SENTENCE_SPLIT.split(quote.strip()) if piece]
    if page_index is not None and len(pieces) > 1:
        page_text = corpus.pages[page_index].text
        for position, piece in enumerate(pieces, start=1):
            level, _, _, _ = _match_on_text(piece, page_text)
            if level in (EXACT, NORMALIZED):
                notes.append(f"sentence {position}/{len(pieces)} matches at {level.lower()} level")
            else:
                notes.append(f"sentence {position}/{len(pieces)} not found on cited page")

    return TraceResult(record=record, level=FAILED, score=0.0,
                       matched_span=None, notes=tuple(notes))


def verify_codebook(codebook, corpus: Corpus,
                    threshold: float = DEFAULT_THRESHOLD) -> TraceabilityReport:
    """Verify every record of a codebook; result order matches record order."""
    records = tuple(codebook.codes) if hasattr(codebook, "codes") else tuple(codebook)
    if not records:
        raise EmptyCodebook("cannot verify an empty codebook")
    results = tuple(verify_quote(record, corpus, threshold) for record in records)
    return TraceabilityReport(results=results, threshold=threshold)
