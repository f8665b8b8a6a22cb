"""Quote verification levels, fallback notes, and the strictness ordering."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_corpus, oracle_min_edit, oracle_trace_level
from thematica.codebook import Codebook
from thematica.errors import EmptyCodebook
from thematica.outparse import CodeRecord
from thematica.textnorm import normalize_for_match
from thematica.trace import (
    DEFAULT_THRESHOLD,
    EXACT,
    FAILED,
    FUZZY,
    NORMALIZED,
    TraceabilityReport,
    verify_codebook,
    verify_quote,
)

PAGE_ONE = (
    "Interviewer: thank you for making time today.",
    "Respondent: I chanced on midwifery and I fell in love with it.",
    "Interviewer: what happened after your training?",
)
PAGE_TWO = (
    "Respondent: the first winter was harder than I expected.",
    "Respondent: my cousin had moved two years earlier and kept encouraging me.",
)


def two_page_corpus():
    return make_corpus(list(PAGE_ONE + PAGE_TWO), page_size=3)


def record(quote: str, page: int | None = 1, label: str = "Probe") -> CodeRecord:
    return CodeRecord(label=label, quote=quote, page=page)


def test_exact_match_scores_one_with_source_span() -> None:
    corpus = two_page_corpus()
    result = verify_quote(record("I chanced on midwifery and I fell in love with it."), corpus)
    assert result.level == EXACT
    assert result.score == 1.0
    start, end = result.matched_span
    assert corpus.pages[0].text[start:end] == "I chanced on midwifery and I fell in love with it."
    assert result.notes == ()


def test_case_and_curly_quote_variants_match_at_normalized() -> None:
    corpus = make_corpus(["She said “we can’t wait forever” and left."])
    result = verify_quote(record('we can\'t wait FOREVER'), corpus)
    assert result.level == NORMALIZED
    assert result.score == 1.0
    start, end = result.matched_span
    covered = corpus.pages[0].text[start:end]
    assert normalize_for_match(covered) == normalize_for_match("we can't wait forever")


def test_single_token_mutation_matches_at_fuzzy() -> None:
    corpus = two_page_corpus()
    mutated = "I changed to midwifery and I fell in love with it."
    result = verify_quote(record(mutated), corpus)
    assert result.level == FUZZY
    assert result.score >= 0.9
    expected = 1.0 - 3 / len(normalize_for_match(mutated))
    assert result.score == pytest.approx(expected, abs=1e-9)


def test_foreign_quote_fails_with_zero_score_and_diagnostic() -> None:
    corpus = two_page_corpus()
    result = verify_quote(record("The committee approved the budget amendment yesterday."), corpus)
    assert result.level == FAILED
    assert result.score == 0.0
    assert result.matched_span is None
    assert any("below threshold" in note for note in result.notes)


def test_quote_on_wrong_page_stays_failed_with_location_note() -> None:
    corpus = two_page_corpus()
    result = verify_quote(record("the first winter was harder than I expected.", page=1), corpus)
    assert result.level == FAILED
    assert any(note == "found on page 2 (exact)" for note in result.notes)


def test_out_of_range_page_gets_range_note_and_location() -> None:
    corpus = two_page_corpus()
    result = verify_quote(record("the first winter was harder than I expected.", page=9), corpus)
    assert result.level == FAILED
    assert any("outside corpus range 1..2" in note for note in result.notes)
    assert any("found on page 2" in note for note in result.notes)


def test_missing_page_reference_is_noted() -> None:
    corpus = two_page_corpus()
    result = verify_quote(record("my cousin had moved two years earlier", page=None), corpus)
    assert result.level == FAILED
    assert "record cites no page" in result.notes
    assert any("found on page 2" in note for note in result.notes)


def test_multi_sentence_failure_reports_per_sentence_diagnostics() -> None:
    corpus = two_page_corpus()
    quote = ("I chanced on midwifery and I fell in love with it. "
             "Afterwards I flew straight to the academy of stars.")
    result = verify_quote(record(quote), corpus)
    assert result.level == FAILED
    assert any("sentence 1/2 matches at exact level" in note for note in result.notes)
    assert any("sentence 2/2 not found on cited page" in note for note in result.notes)


def test_threshold_boundary_is_inclusive() -> None:
    corpus = make_corpus(["abcdefghij"])
    probe = "abcdeXghij"
    norm = normalize_for_match(probe)
    assert oracle_min_edit(norm, normalize_for_match(corpus.pages[0].text)) == 1
    similarity = 1.0 - 1 / len(norm)
    result = verify_quote(record(probe), corpus, threshold=similarity)
    assert result.level == FUZZY
    assert result.score == pytest.approx(similarity)
    stricter = verify_quote(record(probe), corpus, threshold=similarity + 1e-6)
    assert stricter.level == FAILED


def test_verify_codebook_preserves_order_and_counts() -> None:
    corpus = two_page_corpus()
    codebook = Codebook(coder_id="genai", provenance="llm", codes=(
        record("I chanced on midwifery and I fell in love with it.", label="Found Calling"),
        record("my cousin had moved two years earlier and kept encouraging me.",
               page=2, label="Family Example"),
        record("nothing of the sort appears anywhere", page=2, label="Phantom"),
    ))
    report = verify_codebook(codebook, corpus)
    assert [r.record.label for r in report.results] == [
        "Found Calling", "Family Example", "Phantom",
    ]
    assert report.counts == {EXACT: 2, NORMALIZED: 0, FUZZY: 0, FAILED: 1}
    assert report.failures[0].record.label == "Phantom"
    assert report.verified_share == pytest.approx(200 / 3)


def test_verify_codebook_accepts_plain_record_sequences() -> None:
    corpus = two_page_corpus()
    report = verify_codebook([record("what happened after your training?")], corpus)
    assert report.counts[EXACT] == 1


def test_verify_codebook_rejects_empty_input() -> None:
    corpus = two_page_corpus()
    with pytest.raises(EmptyCodebook):
        verify_codebook([], corpus)


def test_verification_is_deterministic() -> None:
    corpus = two_page_corpus()
    probe = record("I changed to midwifery and I fell in love with it.")
    first = verify_quote(probe, corpus)
    second = verify_quote(probe, corpus)
    assert first == second


def test_empty_report_counts_as_fully_verified() -> None:
    assert TraceabilityReport(results=()).verified_share == 100.0


def test_edit_distance_oracle_agrees_with_naive_enumeration() -> None:
    def full_levenshtein(a: str, b: str) -> int:
        row = list(range(len(b) + 1))
        for i, ca in enumerate(a, start=1):
            new = [i]
            for j, cb in enumerate(b, start=1):
                new.append(min(row[j - 1] + (ca != cb), row[j] + 1, new[j - 1] + 1))
            row = new
        return row[-1]

    def naive(pattern: str, text: str) -> int:
        best = len(pattern)
        for i in range(len(text) + 1):
            for j in range(i, len(text) + 1):
                best = min(best, full_levenshtein(pattern, text[i:j]))
        return best

    rng = random.Random(11)
    for _ in range(200):
        pattern = "".join(rng.choice("abc") for _ in range(rng.randint(0, 7)))
        text = "".join(rng.choice("abc") for _ in range(rng.randint(0, 12)))
        assert oracle_min_edit(pattern, text) == naive(pattern, text)


_WORDS = ("migration", "family", "winter", "hope", "shift", "nurse", "visa",
          "money", "train", "home", "don’t", "“quoted”")


@st.composite
def _quote_and_page(draw):
    words = draw(st.lists(st.sampled_from(_WORDS), min_size=5, max_size=18))
    page = " ".join(words)
    kind = draw(st.sampled_from(("exact", "cased", "mutated", "foreign")))
    if kind == "foreign":
        quote = draw(st.text(alphabet="xyz ", min_size=1, max_size=30))
    else:
        start = draw(st.integers(0, max(0, len(page) - 2)))
        length = draw(st.integers(3, 40))
        quote = page[start:start + length]
        if kind == "cased":
            quote = quote.upper()
        elif kind == "mutated":
            for _ in range(draw(st.integers(1, 3))):
                pos = draw(st.integers(0, max(0, len(quote) - 1)))
                quote = quote[:pos] + draw(st.sampled_from("qering ")) + quote[pos + 1:]
    return quote, page


@settings(max_examples=300, deadline=None)
@given(data=_quote_and_page())
def test_levels_agree_with_reference_grading(data: tuple[str, str]) -> None:
    quote, page = data
    if not quote.strip():
        return
    corpus = make_corpus([page], page_size=5)
    result = verify_quote(CodeRecord(label="Probe", quote=quote, page=1), corpus)
    expected_level, expected_score = oracle_trace_level(quote, page, DEFAULT_THRESHOLD)
    assert result.level == expected_level
    assert result.score == pytest.approx(expected_score, abs=1e-9)
