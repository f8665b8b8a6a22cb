"""Agreement formulas, display rounding, kappa, and presence matrices."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thematica.agreement import (
    AgreementSummary,
    PresenceMatrix,
    build_table4_summary,
    cohens_kappa,
    format_percent,
    overlap_percentage,
    percentage_difference,
    percentage_pair,
    percentage_similarity,
    presence_matrix,
    round_display,
    share_percentage,
)
from thematica.codebook import Codebook, Matcher
from thematica.errors import (
    LengthMismatch,
    PartExceedsTotal,
    SimilarExceedsOwn,
    ZeroBaseline,
    ZeroOwnCount,
    ZeroTotal,
)
from thematica.outparse import CodeRecord


def book(coder_id: str, labels: list[str]) -> Codebook:
    return Codebook(coder_id=coder_id, provenance="human", codes=tuple(
        CodeRecord(label=label, quote="q", page=1) for label in labels
    ))


def test_difference_and_similarity_reference_values() -> None:
    assert percentage_difference(67, 59) == pytest.approx(11.94, abs=0.005)
    assert percentage_similarity(67, 59) == pytest.approx(88.06, abs=0.005)


def test_difference_can_go_negative() -> None:
    assert percentage_difference(59, 67) == pytest.approx(-13.56, abs=0.005)
    assert percentage_similarity(59, 67) == pytest.approx(113.56, abs=0.005)


def test_percentage_pair_is_exactly_complementary() -> None:
    difference, similarity = percentage_pair(67, 59)
    assert isinstance(difference, Fraction) and isinstance(similarity, Fraction)
    assert difference + similarity == 100
    assert difference == Fraction(800, 67)


def test_zero_baseline_rejected() -> None:
    with pytest.raises(ZeroBaseline):
        percentage_difference(0, 10)
    with pytest.raises(ValueError):
        percentage_pair(5, -1)


def test_share_reference_values() -> None:
    assert share_percentage(4, 19) == pytest.approx(21.05, abs=0.005)
    assert share_percentage(15, 19) == pytest.approx(78.95, abs=0.005)
    assert share_percentage(67, 126) == pytest.approx(53.17, abs=0.005)
    assert share_percentage(59, 126) == pytest.approx(46.83, abs=0.005)


def test_share_guards() -> None:
    with pytest.raises(ZeroTotal):
        share_percentage(1, 0)
    with pytest.raises(PartExceedsTotal):
        share_percentage(5, 4)


def test_overlap_reference_values() -> None:
    assert overlap_percentage(15, 23) == pytest.approx(65.22, abs=0.005)
    assert overlap_percentage(15, 26) == pytest.approx(57.69, abs=0.005)


def test_overlap_guards() -> None:
    with pytest.raises(ZeroOwnCount):
        overlap_percentage(1, 0)
    with pytest.raises(SimilarExceedsOwn):
        overlap_percentage(7, 6)


def test_round_display_is_half_up() -> None:
    assert round_display(2.675) == 2.68
    assert round_display(2.665) == 2.67
    assert round_display(11.940298507462687) == 11.94
    assert round_display(Fraction(5900, 67)) == 88.06
    assert round_display(0.005) == 0.01
    assert round_display(-1) == -1.0


def test_format_percent_prints_two_decimals() -> None:
    assert format_percent(Fraction(800, 67)) == "11.94"
    assert format_percent(100) == "100.00"
    assert format_percent(78.94736842105263) == "78.95"


@settings(max_examples=200, deadline=None)
@given(count_a=st.integers(1, 500), count_b=st.integers(0, 500))
def test_pair_complementarity_law(count_a: int, count_b: int) -> None:
    difference, similarity = percentage_pair(count_a, count_b)
    assert difference + similarity == 100
    assert float(difference) == pytest.approx(percentage_difference(count_a, count_b))


@settings(max_examples=200, deadline=None)
@given(part=st.integers(0, 300), rest=st.integers(0, 300))
def test_shares_of_a_split_sum_to_hundred(part: int, rest: int) -> None:
    total = part + rest
    if total == 0:
        return
    share_one = share_percentage(part, total)
    share_two = share_percentage(rest, total)
    assert share_one + share_two == pytest.approx(100.0, abs=1e-9)


def test_kappa_reference_points() -> None:
    assert cohens_kappa([1, 1, 0, 0], [1, 1, 0, 0]) == 1.0
    assert cohens_kappa([1, 1, 0, 0], [0, 0, 1, 1]) == -1.0
    assert cohens_kappa([1, 1, 0, 0], [1, 0, 1, 0]) == 0.0


def test_kappa_validation() -> None:
    with pytest.raises(LengthMismatch):
        cohens_kappa([1, 0], [1])
    with pytest.raises(LengthMismatch):
        cohens_kappa([], [])
    with pytest.raises(ValueError):
        cohens_kappa([2, 0], [1, 0])


def test_kappa_constant_vector_edge_cases() -> None:
    assert cohens_kappa([1, 1, 1], [1, 1, 1]) == 1.0
    assert cohens_kappa([0, 0], [0, 0]) == 1.0
    assert cohens_kappa([1, 1], [0, 0]) == 0.0


def _confusion_matrix_kappa(x: list[int], y: list[int]) -> float:
    both = sum(1 for a, b in zip(x, y) if a == 1 and b == 1)
    neither = sum(1 for a, b in zip(x, y) if a == 0 and b == 0)
    only_x = sum(1 for a, b in zip(x, y) if a == 1 and b == 0)
    only_y = sum(1 for a, b in zip(x, y) if a == 0 and b == 1)
    n = both + neither + only_x + only_y
    p_o = (both + neither) / n
    p_yes = ((both + only_x) / n) * ((both + only_y) / n)
    p_no = ((neither + only_y) / n) * ((neither + only_x) / n)
    p_e = p_yes + p_no
    return (p_o - p_e) / (1 - p_e)


def test_kappa_matches_confusion_matrix_computation() -> None:
    rng = random.Random(404)
    checked = 0
    while checked < 100:
        n = rng.randint(2, 40)
        x = [rng.randint(0, 1) for _ in range(n)]
        y = [rng.randint(0, 1) for _ in range(n)]
        if x == y and sum(x) in (0, n):
            continue
        assert cohens_kappa(x, y) == pytest.approx(_confusion_matrix_kappa(x, y), abs=1e-9)
        checked += 1


def test_presence_matrix_first_appearance_rows() -> None:
    first = book("c1", ["Alpha", "Beta"])
    second = book("c2", ["beta", "Gamma"])
    matrix = presence_matrix([first, second], Matcher())
    assert matrix.row_labels == ("Alpha", "Beta", "Gamma")
    assert matrix.coder_ids == ("c1", "c2")
    assert matrix.cells == ((1, 0), (1, 1), (0, 1))
    assert list(matrix.column_vector("c1")) == [1, 1, 0]
    assert list(matrix.column_vector("c2")) == [0, 1, 1]


def test_presence_matrix_against_set_oracle() -> None:
    rng = random.Random(99)
    alphabet = [f"Code {letter}" for letter in "ABCDEFGHIJ"]
    matcher = Matcher()
    for _ in range(50):
        labels_a = rng.sample(alphabet, rng.randint(1, 6))
        labels_b = rng.sample(alphabet, rng.randint(1, 6))
        matrix = presence_matrix([book("a", labels_a), book("b", labels_b)], matcher)
        assert set(matrix.row_labels) == set(labels_a) | set(labels_b)
        for row_label, (in_a, in_b) in zip(matrix.row_labels, matrix.cells):
            assert in_a == int(row_label in labels_a)
            assert in_b == int(row_label in labels_b)


def test_combined_summary_reference_values_and_ratio_note() -> None:
    summary = build_table4_summary(67, 59)
    assert summary.total_combined == 126
    assert summary.share_a == pytest.approx(53.17, abs=0.005)
    assert summary.share_b == pytest.approx(46.83, abs=0.005)
    assert summary.percentage_difference == pytest.approx(11.94, abs=0.005)
    assert summary.percentage_similarity == pytest.approx(88.06, abs=0.005)
    assert summary.similar_count == 118
    assert len(summary.notes) == 1
    assert summary.notes[0] == (
        "similar-count share 118/126 = 93.65% differs from the formula-based "
        "similarity 88.06%"
    )


def test_combined_summary_negative_difference_note() -> None:
    summary = build_table4_summary(59, 67)
    assert summary.percentage_difference < 0
    assert any("difference is negative" in note for note in summary.notes)


def test_summary_total_consistency_enforced() -> None:
    with pytest.raises(ValueError):
        AgreementSummary(count_a=3, count_b=4, similar_count=2,
                         percentage_difference=0.0, percentage_similarity=100.0,
                         total_combined=8, share_a=50.0, share_b=50.0)


def test_presence_matrix_rejects_nonbinary_cells() -> None:
    with pytest.raises(ValueError):
        PresenceMatrix(row_labels=("A",), coder_ids=("x", "y"), cells=((2, 0),))
