"""Document loading and pagination behavior."""

from __future__ import annotations

import math
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thematica.corpus import (
    OOXML_DOCX,
    PLAIN_TEXT,
    Corpus,
    Page,
    Paragraph,
    content_hash,
    load_corpus,
    load_document,
    page_text,
    paginate,
)
from thematica.errors import DecodeError, EmptyDocument, InvalidPageSize, PageOutOfRange

from conftest import make_corpus, write_docx


def test_plain_text_blocks_joined_across_soft_wraps(tmp_path: Path) -> None:
    source = tmp_path / "a.txt"
    source.write_text(
        "First paragraph spans\ntwo source lines.\n\n\nSecond paragraph.\n\n  \nThird.\n",
        encoding="utf-8",
    )
    paragraphs = load_document(source)
    assert [p.text for p in paragraphs] == [
        "First paragraph spans two source lines.",
        "Second paragraph.",
        "Third.",
    ]
    assert [p.index for p in paragraphs] == [0, 1, 2]


def test_plain_text_strips_surrounding_whitespace(tmp_path: Path) -> None:
    source = tmp_path / "a.txt"
    source.write_text("\n\n   padded line   \n\n", encoding="utf-8")
    assert [p.text for p in load_document(source)] == ["padded line"]


def test_docx_paragraphs_concatenate_runs_and_drop_empties(tmp_path: Path) -> None:
    source = tmp_path / "a.docx"
    write_docx(source, ["Interviewer: welcome.", "", "Respondent: thank you.", "   "])
    paragraphs = load_document(source)
    assert [p.text for p in paragraphs] == ["Interviewer: welcome.", "Respondent: thank you."]


def test_format_auto_detects_by_suffix(tmp_path: Path) -> None:
    docx = write_docx(tmp_path / "b.DOCX", ["From word processor."])
    txt = tmp_path / "b.txt"
    txt.write_text("From plain text.\n", encoding="utf-8")
    assert load_document(docx)[0].text == "From word processor."
    assert load_document(txt)[0].text == "From plain text."


def test_format_override_beats_suffix(tmp_path: Path) -> None:
    mislabeled = tmp_path / "actually_text.docx"
    mislabeled.write_text("plain content\n", encoding="utf-8")
    assert load_document(mislabeled, format=PLAIN_TEXT)[0].text == "plain content"
    with pytest.raises(DecodeError):
        load_document(mislabeled, format=OOXML_DOCX)


def test_unknown_format_rejected(tmp_path: Path) -> None:
    source = tmp_path / "a.txt"
    source.write_text("content\n", encoding="utf-8")
    with pytest.raises(ValueError, match="unknown format"):
        load_document(source, format="rtf")


def test_missing_file_raises_file_not_found(tmp_path: Path) -> None:
    with pytest.raises(FileNotFoundError):
        load_document(tmp_path / "absent.txt")


def test_invalid_utf8_raises_decode_error(tmp_path: Path) -> None:
    source = tmp_path / "a.txt"
    source.write_bytes(b"\xff\xfe broken")
    with pytest.raises(DecodeError):
        load_document(source)


def test_docx_without_document_part_raises_decode_error(tmp_path: Path) -> None:
    import zipfile

    source = tmp_path / "a.docx"
    with zipfile.ZipFile(source, "w") as package:
        package.writestr("word/other.xml", "<x/>")
    with pytest.raises(DecodeError, match="document.xml"):
        load_document(source)


def test_blank_document_raises_empty_document(tmp_path: Path) -> None:
    source = tmp_path / "a.txt"
    source.write_text("\n\n   \n", encoding="utf-8")
    with pytest.raises(EmptyDocument):
        load_document(source)


def test_page_size_must_be_positive() -> None:
    paragraphs = [Paragraph(0, "alpha")]
    for bad in (0, -3):
        with pytest.raises(InvalidPageSize):
            paginate(paragraphs, page_size=bad)


def test_paginate_rejects_empty_list() -> None:
    with pytest.raises(EmptyDocument):
        paginate([], page_size=10)


def test_pagination_chunks_match_slicing_oracle() -> None:
    texts = [f"paragraph {i}" for i in range(25)]
    corpus = make_corpus(texts, page_size=10)
    assert corpus.page_count == 3
    assert [len(page.paragraphs) for page in corpus.pages] == [10, 10, 5]
    for k, page in enumerate(corpus.pages, start=1):
        assert [p.text for p in page.paragraphs] == texts[(k - 1) * 10:k * 10]
        assert page.number == k


def test_page_text_joins_with_newlines() -> None:
    corpus = make_corpus(["one", "two", "three"], page_size=2)
    assert page_text(corpus, 1) == "one\ntwo"
    assert page_text(corpus, 2) == "three"
    with pytest.raises(PageOutOfRange):
        page_text(corpus, 3)
    with pytest.raises(PageOutOfRange):
        page_text(corpus, 0)


def test_corpus_rejects_noncontiguous_pages() -> None:
    page_one = Page(1, (Paragraph(0, "a"),))
    page_three = Page(3, (Paragraph(1, "b"),))
    with pytest.raises(PageOutOfRange):
        Corpus(source_path="x", pages=(page_one, page_three), page_size=1)


def test_content_hash_is_format_independent(tmp_path: Path) -> None:
    texts = ["Opening remark.", "A longer middle paragraph.", "Closing."]
    txt = tmp_path / "doc.txt"
    txt.write_text("\n\n".join(texts) + "\n", encoding="utf-8")
    docx = write_docx(tmp_path / "doc.docx", texts)
    hash_txt = content_hash(load_corpus(txt, page_size=2))
    hash_docx = content_hash(load_corpus(docx, page_size=2))
    assert hash_txt == hash_docx
    assert content_hash(load_corpus(txt, page_size=1)) == hash_txt
    assert len(hash_txt) == 64 and set(hash_txt) <= set("0123456789abcdef")


def test_content_hash_changes_with_content(tmp_path: Path) -> None:
    first = make_corpus(["alpha", "beta"])
    second = make_corpus(["alpha", "gamma"])
    assert content_hash(first) != content_hash(second)


_paragraph_texts = st.lists(
    st.text(min_size=1, max_size=40).filter(lambda s: s.strip()),
    min_size=1,
    max_size=60,
)


@settings(max_examples=150, deadline=None)
@given(texts=_paragraph_texts, page_size=st.integers(min_value=1, max_value=12))
def test_pagination_laws(texts: list[str], page_size: int) -> None:
    corpus = make_corpus(texts, page_size=page_size)
    assert corpus.page_count == math.ceil(len(texts) / page_size)
    assert [page.number for page in corpus.pages] == list(range(1, corpus.page_count + 1))
    assert [p.text for p in corpus.paragraphs()] == texts
    assert [p.index for p in corpus.paragraphs()] == list(range(len(texts)))
    for page in corpus.pages[:-1]:
        assert len(page.paragraphs) == page_size
    assert 1 <= len(corpus.pages[-1].paragraphs) <= page_size
