"""Transcript loading and fixed-size paging.

A document is an ordered list of non-empty paragraphs.  Paging groups every
``page_size`` consecutive paragraphs into one page; the page is the unit of
text sent to the model.  Two input formats are supported: UTF-8 plain text
with blank-line paragraph delimiters, and OOXML word documents (``.docx``),
from which only body paragraph text is extracted (no tables, headers, or
comments).

Plain-text blocks that span several physical lines are treated as one
soft-wrapped paragraph; the lines are rejoined with single spaces so quotes
never straddle an artificial line break.
"""

from __future__ import annotations

import hashlib
import math
import zipfile
from dataclasses import dataclass
from pathlib import Path
from xml.etree import ElementTree

from .errors import DecodeError, EmptyDocument, InvalidPageSize, PageOutOfRange

_WORD_NS = "{http://schemas.openxmlformats.org/wordprocessingml/2006/main}"

PLAIN_TEXT = "plain_text"
OOXML_DOCX = "ooxml_docx"


@dataclass(frozen=True)
class Paragraph:
    """One non-empty paragraph; ``index`` is the 0-based ordinal among kept paragraphs."""

    index: int
    text: str

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise EmptyDocument("paragraph text must be non-empty")
        if self.index < 0:
            raise ValueError("paragraph index must be >= 0")


@dataclass(frozen=True)
class Page:
    """An ordered block of paragraphs with a 1-based page number."""

    number: int
    paragraphs: tuple[Paragraph, ...]

    def __post_init__(self) -> None:
        if self.number < 1:
            raise PageOutOfRange(f"page number must be >= 1, got {self.number}")
        if not self.paragraphs:
            raise EmptyDocument(f"page {self.number} has no paragraphs")

    @property
    def text(self) -> str:
        """The page's paragraphs joined by single newlines."""
        return "\n".join(p.text for p in self.paragraphs)


@dataclass(frozen=True)
class Corpus:
    """A paged document: contiguous pages, each of ``page_size`` paragraphs except possibly the last."""

    source_path: str
    pages: tuple[Page, ...]
    page_size: int = 10

    def __post_init__(self) -> None:
        if self.page_size < 1:
            raise InvalidPageSize(f"page_size must be >= 1, got {self.page_size}")
        for position, page in enumerate(self.pages, start=1):
            if page.number != position:
                raise PageOutOfRange(
                    f"pages must be contiguous from 1; found number {page.number} at position {position}"
                )

    @property
    def page_count(self) -> int:
        return len(self.pages)

    def paragraphs(self) -> tuple[Paragraph, ...]:
        """All paragraphs in original document order."""
        return tuple(p for page in self.pages for p in page.paragraphs)


def load_document(path: str | Path, format: str = "auto") -> list[Paragraph]:
    """Load trimmed, non-empty paragraphs from a transcript file.

    ``format`` is ``plain_text``, ``ooxml_docx``, or ``auto`` (decided by the
    ``.docx`` suffix).  Empty paragraphs are dropped; indices number the kept
    paragraphs.
    """
    file_path = Path(path)
    if not file_path.is_file():
        raise FileNotFoundError(f"no such file: {file_path}")
    if format == "auto":
        format = OOXML_DOCX if file_path.suffix.lower() == ".docx" else PLAIN_TEXT
    if format == PLAIN_TEXT:
        texts = _read_plain_text(file_path)
    elif format == OOXML_DOCX:
        texts = _read_docx(file_path)
    else:
        raise ValueError(f"unknown format {format!r}; expected {PLAIN_TEXT!r} or {OOXML_DOCX!r}")

    paragraphs = [
        Paragraph(index, text)
        for index, text in enumerate(t.strip() for t in texts if t.strip())
    ]
    if not paragraphs:
        raise EmptyDocument(f"{file_path} contains no non-empty paragraphs")
    return paragraphs


def paginate(paragraphs: list[Paragraph], page_size: int = 10, source_path: str = "") -> Corpus:
    """Group paragraphs into pages of ``page_size``; the last page may be short."""
    if page_size < 1:
        raise InvalidPageSize(f"page_size must be >= 1, got {page_size}")
    if not paragraphs:
        raise EmptyDocument("cannot paginate an empty paragraph list")
    pages = tuple(
        Page(number=i // page_size + 1, paragraphs=tuple(paragraphs[i:i + page_size]))
        for i in range(0, len(paragraphs), page_size)
    )
    assert len(pages) == math.ceil(len(paragraphs) / page_size)
    return Corpus(source_path=source_path, pages=pages, page_size=page_size)


def load_corpus(path: str | Path, page_size: int = 10, format: str = "auto") -> Corpus:
    """Convenience: load a document and paginate it in one call."""
    return paginate(load_document(path, format=format), page_size=page_size, source_path=str(path))


def page_text(corpus: Corpus, number: int) -> str:
    """Newline-joined text of page ``number`` (1-based)."""
    if number < 1 or number > corpus.page_count:
        raise PageOutOfRange(
            f"page {number} out of range 1..{corpus.page_count}"
        )
    return corpus.pages[number - 1].text


def content_hash(corpus: Corpus) -> str:
    """Lowercase hex SHA-256 of the paragraph texts, newline-joined.

    Stable across input formats that carry identical paragraph content, so an
    artifact can be checked against a re-loaded corpus.
    """
    joined = "\n".join(p.text for p in corpus.paragraphs())
    return hashlib.sha256(joined.encode("utf-8")).hexdigest()


def _read_plain_text(path: Path) -> list[str]:
    try:
        raw = path.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise DecodeError(f"{path} is not valid UTF-8: {exc}") from exc
    blocks: list[str] = []
    current: list[str] = []
    for line in raw.splitlines():
        if line.strip():
            current.append(line.strip())
        elif current:
            blocks.append(" ".join(current))
            current = []
    if current:
        blocks.append(" ".join(current))
    return blocks


def _read_docx(path: Path) -> list[str]:
    try:
        with zipfile.ZipFile(path) as package:
            try:
                document_xml = package.read("word/document.xml")
            except KeyError as exc:
                raise DecodeError(f"{path} has no word/document.xml part") from exc
    except zipfile.BadZipFile as exc:
        raise DecodeError(f"{path} is not a valid OOXML package: {exc}") from exc
    try:
        root = ElementTree.fromstring(document_xml)
    except ElementTree.ParseError as exc:
        raise DecodeError(f"{path} has malformed document XML: {exc}") from exc
    body = root.find(f"{_WORD_NS}body")
    if body is None:
        raise DecodeError(f"{path} document XML has no body element")
    texts: list[str] = []
    for child in body:
        # Only direct body paragraphs; skips tables and section properties.
        if child.tag == f"{_WORD_NS}p":
            runs = [node.text or "" for node in child.iter(f"{_WORD_NS}t")]
            texts.append("".join(runs))
    return texts
