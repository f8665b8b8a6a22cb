"""Codebooks, cross-coder code matching, and merge counting.

A codebook houses one coder's codes and themes, whether produced by a human
or by a model.  Matching between two codebooks is deterministic and comes in
three modes: exact label equality after normalization, an explicit alias map
recording a reviewer's similarity judgments, and a token-overlap
approximation.  Merging follows the counting rule: similar codes count once,
outliers count separately.
"""

from __future__ import annotations

import csv
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    AliasChain,
    DuplicateLabel,
    EmptyCodebook,
    InconsistentMatch,
    SchemaError,
)
from .outparse import CodeRecord, ThemeRecord
from .textnorm import label_key, label_tokens, normalize_label

logger = logging.getLogger(__name__)

EXACT_NORMALIZED = "exact_normalized"
ALIAS_MAP = "alias_map"
TOKEN_OVERLAP = "token_overlap"
MATCHER_MODES = (EXACT_NORMALIZED, ALIAS_MAP, TOKEN_OVERLAP)

HUMAN_CSV_COLUMNS = ("coder_id", "theme", "code_label", "supporting_quote", "page")

_THEME_SIDECAR_HEADER = re.compile(r"^Theme\s*:\s*(?P<name>\S.*)$", re.IGNORECASE)


@dataclass(frozen=True)
class Codebook:
    """One coder's codes, optional emerging-label list, and themes."""

    coder_id: str
    provenance: str
    codes: tuple[CodeRecord, ...] = ()
    emerging_labels: tuple[str, ...] | None = None
    themes: tuple[ThemeRecord, ...] = ()

    def __post_init__(self) -> None:
        if not self.coder_id.strip():
            raise ValueError("coder_id must be non-empty")
        seen: dict[str, str] = {}
        for record in self.codes:
            key = label_key(record.label)
            if key in seen:
                raise DuplicateLabel(
                    f"labels {seen[key]!r} and {record.label!r} collide after normalization"
                )
            seen[key] = record.label

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(record.label for record in self.codes)

    def deduped_labels(self) -> tuple[str, ...]:
        """Record labels deduplicated case-insensitively, first appearance kept."""
        out: list[str] = []
        seen: set[str] = set()
        for record in self.codes:
            key = label_key(record.label)
            if key not in seen:
                seen.add(key)
                out.append(record.label)
        return tuple(out)


@dataclass(frozen=True)
class Matcher:
    """Pairwise label-equivalence policy used for matching and presence rows."""

    mode: str = EXACT_NORMALIZED
    alias_map: dict[str, str] | None = None
    jaccard_threshold: float = 0.6
    _alias_lookup: dict[str, str] = field(init=False, repr=False, compare=False, default_factory=dict)

    def __post_init__(self) -> None:
        if self.mode not in MATCHER_MODES:
            raise ValueError(f"unknown matcher mode {self.mode!r}")
        if not 0.0 < self.jaccard_threshold <= 1.0:
            raise ValueError(f"jaccard_threshold must be in (0, 1], got {self.jaccard_threshold}")
        if self.mode == ALIAS_MAP and self.alias_map is None:
            raise ValueError("alias_map mode requires an alias map")
        lookup: dict[str, str] = {}
        if self.alias_map:
            for source, target in self.alias_map.items():
                lookup[label_key(source)] = target
            for target in self.alias_map.values():
                target_key = label_key(target)
                onward = lookup.get(target_key)
                if onward is not None and label_key(onward) != target_key:
                    raise AliasChain(
                        f"alias target {target!r} is itself aliased to {onward!r}"
                    )
        object.__setattr__(self, "_alias_lookup", lookup)

    def canonical_label(self, label: str) -> str:
        """Resolve a label to its canonical surface form (alias mode only rewrites)."""
        if self.mode == ALIAS_MAP:
            return self._alias_lookup.get(label_key(label), label)
        return label

    def matches(self, label_a: str, label_b: str) -> bool:
        key_a = label_key(self.canonical_label(label_a))
        key_b = label_key(self.canonical_label(label_b))
        if key_a == key_b:
            return True
        if self.mode == TOKEN_OVERLAP:
            return jaccard(label_a, label_b) >= self.jaccard_threshold
        return False


@dataclass(frozen=True)
class MatchResult:
    """1-to-1 label pairing between two codebooks plus the unmatched leftovers."""

    pairs: tuple[tuple[str, str], ...]
    outliers_a: tuple[str, ...]
    outliers_b: tuple[str, ...]

    def __post_init__(self) -> None:
        used_a = [pair[0] for pair in self.pairs] + list(self.outliers_a)
        used_b = [pair[1] for pair in self.pairs] + list(self.outliers_b)
        if len(set(used_a)) != len(used_a) or len(set(used_b)) != len(used_b):
            raise ValueError("a label may appear in at most one pair or outlier slot")


def jaccard(label_a: str, label_b: str) -> float:
    """Token-set Jaccard similarity between two labels."""
    tokens_a = label_tokens(label_a)
    tokens_b = label_tokens(label_b)
    if not tokens_a and not tokens_b:
        return 1.0 if label_key(label_a) == label_key(label_b) else 0.0
    if not tokens_a or not tokens_b:
        return 0.0
    return len(tokens_a & tokens_b) / len(tokens_a | tokens_b)


def _claim_canonical(codebook: Codebook, matcher: Matcher) -> tuple[dict[str, str], list[str]]:
    """Map canonical key → first claiming label; later collisions become outliers."""
    claims: dict[str, str] = {}
    collided: list[str] = []
    for record in codebook.codes:
        key = label_key(matcher.canonical_label(record.label))
        if key in claims:
            collided.append(record.label)
        else:
            claims[key] = record.label
    return claims, collided


def match_codes(a: Codebook, b: Codebook, matcher: Matcher) -> MatchResult:
    """Deterministic 1-to-1 matching of code labels between two codebooks."""
    if not a.codes or not b.codes:
        raise EmptyCodebook("both codebooks must contain codes")
    if matcher.mode == TOKEN_OVERLAP:
        return _match_token_overlap(a, b, matcher)

    claims_a, collided_a = _claim_canonical(a, matcher)
    claims_b, collided_b = _claim_canonical(b, matcher)
    pairs: list[tuple[str, str]] = []
    outliers_a: list[str] = list(collided_a)
    outliers_b: list[str] = list(collided_b)
    for key, label_a in claims_a.items():
        if key in claims_b:
            pairs.append((label_a, claims_b[key]))
        else:
            outliers_a.append(label_a)
    for key, label_b in claims_b.items():
        if key not in claims_a:
            outliers_b.append(label_b)
    return MatchResult(pairs=tuple(pairs),
                       outliers_a=tuple(sorted(outliers_a, key=lambda lbl: a.labels.index(lbl))),
                       outliers_b=tuple(sorted(outliers_b, key=lambda lbl: b.labels.index(lbl))))


def _match_token_overlap(a: Codebook, b: Codebook, matcher: Matcher) -> MatchResult:
    candidates: list[tuple[float, str, str]] = []
    for label_a in a.labels:
        for label_b in b.labels:
            similarity = jaccard(label_a, label_b)
            if similarity >= matcher.jaccard_threshold:
                candidates.append((similarity, label_a, label_b))
    candidates.sort(key=lambda item: (-item[0], item[1], item[2]))
    used_a: set[str] = set()
    used_b: set[str] = set()
    pairs: list[tuple[str, str]] = []
    for _, label_a, label_b in candidates:
        if label_a in used_a or label_b in used_b:
            continue
        used_a.add(label_a)
        used_b.add(label_b)
        pairs.append((label_a, label_b))
    ordered = sorted(pairs, key=lambda pair: a.labels.index(pair[0]))
    return MatchResult(
        pairs=tuple(ordered),
        outliers_a=tuple(lbl for lbl in a.labels if lbl not in used_a),
        outliers_b=tuple(lbl for lbl in b.labels if lbl not in used_b),
    )


def merge_codebooks(a: Codebook, b: Codebook, match: MatchResult) -> tuple[Codebook, int]:
    """Merge two codebooks under the similar-codes-count-once rule.

    Paired codes keep coder A's record, with coder B's label recorded as an
    alias when it differs; outliers from both sides carry over unchanged.
    Returns the merged codebook and the merge count |A| + |B| − |pairs|.
    """
    labels_a = set(a.labels)
    labels_b = set(b.labels)
    for label_a, label_b in match.pairs:
        if label_a not in labels_a or label_b not in labels_b:
            raise InconsistentMatch(f"pair ({label_a!r}, {label_b!r}) not drawn from the inputs")
    for label in match.outliers_a:
        if label not in labels_a:
            raise InconsistentMatch(f"outlier {label!r} not in first codebook")
    for label in match.outliers_b:
        if label not in labels_b:
            raise InconsistentMatch(f"outlier {label!r} not in second codebook")

    alias_for: dict[str, str] = {la: lb for la, lb in match.pairs}
    paired_a = set(alias_for)
    outlier_b_set = set(match.outliers_b)
    merged: list[CodeRecord] = []
    for record in a.codes:
        if record.label in paired_a:
            partner = alias_for[record.label]
            extra = (partner,) if label_key(partner) != label_key(record.label) else ()
            merged.append(CodeRecord(
                label=record.label, quote=record.quote, page=record.page,
                provenance="human-merged", raw_span=record.raw_span,
                aliases=record.aliases + extra,
            ))
        else:
            merged.append(record)
    for record in b.codes:
        if record.label in outlier_b_set:
            merged.append(record)

    merge_count = len(a.codes) + len(b.codes) - len(match.pairs)
    assert merge_count == len(merged)
    merged_book = Codebook(
        coder_id=f"{a.coder_id}+{b.coder_id}",
        provenance="human-merged",
        codes=tuple(merged),
    )
    return merged_book, merge_count


def load_human_codebook(path: str | Path, interpretations_path: str | Path | None = None) -> Codebook:
    """Load a human coder's codebook from CSV.

    Schema (header required): coder_id, theme, code_label, supporting_quote,
    page.  Quote and page may be empty.  The theme column groups rows into
    ThemeRecords in first-appearance order; an optional sidecar text file
    with ``Theme: <name>`` headers attaches interpretation prose.
    """
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        missing = [column for column in HUMAN_CSV_COLUMNS if column not in header]
        if missing:
            raise SchemaError(f"{path.name}: missing column(s) {', '.join(missing)}")
        rows = list(reader)
    if not rows:
        raise EmptyCodebook(f"{path.name}: no data rows")

    coder_id = ""
    codes: list[CodeRecord] = []
    theme_members: dict[str, list[str]] = {}
    theme_order: list[str] = []
    quoteless = 0
    for line, row in enumerate(rows, start=2):
        row_coder = (row["coder_id"] or "").strip()
        if row_coder:
            if not coder_id:
                coder_id = row_coder
            elif row_coder != coder_id:
                raise SchemaError(f"{path.name}:{line}: mixed coder ids {coder_id!r} and {row_coder!r}")
        label = normalize_label(row["code_label"] or "")
        if not label:
            raise SchemaError(f"{path.name}:{line}: empty code_label")
        quote = (row["supporting_quote"] or "").strip()
        if not quote:
            quoteless += 1
        page_field = (row["page"] or "").strip()
        if page_field:
            try:
                page: int | None = int(page_field)
            except ValueError as exc:
                raise SchemaError(f"{path.name}:{line}: page {page_field!r} is not an integer") from exc
        else:
            page = None
        codes.append(CodeRecord(label=label, quote=quote, page=page, provenance="human"))
        theme_name = normalize_label(row["theme"] or "")
        if theme_name:
            if theme_name not in theme_members:
                theme_members[theme_name] = []
                theme_order.append(theme_name)
            theme_members[theme_name].append(label)
    if not coder_id:
        raise SchemaError(f"{path.name}: coder_id missing from every row")
    if quoteless:
        logger.warning("%s: %d of %d rows have no supporting quote",
                       path.name, quoteless, len(rows))

    interpretations = _load_theme_sidecar(interpretations_path) if interpretations_path else {}
    themes = tuple(
        ThemeRecord(
            name=name,
            member_labels=tuple(theme_members[name]),
            interpretation=interpretations.pop(label_key(name), None),
        )
        for name in theme_order
    )
    for leftover in interpretations.values():
        logger.warning("%s: interpretation section %r matches no theme", path.name, leftover[:40])
    return Codebook(coder_id=coder_id, provenance="human", codes=tuple(codes), themes=themes)


def _load_theme_sidecar(path: str | Path) -> dict[str, str]:
    """Parse ``Theme: <name>`` sections into a key → prose map."""
    sections: dict[str, list[str]] = {}
    current: str | None = None
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        header = _THEME_SIDECAR_HEADER.match(line)
        if header:
            current = label_key(header.group("name"))
            sections.setdefault(current, [])
        elif current is not None:
            sections[current].append(line)
    return {
        key: "\n".join(lines).strip()
        for key, lines in sections.items()
        if "\n".join(lines).strip()
    }


def load_alias_map(path: str | Path) -> dict[str, str]:
    """Load a reviewer's alias map from CSV with columns from_label, to_label."""
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        if "from_label" not in header or "to_label" not in header:
            raise SchemaError(f"{path.name}: expected columns from_label, to_label")
        mapping: dict[str, str] = {}
        for line, row in enumerate(reader, start=2):
            source = normalize_label(row["from_label"] or "")
            target = normalize_label(row["to_label"] or "")
            if not source or not target:
                raise SchemaError(f"{path.name}:{line}: empty label")
            existing = mapping.get(source)
            if existing is not None and label_key(existing) != label_key(target):
                raise SchemaError(f"{path.name}:{line}: {source!r} aliased to both "
                                  f"{existing!r} and {target!r}")
            mapping[source] = target
    Matcher(mode=ALIAS_MAP, alias_map=mapping)
    return mapping
