"""Command-line interface: analyze, compare, verify, report.

Configuration precedence is flags over config-file values over defaults.
Exit codes are a stable contract: 0 success, 1 configuration or runtime
error, 2 partial analysis, 3 trace failures.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field, fields
from pathlib import Path

from .agreement import overlap_percentage
from .codebook import (
    ALIAS_MAP,
    EXACT_NORMALIZED,
    MATCHER_MODES,
    Codebook,
    Matcher,
    load_alias_map,
    load_human_codebook,
    match_codes,
    merge_codebooks,
)
from .corpus import content_hash, load_corpus
from .errors import (
    AnalysisInterrupted,
    AuthError,
    ConfigError,
    IncompleteArtifact,
    ThematicaError,
)
from .gateway import (
    ENV_VAR,
    FALLBACK_ENV_VAR,
    LiveTransport,
    ModelConfig,
    RecordTransport,
    ReplayTransport,
)
from .outparse import CodeRecord, ThemeRecord
from .pipeline import compare, load_artifact, run_analysis, six_step_coverage
from .promptkit import PromptLibrary, StudyFocus
from .report import CoderMergeStats, build_report, write_report_bundle
from .trace import DEFAULT_THRESHOLD, verify_codebook

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PARTIAL = 2
EXIT_TRACE_FAILURES = 3

DEFAULT_FIXTURE_NAME = "session.json"

_MODEL_KEYS = ("model_id", "temperature", "max_tokens", "endpoint_url",
               "timeout", "max_attempts", "backoff_base", "parallelism")


@dataclass
class RunConfig:
    """Merged run configuration from defaults, config file, and flags."""

    input: str | None = None
    format: str = "auto"
    page_size: int = 10
    focus_description: str | None = None
    research_question: str | None = None
    model: dict = field(default_factory=dict)
    transport: str | None = None
    fixture: str | None = None
    output_dir: str = "thematica_out"
    matcher: str = EXACT_NORMALIZED
    alias_map: str | None = None
    jaccard_threshold: float = 0.6
    trace_threshold: float = DEFAULT_THRESHOLD
    template_dir: str | None = None
    verbose: bool = False

    @classmethod
    def from_sources(cls, file_data: dict | None, overrides: dict) -> "RunConfig":
        config = cls()
        known = {f.name for f in fields(cls)}
        for source in (file_data or {}), overrides:
            for key, value in source.items():
                if value is None:
                    continue
                if key == "model":
                    if not isinstance(value, dict):
                        raise ConfigError("config key 'model' must be an object")
                    unknown = set(value) - set(_MODEL_KEYS)
                    if unknown:
                        raise ConfigError(f"unknown model option(s): {', '.join(sorted(unknown))}")
                    config.model.update(value)
                elif key in known:
                    setattr(config, key, value)
                else:
                    raise ConfigError(f"unknown config key {key!r}")
        return config

    def model_config(self) -> ModelConfig:
        return ModelConfig(**self.model)

    def focus(self) -> StudyFocus:
        if not self.focus_description:
            raise ConfigError("focus_description is required (--focus or config file)")
        if not self.research_question:
            raise ConfigError("research_question is required (--research-question or config file)")
        return StudyFocus(focus_description=self.focus_description,
                          research_question=self.research_question)


def _load_config_file(path: str | None) -> dict | None:
    if path is None:
        return None
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except ValueError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must contain a JSON object")
    return data


def _resolve_transport(config: RunConfig):
    mode = config.transport
    if mode is None:
        candidate = Path(config.fixture) if config.fixture else Path(config.output_dir) / DEFAULT_FIXTURE_NAME
        if candidate.exists():
            logger.info("replaying fixture %s", candidate)
            return ReplayTransport(candidate)
        raise ConfigError(
            "no transport selected: pass --replay FIXTURE, --record FIXTURE, or --live "
            f"(a fixture named {DEFAULT_FIXTURE_NAME} in the output directory is replayed automatically)"
        )
    if mode == "replay":
        if not config.fixture:
            raise ConfigError("replay transport requires a fixture path (--replay FIXTURE)")
        return ReplayTransport(config.fixture)
    if mode == "record":
        if not config.fixture:
            raise ConfigError("record transport requires a fixture path (--record FIXTURE)")
        return RecordTransport(config.fixture)
    if mode == "live":
        if not (os.environ.get(ENV_VAR) or os.environ.get(FALLBACK_ENV_VAR)):
            raise ConfigError(f"live transport requires a credential: set {ENV_VAR} "
                              f"(or {FALLBACK_ENV_VAR})")
        return LiveTransport()
    raise ConfigError(f"unknown transport mode {mode!r}")


def _build_matcher(config: RunConfig) -> Matcher:
    if config.matcher not in MATCHER_MODES:
        raise ConfigError(f"unknown matcher mode {config.matcher!r}; "
                          f"choose from {', '.join(MATCHER_MODES)}")
    alias = None
    if config.matcher == ALIAS_MAP:
        if not config.alias_map:
            raise ConfigError("matcher alias_map requires --alias-map PATH")
        alias = load_alias_map(config.alias_map)
    return Matcher(mode=config.matcher, alias_map=alias,
                   jaccard_threshold=config.jaccard_threshold)


def _load_paper_reference(path: str | None) -> dict | None:
    if not path:
        return None
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read reference values from {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"reference file {path} must contain a JSON object")
    return data


def cmd_analyze(config: RunConfig, paper_reference: str | None = None) -> int:
    if not config.input:
        raise ConfigError("an input document is required (--input PATH)")
    corpus = load_corpus(config.input, page_size=config.page_size, format=config.format)
    focus = config.focus()
    model = config.model_config()
    transport = _resolve_transport(config)
    library = PromptLibrary(config.template_dir) if config.template_dir else None
    output_dir = Path(config.output_dir)

    try:
        artifact = run_analysis(corpus, focus, model, transport,
                                output_dir=output_dir, library=library,
                                trace_threshold=config.trace_threshold)
    except AnalysisInterrupted as exc:
        where = f" at page {exc.page}" if exc.page else ""
        print(f"analysis interrupted during {exc.stage}{where}: {exc.cause}", file=sys.stderr)
        if exc.artifact is not None and exc.artifact.path is not None:
            print(f"partial artifact retained at {exc.artifact.path}; rerun to resume",
                  file=sys.stderr)
        if isinstance(exc.cause, AuthError):
            return EXIT_ERROR
        return EXIT_PARTIAL

    coverages = six_step_coverage(artifact)
    bundle = build_report(artifact, coverages=coverages,
                          paper_reference=_load_paper_reference(paper_reference))
    paths = write_report_bundle(bundle, output_dir)
    book = artifact.llm_codebook
    print(f"analysis complete: {len(book.codes)} codes, "
          f"{len(book.emerging_labels or ())} emerging labels, {len(book.themes)} themes")
    print(f"artifact: {artifact.path}")
    for path in paths:
        print(f"wrote {path}")
    return EXIT_OK


def _theme_pseudo_codebook(codebook: Codebook) -> Codebook | None:
    if not codebook.themes:
        return None
    records = tuple(
        CodeRecord(label=theme.name, quote="", page=None, provenance=codebook.provenance)
        for theme in codebook.themes
    )
    return Codebook(coder_id=f"{codebook.coder_id}-themes",
                    provenance=codebook.provenance, codes=records)


def _consensus_codebook(first: Codebook, second: Codebook, matcher: Matcher) -> tuple[
        Codebook, CoderMergeStats]:
    """Merge two human codebooks and derive the consensus (similar-codes) book."""
    match = match_codes(first, second, matcher)
    merged, merge_count = merge_codebooks(first, second, match)
    paired = {label_a for label_a, _ in match.pairs}
    consensus_codes = tuple(record for record in merged.codes if record.label in paired)

    similar_themes = 0
    overlap_a = overlap_b = None
    consensus_themes: tuple[ThemeRecord, ...] = ()
    themes_a = _theme_pseudo_codebook(first)
    themes_b = _theme_pseudo_codebook(second)
    if themes_a and themes_b:
        theme_match = match_codes(themes_a, themes_b, matcher)
        similar_themes = len(theme_match.pairs)
        paired_names = {name for name, _ in theme_match.pairs}
        consensus_themes = tuple(t for t in first.themes if t.name in paired_names)
        overlap_a = overlap_percentage(similar_themes, len(first.themes))
        overlap_b = overlap_percentage(similar_themes, len(second.themes))

    consensus = Codebook(coder_id="human-average", provenance="human-merged",
                         codes=consensus_codes, themes=consensus_themes)
    stats = CoderMergeStats(
        coder_a_id=first.coder_id, coder_a_codes=len(first.codes),
        coder_b_id=second.coder_id, coder_b_codes=len(second.codes),
        similar_codes=len(match.pairs), merged_codes=merge_count,
        coder_a_themes=len(first.themes), coder_b_themes=len(second.themes),
        similar_themes=similar_themes,
        coder_a_theme_overlap_pct=overlap_a, coder_b_theme_overlap_pct=overlap_b,
        merged_theme_count=len(first.themes) + len(second.themes) - similar_themes,
    )
    return consensus, stats


def cmd_compare(config: RunConfig, artifact_path: str | None, human_paths: list[str],
                interpretation_paths: list[str] | None = None,
                paper_reference: str | None = None) -> int:
    if not human_paths:
        raise ConfigError("at least one human codebook CSV is required (--human PATH)")
    path = Path(artifact_path) if artifact_path else Path(config.output_dir) / "analysis.json"
    if not path.exists():
        raise ConfigError(f"artifact not found: {path} (run analyze first)")
    artifact = load_artifact(path)
    if not artifact.complete:
        raise IncompleteArtifact(f"artifact {path} is partial; finish the analysis first")

    sidecars = list(interpretation_paths or [])
    sidecars.extend([None] * (len(human_paths) - len(sidecars)))
    books = [load_human_codebook(csv_path, sidecar)
             for csv_path, sidecar in zip(human_paths, sidecars)]
    matcher = _build_matcher(config)

    if len(books) >= 2:
        if len(books) > 2:
            raise ConfigError("compare supports at most two human codebooks")
        human, stats = _consensus_codebook(books[0], books[1], matcher)
    else:
        human, stats = books[0], None

    bundle = compare(artifact, human, matcher)
    coverages = six_step_coverage(artifact, human=human)
    report = build_report(artifact, bundle=bundle, coverages=coverages,
                          human_tables=stats,
                          paper_reference=_load_paper_reference(paper_reference))
    paths = write_report_bundle(report, config.output_dir)
    summary = bundle.code_summary
    print(f"compared {summary.count_a} human codes with {summary.count_b} model codes: "
          f"difference {summary.percentage_difference:.2f}%, "
          f"similarity {summary.percentage_similarity:.2f}%")
    if stats is not None:
        print(f"merged codebook: {stats.merged_codes} codes "
              f"({stats.similar_codes} similar counted once)")
    for note in report.inconsistency_notes:
        print(f"note: {note}")
    for out_path in paths:
        print(f"wrote {out_path}")
    return EXIT_OK


def cmd_verify(config: RunConfig, artifact_path: str | None, input_path: str | None) -> int:
    path = Path(artifact_path) if artifact_path else Path(config.output_dir) / "analysis.json"
    if not path.exists():
        raise ConfigError(f"artifact not found: {path}")
    artifact = load_artifact(path)
    if not artifact.complete or artifact.llm_codebook is None:
        raise IncompleteArtifact(f"artifact {path} is partial; cannot verify")
    source = input_path or config.input or artifact.corpus_fingerprint.get("source_path")
    if not source:
        raise ConfigError("a corpus path is required (--input PATH)")
    corpus = load_corpus(source, page_size=artifact.corpus_fingerprint.get("page_size", 10),
                         format=config.format)
    fresh_hash = content_hash(corpus)
    recorded = artifact.corpus_fingerprint.get("content_hash")
    if fresh_hash != recorded:
        raise ConfigError(
            f"corpus hash {fresh_hash} does not match the artifact's {recorded}"
        )
    threshold = artifact.trace.threshold if artifact.trace else config.trace_threshold
    trace = verify_codebook(artifact.llm_codebook, corpus, threshold)
    counts = trace.counts
    print("trace summary: " + ", ".join(f"{level} {counts[level]}" for level in counts))
    print(f"verified share: {trace.verified_share:.2f}%")
    if trace.failures:
        for result in trace.failures:
            notes = f" ({'; '.join(result.notes)})" if result.notes else ""
            print(f"FAILED: {result.record.label!r} page {result.record.page}{notes}")
        return EXIT_TRACE_FAILURES
    return EXIT_OK


def cmd_report(config: RunConfig, artifact_path: str | None,
               paper_reference: str | None = None) -> int:
    path = Path(artifact_path) if artifact_path else Path(config.output_dir) / "analysis.json"
    if not path.exists():
        raise ConfigError(f"artifact not found: {path}")
    artifact = load_artifact(path)
    if not artifact.complete:
        raise IncompleteArtifact(f"artifact {path} is partial; finish the analysis first")
    coverages = six_step_coverage(artifact)
    bundle = build_report(artifact, coverages=coverages,
                          paper_reference=_load_paper_reference(paper_reference))
    paths = write_report_bundle(bundle, config.output_dir)
    for out_path in paths:
        print(f"wrote {out_path}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thematica",
        description="Stepwise thematic analysis of interview transcripts with "
                    "quote traceability and codebook agreement statistics.",
    )
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--output-dir", help="directory for artifacts and reports")
    parser.add_argument("--verbose", action="store_true", help="enable info logging")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="run the full analysis over a transcript")
    analyze.add_argument("--input", help="transcript file (.docx or plain text)")
    analyze.add_argument("--format", choices=["auto", "plain_text", "ooxml_docx"])
    analyze.add_argument("--page-size", type=int, dest="page_size",
                         help="paragraphs per page (default 10)")
    analyze.add_argument("--focus", dest="focus_description",
                         help="what the coding should focus on")
    analyze.add_argument("--research-question", dest="research_question")
    analyze.add_argument("--model-id")
    analyze.add_argument("--temperature", type=float)
    analyze.add_argument("--max-tokens", type=int)
    analyze.add_argument("--endpoint-url")
    analyze.add_argument("--timeout", type=float)
    analyze.add_argument("--parallelism", type=int)
    analyze.add_argument("--trace-threshold", type=float, dest="trace_threshold")
    analyze.add_argument("--template-dir", dest="template_dir")
    analyze.add_argument("--paper-reference", dest="paper_reference",
                         help="JSON file of expected values for discrepancy footnotes")
    transport = analyze.add_mutually_exclusive_group()
    transport.add_argument("--replay", metavar="FIXTURE", help="replay a recorded session")
    transport.add_argument("--record", metavar="FIXTURE", help="record a live session")
    transport.add_argument("--live", action="store_true", help="send live requests")

    compare_p = sub.add_parser("compare", help="compare the artifact against human codebooks")
    compare_p.add_argument("--artifact")
    compare_p.add_argument("--human", action="append", default=[],
                           help="human codebook CSV (repeat for two coders)")
    compare_p.add_argument("--interpretations", action="append", default=[],
                           help="interpretation sidecar for the matching --human (positional)")
    compare_p.add_argument("--matcher", choices=list(MATCHER_MODES))
    compare_p.add_argument("--alias-map", dest="alias_map")
    compare_p.add_argument("--jaccard-threshold", type=float, dest="jaccard_threshold")
    compare_p.add_argument("--paper-reference", dest="paper_reference")

    verify = sub.add_parser("verify", help="re-check quote traceability of an artifact")
    verify.add_argument("--artifact")
    verify.add_argument("--input", help="the corpus the artifact was built from")
    verify.add_argument("--format", choices=["auto", "plain_text", "ooxml_docx"])

    report = sub.add_parser("report", help="regenerate reports from an artifact")
    report.add_argument("--artifact")
    report.add_argument("--paper-reference", dest="paper_reference")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    try:
        file_data = _load_config_file(args.config)
        overrides: dict = {"verbose": args.verbose or None,
                           "output_dir": args.output_dir}
        for key in ("input", "format", "page_size", "focus_description",
                    "research_question", "trace_threshold", "template_dir",
                    "matcher", "alias_map", "jaccard_threshold"):
            if hasattr(args, key):
                overrides[key] = getattr(args, key)
        model_overrides = {
            key: getattr(args, key)
            for key in _MODEL_KEYS
            if hasattr(args, key) and getattr(args, key) is not None
        }
        if model_overrides:
            overrides["model"] = model_overrides
        if getattr(args, "replay", None):
            overrides["transport"] = "replay"
            overrides["fixture"] = args.replay
        elif getattr(args, "record", None):
            overrides["transport"] = "record"
            overrides["fixture"] = args.record
        elif getattr(args, "live", False):
            overrides["transport"] = "live"
        config = RunConfig.from_sources(file_data, overrides)

        if args.command == "analyze":
            return cmd_analyze(config, paper_reference=getattr(args, "paper_reference", None))
        if args.command == "compare":
            return cmd_compare(config, args.artifact, args.human,
                               interpretation_paths=args.interpretations or None,
                               paper_reference=args.paper_reference)
        if args.command == "verify":
            return cmd_verify(config, args.artifact, args.input)
        if args.command == "report":
            return cmd_report(config, args.artifact, paper_reference=args.paper_reference)
        parser.error(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename or exc}", file=sys.stderr)
        return EXIT_ERROR
    except ThematicaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_ERROR


def entry_point() -> None:
    sys.exit(main())
