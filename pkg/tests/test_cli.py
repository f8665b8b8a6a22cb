"""Command-line behavior: exit codes, output lines, and config precedence."""

from __future__ import annotations

import json
import os
import shutil
from pathlib import Path

import pytest

import thematica
from thematica.cli import main

SAMPLES = Path(thematica.__file__).parent / "samples"


@pytest.fixture(scope="module")
def analyzed_workspace(tmp_path_factory) -> Path:
    workspace = tmp_path_factory.mktemp("cli") / "samples"
    shutil.copytree(SAMPLES, workspace)
    previous = os.getcwd()
    os.chdir(workspace)
    try:
        assert main(["--config", "run_config.json", "analyze"]) == 0
    finally:
        os.chdir(previous)
    return workspace


def copy_workspace(source: Path, destination: Path) -> Path:
    shutil.copytree(source, destination)
    return destination


def test_analyze_reports_counts_and_writes_outputs(
        sample_workspace: Path, monkeypatch: pytest.MonkeyPatch, capsys) -> None:
    monkeypatch.chdir(sample_workspace)
    assert main(["--config", "run_config.json", "analyze"]) == 0
    out = capsys.readouterr().out
    assert "analysis complete: 59 codes, 15 emerging labels, 4 themes" in out
    assert (sample_workspace / "out" / "analysis.json").exists()
    assert (sample_workspace / "out" / "report.md").exists()
    assert (sample_workspace / "out" / "codes.csv").exists()


def test_second_analyze_resumes_completed_artifact(
        analyzed_workspace: Path, monkeypatch: pytest.MonkeyPatch, capsys) -> None:
    monkeypatch.chdir(analyzed_workspace)
    assert main(["--config", "run_config.json", "analyze"]) == 0
    assert "analysis complete: 59 codes" in capsys.readouterr().out


def test_live_transport_requires_credential(
        sample_workspace: Path, monkeypatch: pytest.MonkeyPatch, capsys) -> None:
    monkeypatch.chdir(sample_workspace)
    monkeypatch.delenv("THEMATICA_API_KEY", raising=False)
    monkeypatch.delenv("OPENAI_API_KEY", raising=False)
    assert main(["--config", "run_config.json", "analyze", "--live"]) == 1
    err = capsys.readouterr().err
    assert "configuration error" in err
    assert "THEMATICA_API_KEY" in err


def test_analyze_without_input_fails_cleanly(
        tmp_path: Path, monkeypatch: pytest.MonkeyPatch, capsys) -> None:
    monkeypatch.chdir(tmp_path)
    code = main(["analyze", "--focus", "f", "--research-question", "q",
                 "--replay", "missing.json"])
    assert code == 1
    assert "input document is required" in capsys.readouterr().err


def test_missing_input_file_is_a_clean_error(
        tmp_path: Path, monkeypatch: pytest.MonkeyPatch, capsys) -> None:
    monkeypatch.chdir(tmp_path)
    code = main(["analyze", "--input", "absent.txt", "--focus", "f",
                 "--research-question", "q", "--replay", "missing.json"])
    assert code == 1
    assert "file not found" in capsys.readouterr().err


def test_incomplete_fixture_exits_partial_and_retains_artifact(
        sample_workspace: Path, monkeypatch: pytest.MonkeyPatch, capsys) -> None:
    monkeypatch.chdir(sample_workspace)
    (sample_workspace / "broken.json").write_text("[]", encoding="utf-8")
    code = main(["--config", "run_config.json", "analyze", "--replay", "broken.json"])
    assert code == 2
    err = capsys.readouterr().err
    assert "analysis interrupted during code_extraction at page 1" in err
    assert "partial artifact retained" in err
    artifact = json.loads((sample_workspace / "out" / "analysis.json").read_text())
    assert artifact["status"] == "partial"


def test_compare_requires_a_human_codebook(
        analyzed_workspace: Path, monkeypatch: pytest.MonkeyPatch, capsys) -> None:
    monkeypatch.chdir(analyzed_workspace)
    assert main(["--config", "run_config.json", "compare"]) == 1
    assert "human codebook" in capsys.readouterr().err


def test_alias_matcher_requires_map_path(
        analyzed_workspace: Path, monkeypatch: pytest.MonkeyPatch, capsys) -> None:
    monkeypatch.chdir(analyzed_workspace)
    code = main(["compare", "--artifact", "out/analysis.json",
                 "--human", "coder1.csv", "--matcher", "alias_map"])
    assert code == 1
    assert "--alias-map" in capsys.readouterr().err


def test_compare_two_coders_prints_agreement_summary(
        analyzed_workspace: Path, monkeypatch: pytest.MonkeyPatch, capsys) -> None:
    monkeypatch.chdir(analyzed_workspace)
    code = main(["--config", "run_config.json", "compare",
                 "--human", "coder1.csv", "--human", "coder2.csv",
                 "--paper-reference", "paper_reference.json"])
    assert code == 0
    out = capsys.readouterr().out
    assert ("compared 67 human codes with 59 model codes: "
            "difference 11.94%, similarity 88.06%") in out
    assert "merged codebook: 104 codes (67 similar counted once)" in out
    assert "note: table1.merged_codes: computed 104 differs from the reference value 106" in out
    assert (analyzed_workspace / "out" / "matrix.csv").exists()
    assert (analyzed_workspace / "out" / "summary.csv").exists()


def test_compare_rejects_more_than_two_coders(
        analyzed_workspace: Path, monkeypatch: pytest.MonkeyPatch, capsys) -> None:
    monkeypatch.chdir(analyzed_workspace)
    code = main(["--config", "run_config.json", "compare",
                 "--human", "coder1.csv", "--human", "coder2.csv",
                 "--human", "coder1.csv"])
    assert code == 1
    assert "at most two" in capsys.readouterr().err


def test_verify_passes_on_intact_artifact(
        analyzed_workspace: Path, monkeypatch: pytest.MonkeyPatch, capsys) -> None:
    monkeypatch.chdir(analyzed_workspace)
    assert main(["--config", "run_config.json", "verify"]) == 0
    out = capsys.readouterr().out
    assert "Exact 59" in out
    assert "verified share: 100.00%" in out


def test_verify_flags_tampered_quote(
        analyzed_workspace: Path, tmp_path: Path,
        monkeypatch: pytest.MonkeyPatch, capsys) -> None:
    workspace = copy_workspace(analyzed_workspace, tmp_path / "tampered")
    artifact_path = workspace / "out" / "analysis.json"
    data = json.loads(artifact_path.read_text(encoding="utf-8"))
    data["llm_codebook"]["codes"][0]["quote"] = "this quote was never in the interview at all"
    artifact_path.write_text(json.dumps(data), encoding="utf-8")
    monkeypatch.chdir(workspace)
    assert main(["--config", "run_config.json", "verify"]) == 3
    out = capsys.readouterr().out
    assert "Failed 1" in out
    assert "FAILED:" in out


def test_verify_rejects_a_different_corpus(
        analyzed_workspace: Path, tmp_path: Path,
        monkeypatch: pytest.MonkeyPatch, capsys) -> None:
    workspace = copy_workspace(analyzed_workspace, tmp_path / "drifted")
    transcript = workspace / "transcript.txt"
    transcript.write_text(transcript.read_text(encoding="utf-8") + "\nAn extra paragraph.\n",
                          encoding="utf-8")
    monkeypatch.chdir(workspace)
    assert main(["--config", "run_config.json", "verify"]) == 1
    assert "does not match" in capsys.readouterr().err


def test_report_requires_an_artifact(
        tmp_path: Path, monkeypatch: pytest.MonkeyPatch, capsys) -> None:
    monkeypatch.chdir(tmp_path)
    assert main(["report"]) == 1
    assert "artifact not found" in capsys.readouterr().err


def test_report_regenerates_from_artifact(
        analyzed_workspace: Path, monkeypatch: pytest.MonkeyPatch, capsys) -> None:
    monkeypatch.chdir(analyzed_workspace)
    (analyzed_workspace / "out" / "report.md").unlink()
    assert main(["--config", "run_config.json", "report"]) == 0
    assert (analyzed_workspace / "out" / "report.md").exists()


def test_output_dir_flag_overrides_config_value(
        sample_workspace: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.chdir(sample_workspace)
    code = main(["--config", "run_config.json", "--output-dir", "elsewhere", "analyze"])
    assert code == 0
    assert (sample_workspace / "elsewhere" / "analysis.json").exists()
    assert not (sample_workspace / "out").exists()


def test_unknown_config_key_is_a_configuration_error(
        tmp_path: Path, monkeypatch: pytest.MonkeyPatch, capsys) -> None:
    monkeypatch.chdir(tmp_path)
    (tmp_path / "config.json").write_text('{"page_sise": 10}', encoding="utf-8")
    assert main(["--config", "config.json", "analyze"]) == 1
    err = capsys.readouterr().err
    assert "configuration error" in err
    assert "page_sise" in err


def test_config_file_errors_are_reported(
        tmp_path: Path, monkeypatch: pytest.MonkeyPatch, capsys) -> None:
    monkeypatch.chdir(tmp_path)
    assert main(["--config", "absent.json", "analyze"]) == 1
    assert "config file not found" in capsys.readouterr().err
    (tmp_path / "list.json").write_text("[1, 2]", encoding="utf-8")
    assert main(["--config", "list.json", "analyze"]) == 1
    assert "must contain a JSON object" in capsys.readouterr().err


def test_transport_flags_are_mutually_exclusive(sample_workspace: Path,
                                                monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.chdir(sample_workspace)
    with pytest.raises(SystemExit):
        main(["--config", "run_config.json", "analyze",
              "--replay", "session.json", "--live"])


def test_unknown_model_option_is_rejected(
        tmp_path: Path, monkeypatch: pytest.MonkeyPatch, capsys) -> None:
    monkeypatch.chdir(tmp_path)
    (tmp_path / "config.json").write_text(
        '{"model": {"model_id": "gpt-4-turbo", "penalty": 2}}', encoding="utf-8")
    assert main(["--config", "config.json", "analyze"]) == 1
    assert "unknown model option" in capsys.readouterr().err
