"""Command line behaviour: subcommands, printed output, exit codes
(0 success, 1 usage, 2 runtime)."""

from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from tunesmith import save_index
from tunesmith.cli import cli, main

from conftest import COMPOSER_REPLY, DATA_DIR


@pytest.fixture
def index_file(fixture_index, tmp_path):
    path = tmp_path / "index.json"
    save_index(fixture_index, path)
    return path


class TestIngest:
    def test_builds_index_and_reports(self, tmp_path, capsys):
        out_path = tmp_path / "index.json"
        code = main(
            [
                "ingest",
                str(DATA_DIR / "tunes.jsonl"),
                "--mapping",
                str(DATA_DIR / "mapping.json"),
                "--out",
                str(out_path),
            ]
        )
        captured = capsys.readouterr()
        assert code == 0
        assert "loaded=3 flagged=0 skipped=0" in captured.out
        assert out_path.exists()
        document = json.loads(out_path.read_text(encoding="utf-8"))
        assert len(document["payload"]["entries"]) == 3

    def test_missing_dump_is_usage_error(self, tmp_path, capsys):
        code = main(
            [
                "ingest",
                str(tmp_path / "ghost.jsonl"),
                "--mapping",
                str(DATA_DIR / "mapping.json"),
                "--out",
                str(tmp_path / "x.json"),
            ]
        )
        assert code == 1

    def test_corrupt_dump_is_runtime_error(self, tmp_path, capsys):
        dump = tmp_path / "bad.jsonl"
        dump.write_text("not json\n", encoding="utf-8")
        code = main(
            [
                "ingest",
                str(dump),
                "--mapping",
                str(DATA_DIR / "mapping.json"),
                "--out",
                str(tmp_path / "x.json"),
            ]
        )
        assert code == 2
        assert "error" in capsys.readouterr().err


class TestValidate:
    def test_clean_file_exits_zero(self, capsys):
        code = main(["validate", str(DATA_DIR / "ending_prompt.abc")])
        captured = capsys.readouterr()
        assert code == 0
        assert "no issues" in captured.out

    def test_warning_only_exits_zero(self, tmp_path, capsys):
        path = tmp_path / "warn.abc"
        path.write_text("X:1\nM:4/4\nL:1/8\nK:C\nC8|D4|E8|", encoding="utf-8")
        code = main(["validate", str(path)])
        captured = capsys.readouterr()
        assert code == 0
        assert "BAR_UNDERFULL" in captured.out

    def test_error_issue_exits_two(self, tmp_path, capsys):
        path = tmp_path / "bad.abc"
        path.write_text("X:1\nM:4/4\nL:1/8\nK:C\nC8 D8|", encoding="utf-8")
        code = main(["validate", str(path)])
        captured = capsys.readouterr()
        assert code == 2
        assert "BAR_OVERFULL" in captured.out

    def test_unparseable_exits_two(self, tmp_path, capsys):
        path = tmp_path / "empty.abc"
        path.write_text("   ", encoding="utf-8")
        code = main(["validate", str(path)])
        assert code == 2

    def test_missing_file_is_usage_error(self, tmp_path):
        assert main(["validate", str(tmp_path / "ghost.abc")]) == 1


class TestRetrieve:
    def test_ranked_output(self, index_file, capsys):
        code = main(
            ["retrieve", "--index", str(index_file), "--tags", "jig,reel,dorian"]
        )
        captured = capsys.readouterr()
        assert code == 0
        lines = captured.out.strip().splitlines()
        assert [line.split("\t")[0] for line in lines] == ["E1", "E3", "E2"]
        assert [line.split("\t")[1] for line in lines] == ["0.5", "0.25", "0.2"]

    def test_unknown_tag_empty_and_zero(self, index_file, capsys):
        code = main(["retrieve", "--index", str(index_file), "--tags", "nosuchtag"])
        captured = capsys.readouterr()
        assert code == 0
        assert captured.out.strip() == ""

    def test_k_limits_output(self, index_file, capsys):
        code = main(
            ["retrieve", "--index", str(index_file), "--tags", "jig", "--k", "1"]
        )
        captured = capsys.readouterr()
        assert code == 0
        assert len(captured.out.strip().splitlines()) == 1

    def test_missing_required_option_is_usage_error(self, index_file):
        assert main(["retrieve", "--index", str(index_file)]) == 1


class TestServe:
    def test_missing_template_file_exits_two(self, index_file, tmp_path, capsys):
        config = tmp_path / "config.yaml"
        config.write_text(
            f"index_path: {index_file}\n"
            "retrieval_model: {endpoint: http://llm.test/v1, model: small}\n"
            "composer_model: {endpoint: http://llm.test/v1, model: large}\n"
            "templates:\n"
            "  turn: ghost.txt\n",
            encoding="utf-8",
        )
        code = main(["serve", "--config", str(config)])
        captured = capsys.readouterr()
        assert code == 2
        assert "MissingTemplate" in captured.err

    def test_missing_config_is_usage_error(self, tmp_path):
        assert main(["serve", "--config", str(tmp_path / "ghost.yaml")]) == 1


class TestChat:
    def test_one_turn_session(self, index_file, tmp_path):
        composer_literal = json.dumps(COMPOSER_REPLY)
        config = tmp_path / "config.yaml"
        config.write_text(
            f"index_path: {index_file}\n"
            "retrieval_model: {endpoint: http://llm.test/v1, model: small}\n"
            "composer_model: {endpoint: http://llm.test/v1, model: large}\n"
            "backend:\n"
            "  kind: mock\n"
            "  replies:\n"
            '    - "{jig, reel, dorian}"\n'
            f"    - {composer_literal}\n",
            encoding="utf-8",
        )
        runner = CliRunner()
        result = runner.invoke(
            cli,
            ["chat", "--config", str(config)],
            input="Generate a piece of irish folk music\n\n",
        )
        assert result.exit_code == 0
        assert "This will be a lively Irish jig" in result.output
        assert "X:1" in result.output
        assert "The Dorian Jig" in result.output  # retrieved example title
        assert "duplicates corpus entry E1" in result.output
        assert "bye" in result.output


class TestUsage:
    def test_no_args_shows_usage(self):
        assert main([]) in (0, 1)  # click prints group help

    def test_unknown_subcommand(self):
        assert main(["frobnicate"]) == 1
