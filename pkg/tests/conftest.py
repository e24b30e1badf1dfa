"""Shared fixtures: the three-entry corpus, engine factories, and a
terminal-summary hook that prints one pass/fail line per acceptance test."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from tunesmith import DialogueEngine, MockBackend, ModelConfig, ingest
from tunesmith.corpus import CorpusIndex, FieldMapping
from tunesmith.retrieval import RetrievalConfig

DATA_DIR = Path(__file__).parent / "data"

# The dialogue fixture everything downstream reuses: a commentary sentence
# followed by a fenced, well-formed jig.
COMPOSER_REPLY = """This will be a lively Irish jig in D dorian, with a pickup into each part.
```abc
X:1
T:A Lively Jig
M:6/8
L:1/8
K:Ddor
|:A|dAF DAF|GAG Aag|dAF DAF|Ffe e2a|dAF DAF|GAG Aag|faf dBA|Bdf d2:|
```"""

POLKA_REPLY = """Converting the jig to a polka means moving to 2/4 and shortening the notes.
```abc
X:2
T:A Lively Polka
M:2/4
L:1/8
K:Ddor
|:A|dA FA|GA Ag|dA FA|Ff e2|dA FA|GA Ag|fa dB|df d2:|
```"""


def load_fixture_records() -> list[dict]:
    lines = (DATA_DIR / "tunes.jsonl").read_text(encoding="utf-8").splitlines()
    return [json.loads(line) for line in lines if line.strip()]


def load_fixture_mapping() -> FieldMapping:
    return FieldMapping.from_file(DATA_DIR / "mapping.json")


@pytest.fixture(scope="session")
def fixture_records() -> list[dict]:
    return load_fixture_records()


@pytest.fixture(scope="session")
def fixture_index() -> CorpusIndex:
    index, report = ingest(load_fixture_records(), load_fixture_mapping())
    assert report.loaded == 3 and report.flagged == 0 and report.skipped == 0
    return index


@pytest.fixture
def model_config() -> ModelConfig:
    return ModelConfig(endpoint="http://llm.test/v1", model="test-model")


def make_engine(
    index: CorpusIndex,
    retrieval_replies: list,
    composer_replies: list,
    k: int = 3,
    max_turns: int = 50,
) -> tuple[DialogueEngine, MockBackend, MockBackend]:
    """Engine with separate scripted backends so tests can count the calls
    each model role received."""
    retrieval = MockBackend(replies=retrieval_replies)
    composer = MockBackend(replies=composer_replies)
    cfg = ModelConfig(endpoint="http://llm.test/v1", model="test-model")
    engine = DialogueEngine(
        index=index,
        retrieval_backend=retrieval,
        composer_backend=composer,
        retrieval_model=cfg,
        composer_model=cfg,
        retrieval_cfg=RetrievalConfig(k=k),
        max_turns=max_turns,
    )
    return engine, retrieval, composer


# --- acceptance test reporting ------------------------------------------------

_ACCEPTANCE_RESULTS: list[tuple[str, str, bool]] = []


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::", 1)[1]
    _ACCEPTANCE_RESULTS.append((name, report.nodeid, report.passed))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, _, passed in _ACCEPTANCE_RESULTS:
        mark = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"{mark}  {name}")
