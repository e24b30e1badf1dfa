"""Conversation engine: tag the request, retrieve examples, prompt the
composer model, validate what comes back.

A turn is atomic with respect to the session transcript: nothing is
appended until the turn has fully succeeded or been surfaced as a
no-tune result, so a transport failure can simply be retried.
"""

from __future__ import annotations

import re
import threading
import time
import uuid
from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping

from .corpus import CorpusIndex, contains_duplicate
from .errors import MaxTurnsExceeded, MissingTemplate, ParseError, TurnInFlight
from .llm import ChatBackend, ChatMessage, ModelConfig
from .notation import Tune, ValidationIssue, parse_tune, validate
from .retrieval import (
    RankedCandidate,
    RetrievalConfig,
    extract_tags,
    rank,
)

__all__ = [
    "DEFAULT_MAX_TURNS",
    "Session",
    "TurnResult",
    "DialogueEngine",
    "render_template",
    "load_template",
    "parse_composer_output",
    "export_transcript",
]

DEFAULT_MAX_TURNS = 50

_PLACEHOLDER = re.compile(r"\{([A-Za-z_][A-Za-z0-9_]*)\}")
_FENCE = re.compile(r"```[^\n`]*\n(.*?)```", re.DOTALL)
_HEADER_LINE = re.compile(r"^\s*[XTMK]:", re.MULTILINE)

# Sent once, verbatim, when a composer reply contains no usable tune.
_REPROMPT = (
    "Your previous reply did not contain a valid tune in abc notation. "
    "Reply again with the complete tune in a fenced code block, starting "
    "with an X: line and including M:, L: and K: header lines."
)


def load_template(name: str) -> str:
    """Read a prompt template shipped with the package (no extension)."""
    ref = resources.files("tunesmith.templates").joinpath(f"{name}.txt")
    try:
        return ref.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise MissingTemplate(f"no template named {name!r}") from None


def render_template(template: str, values: Mapping[str, str]) -> str:
    """Substitute ``{name}`` placeholders; any placeholder without a value
    raises MissingTemplate rather than leaking braces into a prompt."""

    def repl(match: re.Match[str]) -> str:
        key = match.group(1)
        if key not in values:
            raise MissingTemplate(f"template placeholder {{{key}}} has no value")
        return str(values[key])

    return _PLACEHOLDER.sub(repl, template)


def _is_tune_line(line: str) -> bool:
    stripped = line.strip()
    if not stripped:
        return False
    if re.match(r"^[A-Za-z]:", stripped):
        return True
    return "|" in stripped


def parse_composer_output(text: str) -> tuple[str, str | None]:
    """Split a composer reply into (commentary, tune text or None).

    The first fenced code block containing an abc header line wins; failing
    that, the span from the first bare header line (X:/T:/M:/K:) through the
    last line that still looks like tune content is taken. Replies with
    neither yield (whole text, None).
    """
    for match in _FENCE.finditer(text):
        block = match.group(1).strip()
        if _HEADER_LINE.search(block):
            around = (text[: match.start()].strip(), text[match.end() :].strip())
            commentary = "\n".join(part for part in around if part)
            return commentary, block
    header = _HEADER_LINE.search(text)
    if header:
        commentary = text[: header.start()].strip()
        lines = text[header.start() :].splitlines()
        last = max(i for i, line in enumerate(lines) if _is_tune_line(line))
        return commentary, "\n".join(lines[: last + 1]).strip()
    return text.strip(), None


@dataclass(frozen=True)
class TurnResult:
    """Everything one request produced, in the order it was produced."""

    request: str
    tags: frozenset[str]
    raw_tag_reply: str
    candidates: tuple[RankedCandidate, ...]
    commentary: str
    tune: Tune | None
    tune_text: str | None
    raw_reply: str
    issues: tuple[ValidationIssue, ...]
    duplicate_of: str | None
    reprompted: bool


@dataclass
class Session:
    id: str
    transcript: list[ChatMessage]
    results: list[TurnResult] = field(default_factory=list)
    max_turns: int = DEFAULT_MAX_TURNS
    created_at: float = field(default_factory=time.time)
    config_snapshot: Mapping[str, str] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @property
    def turn_count(self) -> int:
        return len(self.results)


def export_transcript(session: Session) -> str:
    """Transcript as role-labelled text blocks, for audit."""
    blocks = [f"[{m.role}]\n{m.content}" for m in session.transcript]
    return "\n\n".join(blocks) + "\n"


class DialogueEngine:
    """Binds a corpus index, two model roles and the prompt templates."""

    def __init__(
        self,
        index: CorpusIndex,
        retrieval_backend: ChatBackend,
        composer_backend: ChatBackend,
        retrieval_model: ModelConfig,
        composer_model: ModelConfig,
        retrieval_cfg: RetrievalConfig = RetrievalConfig(),
        max_turns: int = DEFAULT_MAX_TURNS,
        templates: Mapping[str, str] | None = None,
    ) -> None:
        if max_turns < 1:
            raise ValueError("max_turns must be >= 1")
        self.index = index
        self.retrieval_backend = retrieval_backend
        self.composer_backend = composer_backend
        self.retrieval_model = retrieval_model
        self.composer_model = composer_model
        self.retrieval_cfg = retrieval_cfg
        self.max_turns = max_turns
        overrides = dict(templates or {})
        self.templates = {
            name: overrides.get(name, load_template(name))
            for name in ("composer_system", "turn", "retrieval_system")
        }

    def new_session(self) -> Session:
        system = ChatMessage("system", self.templates["composer_system"])
        snapshot = {
            "k": str(self.retrieval_cfg.k),
            "retrieval_model": self.retrieval_model.model,
            "composer_model": self.composer_model.model,
        }
        return Session(
            id=uuid.uuid4().hex,
            transcript=[system],
            max_turns=self.max_turns,
            config_snapshot=snapshot,
        )

    def build_prompt(self, request: str, candidates: tuple[RankedCandidate, ...]) -> str:
        """Render the per-turn user message: each retrieved tune with its
        tags line, in rank order, then the request. With no candidates the
        message is the request alone (zero-shot fallback)."""
        if not candidates:
            return request
        examples = "\n\n".join(
            f"Tags: {', '.join(sorted(self.index.entries[c.entry_id].tags))}\n"
            + self.index.entries[c.entry_id].abc.strip()
            for c in candidates
        )
        return render_template(
            self.templates["turn"], {"examples": examples, "request": request}
        )

    def handle_request(self, session: Session, request: str) -> TurnResult:
        """Run one full turn. LlmErrors propagate with the session intact;
        a composer reply without a usable tune is reprompted once and then
        surfaced as a result with ``tune=None``, never as an exception.
        """
        if not request or not request.strip():
            raise ValueError("request must be non-empty")
        if not session._lock.acquire(blocking=False):
            raise TurnInFlight(f"session {session.id} already has a turn in flight")
        try:
            if session.turn_count >= session.max_turns:
                raise MaxTurnsExceeded(
                    f"session {session.id} reached its limit of "
                    f"{session.max_turns} turns"
                )
            extraction = extract_tags(
                request,
                self.index.vocabulary_by_family,
                self.retrieval_backend,
                self.retrieval_model,
                self.templates["retrieval_system"],
            )
            candidates = tuple(rank(extraction.tags, self.index, self.retrieval_cfg))
            user = ChatMessage("user", self.build_prompt(request, candidates))

            reply = self.composer_backend.complete(
                session.transcript + [user], self.composer_model
            )
            commentary, tune_text = parse_composer_output(reply.content)
            tune = self._try_parse(tune_text)
            reprompted = False
            if tune is None:
                # One corrective retry; the failed reply stays visible to the
                # model during the retry but is not recorded in the session.
                reprompted = True
                reply = self.composer_backend.complete(
                    session.transcript + [user, reply, ChatMessage("user", _REPROMPT)],
                    self.composer_model,
                )
                commentary, tune_text = parse_composer_output(reply.content)
                tune = self._try_parse(tune_text)
                if tune is None:
                    commentary = reply.content.strip()

            issues: tuple[ValidationIssue, ...] = ()
            duplicate_of = None
            if tune is not None:
                issues = tuple(validate(tune))
                duplicate_of = contains_duplicate(self.index, tune)

            result = TurnResult(
                request=request,
                tags=extraction.tags,
                raw_tag_reply=extraction.raw_reply,
                candidates=candidates,
                commentary=commentary,
                tune=tune,
                tune_text=tune_text,
                raw_reply=reply.content,
                issues=issues,
                duplicate_of=duplicate_of,
                reprompted=reprompted,
            )
            session.transcript.extend([user, reply])
            session.results.append(result)
            return result
        finally:
            session._lock.release()

    @staticmethod
    def _try_parse(tune_text: str | None) -> Tune | None:
        if tune_text is None:
            return None
        try:
            return parse_tune(tune_text)
        except ParseError:
            return None
