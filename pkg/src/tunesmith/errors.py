"""Exception hierarchy shared across the package.

Every error raised by tunesmith derives from :class:`TunesmithError` so that
callers (CLI, HTTP service) can map failures to exit codes / status codes in
one place.
"""

from __future__ import annotations


class TunesmithError(Exception):
    """Base class for all tunesmith errors."""


# --- abc parsing -----------------------------------------------------------


class ParseError(TunesmithError):
    """The source text could not be parsed as an abc tune."""


class EmptyInput(ParseError):
    """Parse was handed empty or whitespace-only text."""


class NoMusicContent(ParseError):
    """No K: header field and no recognizable note tokens were found."""


# --- corpus ----------------------------------------------------------------


class CorpusError(TunesmithError):
    """Base class for corpus ingestion / persistence errors."""


class MalformedRecord(CorpusError):
    """A dump record is missing its abc body (record is skipped)."""


class DuplicateId(CorpusError):
    """Two dump records carry the same id; ingestion aborts."""


class VersionMismatch(CorpusError):
    """A persisted index file carries an unsupported format version."""


class CorruptFile(CorpusError):
    """A persisted index file failed its magic/checksum/shape checks."""


# --- LLM client ------------------------------------------------------------


class LlmError(TunesmithError):
    """Base class for chat-completion backend failures."""


class LlmTimeout(LlmError):
    """The backend did not answer within the configured timeout."""


class TransportError(LlmError):
    """The request never produced an HTTP response (DNS, connection, ...)."""


class ApiError(LlmError):
    """The backend answered with an HTTP error status."""

    def __init__(self, status: int, body_excerpt: str):
        super().__init__(f"backend returned HTTP {status}: {body_excerpt}")
        self.status = status
        self.body_excerpt = body_excerpt


class MalformedResponse(LlmError):
    """The reply JSON lacks the assistant message content."""


class ScriptExhausted(LlmError):
    """A scripted mock backend ran out of replies."""


# --- dialogue / service ----------------------------------------------------


class DialogueError(TunesmithError):
    """Base class for dialogue orchestration errors."""


class MissingTemplate(DialogueError):
    """A prompt template file is missing or contains unresolved placeholders."""


class TurnInFlight(DialogueError):
    """A second turn was started on a session whose turn is still running."""


class MaxTurnsExceeded(DialogueError):
    """The session reached its configured turn limit."""


class ConfigError(TunesmithError):
    """The application configuration file is invalid or incomplete."""
