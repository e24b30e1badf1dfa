"""Retrieval-assisted composition of folk tunes in abc notation.

The package splits into small layers: ``notation`` (parse, validate,
normalize abc), ``corpus`` (tagged tune index), ``retrieval`` (tag
extraction + Jaccard ranking), ``llm`` (chat-completion client and its
mock), ``dialogue`` (the per-turn orchestration), and ``service``/``cli``
(HTTP and terminal front ends).
"""

from .corpus import (
    CorpusEntry,
    CorpusIndex,
    FieldMapping,
    IngestReport,
    contains_duplicate,
    ingest,
    load_index,
    read_dump,
    save_index,
)
from .dialogue import DialogueEngine, Session, TurnResult, export_transcript
from .errors import (
    ApiError,
    ConfigError,
    CorpusError,
    CorruptFile,
    DialogueError,
    DuplicateId,
    EmptyInput,
    LlmError,
    LlmTimeout,
    MalformedRecord,
    MalformedResponse,
    MaxTurnsExceeded,
    MissingTemplate,
    NoMusicContent,
    ParseError,
    ScriptExhausted,
    TransportError,
    TunesmithError,
    TurnInFlight,
    VersionMismatch,
)
from .llm import ChatBackend, ChatMessage, HttpBackend, MockBackend, ModelConfig
from .notation import (
    Bar,
    IssueCode,
    Key,
    Meter,
    NoteEvent,
    Pitch,
    Severity,
    Tune,
    TuneHeader,
    ValidationIssue,
    bar_fill,
    normalize,
    parse_tune,
    serialize,
    validate,
)
from .retrieval import (
    RankedCandidate,
    RetrievalConfig,
    extract_tags,
    fraction_to_decimal,
    jaccard,
    rank,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # notation
    "Bar",
    "IssueCode",
    "Key",
    "Meter",
    "NoteEvent",
    "Pitch",
    "Severity",
    "Tune",
    "TuneHeader",
    "ValidationIssue",
    "bar_fill",
    "normalize",
    "parse_tune",
    "serialize",
    "validate",
    # corpus
    "CorpusEntry",
    "CorpusIndex",
    "FieldMapping",
    "IngestReport",
    "contains_duplicate",
    "ingest",
    "load_index",
    "read_dump",
    "save_index",
    # retrieval
    "RankedCandidate",
    "RetrievalConfig",
    "extract_tags",
    "fraction_to_decimal",
    "jaccard",
    "rank",
    # llm
    "ChatBackend",
    "ChatMessage",
    "HttpBackend",
    "MockBackend",
    "ModelConfig",
    # dialogue
    "DialogueEngine",
    "Session",
    "TurnResult",
    "export_transcript",
    # errors
    "TunesmithError",
    "ParseError",
    "EmptyInput",
    "NoMusicContent",
    "CorpusError",
    "MalformedRecord",
    "DuplicateId",
    "VersionMismatch",
    "CorruptFile",
    "LlmError",
    "LlmTimeout",
    "TransportError",
    "ApiError",
    "MalformedResponse",
    "ScriptExhausted",
    "DialogueError",
    "MissingTemplate",
    "TurnInFlight",
    "MaxTurnsExceeded",
    "ConfigError",
]
