"""Tag extraction via the retrieval model and exact Jaccard ranking.

Similarity is kept as an exact rational (never a float) so candidate
ordering is bit-stable across platforms and runs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import AbstractSet, Mapping, Sequence

from .corpus import FAMILIES, CorpusIndex, normalize_tag
from .llm import ChatBackend, ChatMessage, ModelConfig

__all__ = [
    "FORMAT_INSTRUCTION",
    "RankedCandidate",
    "RetrievalConfig",
    "TagExtraction",
    "jaccard",
    "rank",
    "parse_tag_reply",
    "render_vocabulary",
    "extract_tags",
    "fraction_to_decimal",
]

# The reply-parsing in parse_tag_reply is written against this instruction;
# the two must stay in sync, which is why it lives in code, not in the
# template file.
FORMAT_INSTRUCTION = (
    "Reply with a comma-separated list of matching tags enclosed in braces, "
    "for example: {reel, major, 4/4}. Use only tags from the vocabulary above. "
    "If no tags apply, reply with {}."
)

_FAMILY_LABELS = {"type": "tune type", "mode": "mode", "meter": "meter"}


@dataclass(frozen=True)
class RankedCandidate:
    entry_id: str
    similarity: Fraction
    matched_tags: frozenset[str]


@dataclass(frozen=True)
class RetrievalConfig:
    k: int = 3
    include_zero_similarity: bool = False

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")


@dataclass(frozen=True)
class TagExtraction:
    tags: frozenset[str]
    raw_reply: str
    dropped: tuple[str, ...]


def jaccard(a: AbstractSet[str], b: AbstractSet[str]) -> Fraction:
    """|a n b| / |a u b| as an exact rational; 0 when both sets are empty."""
    union = len(a | b)
    if union == 0:
        return Fraction(0)
    return Fraction(len(a & b), union)


def rank(
    query: AbstractSet[str], index: CorpusIndex, cfg: RetrievalConfig = RetrievalConfig()
) -> list[RankedCandidate]:
    """Top-k retrievable entries by Jaccard similarity to the query tags.

    Sorted by similarity descending, ties broken by ascending entry id.
    Zero-similarity entries are excluded unless the config says otherwise;
    fewer than k results is a valid outcome.
    """
    if cfg.include_zero_similarity:
        candidate_ids = sorted(e.id for e in index.entries.values() if e.retrievable)
    else:
        seen: set[str] = set()
        for tag in query:
            seen.update(index.inverted.get(tag, ()))
        candidate_ids = sorted(seen)

    candidates = []
    for entry_id in candidate_ids:
        entry_tags = index.entries[entry_id].tags
        similarity = jaccard(query, entry_tags)
        if similarity == 0 and not cfg.include_zero_similarity:
            continue
        candidates.append(
            RankedCandidate(entry_id, similarity, frozenset(query & entry_tags))
        )
    candidates.sort(key=lambda c: (-c.similarity, c.entry_id))
    return candidates[: cfg.k]


def parse_tag_reply(reply: str, vocabulary: AbstractSet[str]) -> tuple[frozenset[str], tuple[str, ...]]:
    """Liberal parse of the model's tag list: strip braces and brackets,
    split on commas / semicolons / newlines, normalize, drop anything not in
    the vocabulary. Returns (tags, dropped tokens)."""
    cleaned = re.sub(r"[{}\[\]]", " ", reply)
    tags: set[str] = set()
    dropped: list[str] = []
    for token in re.split(r"[,;\n]", cleaned):
        tag = normalize_tag(token)
        if not tag:
            continue
        if tag in vocabulary:
            tags.add(tag)
        else:
            dropped.append(tag)
    return frozenset(tags), tuple(dropped)


def render_vocabulary(families: Mapping[str, Sequence[str]]) -> str:
    """One line per tag family, e.g. ``tune type: jig, polka, reel``."""
    lines = []
    for family in FAMILIES:
        tags = families.get(family, ())
        if tags:
            lines.append(f"{_FAMILY_LABELS[family]}: {', '.join(tags)}")
    return "\n".join(lines)


def extract_tags(
    request: str,
    families: Mapping[str, Sequence[str]],
    backend: ChatBackend,
    model: ModelConfig,
    system_template: str,
) -> TagExtraction:
    """Ask the retrieval model to tag a user request.

    The system prompt carries the whole vocabulary grouped by family plus
    the formatting instruction; the user request goes in verbatim. Tokens
    outside the vocabulary are dropped (kept in ``dropped`` for audit); on
    backend failure the LlmError propagates, tags are never fabricated.
    """
    vocabulary = frozenset(t for tags in families.values() for t in tags)
    if not vocabulary:
        raise ValueError("tag vocabulary is empty")
    from .dialogue import render_template  # local import to avoid a cycle

    system = render_template(
        system_template,
        {
            "vocabulary_by_family": render_vocabulary(families),
            "format_instruction": FORMAT_INSTRUCTION,
        },
    )
    reply = backend.complete(
        [ChatMessage("system", system), ChatMessage("user", request)], model
    )
    tags, dropped = parse_tag_reply(reply.content, vocabulary)
    return TagExtraction(tags=tags, raw_reply=reply.content, dropped=dropped)


def fraction_to_decimal(value: Fraction, max_places: int = 12) -> str:
    """Decimal string of an exact rational, computed by integer long
    division (no float drift). Terminating expansions are emitted in full;
    non-terminating ones are truncated at ``max_places``."""
    negative = value < 0
    n, d = abs(value.numerator), value.denominator
    whole, remainder = divmod(n, d)
    digits: list[str] = []
    while remainder and len(digits) < max_places:
        remainder *= 10
        digit, remainder = divmod(remainder, d)
        digits.append(str(digit))
    text = str(whole) + ("." + "".join(digits) if digits else "")
    return "-" + text if negative else text
