"""Corpus ingestion, the immutable tag index, persistence, duplicate lookup.

A dump is a stream of records (one JSON object per line). A field-mapping
config names which source fields hold the abc body, the tune type, the mode,
the meter, the title and the id, because dump schemas vary across releases.
Tags come in three families: tune type (verbatim), mode (extracted from the
key string) and meter (verbatim).
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Optional

from . import notation
from .errors import CorruptFile, DuplicateId, MalformedRecord, ParseError, VersionMismatch

__all__ = [
    "FAMILIES",
    "normalize_tag",
    "extract_mode_tag",
    "FieldMapping",
    "CorpusEntry",
    "CorpusIndex",
    "IngestReport",
    "read_dump",
    "ingest",
    "save_index",
    "load_index",
    "contains_duplicate",
]

FAMILIES = ("type", "mode", "meter")

_INDEX_MAGIC = "tunesmith-index"
_INDEX_VERSION = 1


def normalize_tag(tag: str) -> str:
    """Lowercase, trim, collapse internal whitespace to single spaces."""
    return re.sub(r"\s+", " ", tag.strip().lower())


_MODE_PREFIXES = {name[:3]: name for name in notation.MODE_NAMES}


def extract_mode_tag(value: str) -> Optional[str]:
    """Mode tag from a key string: ``Ddorian`` -> ``dorian``, ``Gm`` ->
    ``minor``, bare ``mixolydian`` -> itself, ``D`` -> ``major``. Returns
    None when the residue is not a recognizable mode."""
    text = normalize_tag(value)
    if not text:
        return None
    m = re.fullmatch(r"([a-g])[#b♯♭]?\s*(.*)", text)
    residue = m.group(2).strip() if m else text
    if not residue:
        return "major"
    if residue == "m":
        return "minor"
    full = _MODE_PREFIXES.get(residue[:3])
    if full and residue in (full[:3], full):
        return full
    return None


@dataclass(frozen=True)
class FieldMapping:
    """Source field names for each record role. Only ``abc`` is mandatory."""

    abc: str = "abc"
    type: Optional[str] = "type"
    mode: Optional[str] = "mode"
    meter: Optional[str] = "meter"
    title: Optional[str] = "title"
    id: Optional[str] = "id"

    @classmethod
    def from_file(cls, path: str | Path) -> "FieldMapping":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data: Mapping[str, Optional[str]]) -> "FieldMapping":
        unknown = set(data) - {"abc", "type", "mode", "meter", "title", "id"}
        if unknown:
            raise ValueError(f"unknown mapping roles: {sorted(unknown)}")
        if "abc" not in data or not data["abc"]:
            raise ValueError("mapping must name the abc field")
        return cls(**data)  # type: ignore[arg-type]


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    title: str
    abc: str
    family_tags: tuple[tuple[str, tuple[str, ...]], ...]  # family -> tags
    canonical: Optional[str] = None
    parse_failure: Optional[str] = None

    @property
    def tags(self) -> frozenset[str]:
        return frozenset(t for _, tags in self.family_tags for t in tags)

    @property
    def retrievable(self) -> bool:
        return bool(self.tags) and self.parse_failure is None


@dataclass(frozen=True)
class CorpusIndex:
    """Immutable searchable collection; all derived structures are rebuilt
    from ``entries`` so they can never drift."""

    entries: dict[str, CorpusEntry]
    vocabulary: frozenset[str] = field(init=False)
    vocabulary_by_family: dict[str, tuple[str, ...]] = field(init=False)
    inverted: dict[str, tuple[str, ...]] = field(init=False)
    canonical_to_id: dict[str, str] = field(init=False)

    def __post_init__(self) -> None:
        by_family: dict[str, set[str]] = {f: set() for f in FAMILIES}
        inverted: dict[str, list[str]] = {}
        canonical: dict[str, str] = {}
        for entry_id in sorted(self.entries):
            entry = self.entries[entry_id]
            for family, tags in entry.family_tags:
                by_family.setdefault(family, set()).update(tags)
            if entry.retrievable:
                for tag in entry.tags:
                    inverted.setdefault(tag, []).append(entry_id)
            if entry.canonical is not None and entry.canonical not in canonical:
                canonical[entry.canonical] = entry_id
        object.__setattr__(
            self, "vocabulary_by_family", {f: tuple(sorted(v)) for f, v in by_family.items()}
        )
        object.__setattr__(
            self, "vocabulary", frozenset(t for v in by_family.values() for t in v)
        )
        object.__setattr__(self, "inverted", {t: tuple(ids) for t, ids in sorted(inverted.items())})
        object.__setattr__(self, "canonical_to_id", canonical)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class IngestReport:
    loaded: int = 0
    flagged: int = 0
    skipped: int = 0
    messages: list[str] = field(default_factory=list)

    def summary(self) -> str:
        return f"loaded={self.loaded} flagged={self.flagged} skipped={self.skipped}"


def read_dump(path: str | Path) -> Iterator[dict]:
    """Yield records from a newline-delimited JSON dump, skipping blank lines."""
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorruptFile(f"{path}:{line_no}: not valid JSON: {exc}") from exc
            if not isinstance(record, dict):
                raise CorruptFile(f"{path}:{line_no}: record is not an object")
            yield record


def _record_tags(record: Mapping, mapping: FieldMapping, report: IngestReport, rid: str):
    families: list[tuple[str, tuple[str, ...]]] = []
    if mapping.type and record.get(mapping.type):
        tag = normalize_tag(str(record[mapping.type]))
        if tag:
            families.append(("type", (tag,)))
    if mapping.mode and record.get(mapping.mode):
        mode = extract_mode_tag(str(record[mapping.mode]))
        if mode:
            families.append(("mode", (mode,)))
        else:
            report.messages.append(f"{rid}: unrecognized mode {record[mapping.mode]!r}, tag omitted")
    if mapping.meter and record.get(mapping.meter):
        tag = normalize_tag(str(record[mapping.meter]))
        if tag:
            families.append(("meter", (tag,)))
    return tuple(families)


def _full_abc(record: Mapping, mapping: FieldMapping, rid: str, title: str) -> str:
    """thesession-style dumps carry body-only abc; synthesize the header
    lines from the mapped fields so the entry is a complete tune (needed
    both for canonical duplicate matching and for useful prompt examples)."""
    abc = str(record[mapping.abc])
    if re.search(r"^K:", abc, flags=re.MULTILINE):
        return abc
    header = [f"T:{title}"]
    if mapping.meter and record.get(mapping.meter):
        header.append(f"M:{record[mapping.meter]}")
    if mapping.mode and record.get(mapping.mode):
        header.append(f"K:{record[mapping.mode]}")
    return "\n".join(header) + "\n" + abc


def ingest(records: Iterable[Mapping], mapping: FieldMapping) -> tuple[CorpusIndex, IngestReport]:
    """Build a CorpusIndex from dump records.

    Records without an abc body are skipped (reported). Entries whose abc
    still fails the lenient parse, or that carry no tags at all, are kept
    but flagged non-retrievable. A duplicated id aborts ingestion.
    """
    report = IngestReport()
    entries: dict[str, CorpusEntry] = {}
    for position, record in enumerate(records):
        rid = (
            str(record[mapping.id])
            if mapping.id and record.get(mapping.id) is not None
            else f"entry-{position}"
        )
        if rid in entries:
            raise DuplicateId(f"duplicate entry id {rid!r}")
        if not record.get(mapping.abc):
            report.skipped += 1
            report.messages.append(f"record {position} ({rid}): no abc body, skipped")
            continue
        title = (
            str(record[mapping.title])
            if mapping.title and record.get(mapping.title)
            else rid
        )
        abc = _full_abc(record, mapping, rid, title)
        canonical: Optional[str] = None
        failure: Optional[str] = None
        try:
            canonical = notation.normalize(notation.parse_tune(abc))
        except ParseError as exc:
            failure = str(exc)
        tags = _record_tags(record, mapping, report, rid)
        entry = CorpusEntry(
            id=rid,
            title=title,
            abc=abc,
            family_tags=tags,
            canonical=canonical,
            parse_failure=failure,
        )
        entries[rid] = entry
        report.loaded += 1
        if not entry.retrievable:
            report.flagged += 1
            reason = failure if failure else "no tags"
            report.messages.append(f"{rid}: non-retrievable ({reason})")
    return CorpusIndex(entries=entries), report


# --- persistence -------------------------------------------------------------


def _payload_bytes(payload: dict) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")


def save_index(index: CorpusIndex, path: str | Path) -> None:
    """Write the index as a checksummed, versioned JSON document."""
    payload = {
        "entries": [
            {
                "id": e.id,
                "title": e.title,
                "abc": e.abc,
                "family_tags": [[family, list(tags)] for family, tags in e.family_tags],
            }
            for _, e in sorted(index.entries.items())
        ]
    }
    document = {
        "magic": _INDEX_MAGIC,
        "version": _INDEX_VERSION,
        "checksum": hashlib.sha256(_payload_bytes(payload)).hexdigest(),
        "payload": payload,
    }
    Path(path).write_text(json.dumps(document, indent=1), encoding="utf-8")


def load_index(path: str | Path) -> CorpusIndex:
    """Load a persisted index; canonical texts and parse status are
    recomputed so load(save(x)) equals x through a single code path."""
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CorruptFile(f"{path}: {exc}") from exc
    if not isinstance(document, dict) or document.get("magic") != _INDEX_MAGIC:
        raise CorruptFile(f"{path}: not a tunesmith index file")
    version = document.get("version")
    if version != _INDEX_VERSION:
        raise VersionMismatch(f"{path}: format version {version}, expected {_INDEX_VERSION}")
    payload = document.get("payload")
    checksum = document.get("checksum")
    if not isinstance(payload, dict) or not isinstance(checksum, str):
        raise CorruptFile(f"{path}: missing payload or checksum")
    if hashlib.sha256(_payload_bytes(payload)).hexdigest() != checksum:
        raise CorruptFile(f"{path}: checksum mismatch")

    entries: dict[str, CorpusEntry] = {}
    try:
        for item in payload["entries"]:
            canonical: Optional[str] = None
            failure: Optional[str] = None
            try:
                canonical = notation.normalize(notation.parse_tune(item["abc"]))
            except ParseError as exc:
                failure = str(exc)
            entry = CorpusEntry(
                id=item["id"],
                title=item["title"],
                abc=item["abc"],
                family_tags=tuple(
                    (family, tuple(tags)) for family, tags in item["family_tags"]
                ),
                canonical=canonical,
                parse_failure=failure,
            )
            entries[entry.id] = entry
    except (KeyError, TypeError) as exc:
        raise CorruptFile(f"{path}: malformed entry payload: {exc}") from exc
    return CorpusIndex(entries=entries)


def contains_duplicate(index: CorpusIndex, tune: notation.Tune) -> Optional[str]:
    """Id of the entry whose canonical text equals this tune's, else None.
    Exact-copy semantics: title and whitespace differences do not count,
    any note change does."""
    return index.canonical_to_id.get(notation.normalize(tune))
