"""Parse, validate, normalize and serialize a practical subset of abc notation.

The grammar subset covers what Irish traditional tune corpora actually use:
header fields X, T, M, L, K, R; notes with accidentals, octave marks and
duration suffixes (``A2``, ``A/``, ``A/2``, ``A3/2``); rests ``z``/``Z``;
barlines ``|``, ``|:``, ``:|``, ``||``, ``|]``. Everything else (chords,
gracenotes, tuplets, decorations, inline fields) is captured opaquely with
duration zero so that real corpus tunes always load. Duration arithmetic is
exact: :class:`fractions.Fraction` throughout, never floats.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterator, Optional

from .errors import EmptyInput, NoMusicContent

__all__ = [
    "Accidental",
    "Pitch",
    "EventKind",
    "NoteEvent",
    "Barline",
    "Bar",
    "Meter",
    "Key",
    "TuneHeader",
    "Tune",
    "Severity",
    "IssueCode",
    "ValidationIssue",
    "parse_tune",
    "bar_fill",
    "validate",
    "serialize",
    "normalize",
    "MODE_NAMES",
]


# --- pitch / event model ----------------------------------------------------

MODE_NAMES = (
    "major",
    "minor",
    "dorian",
    "phrygian",
    "lydian",
    "mixolydian",
    "aeolian",
    "locrian",
    "ionian",
)

# three-letter prefix -> full mode name; "m" alone means minor
_MODE_BY_PREFIX = {name[:3]: name for name in MODE_NAMES}

# canonical header spelling, e.g. K:Dmaj
_MODE_ABBREV = {name: name[:3] for name in MODE_NAMES}


class Accidental(Enum):
    SHARP = "^"
    DOUBLE_SHARP = "^^"
    FLAT = "_"
    DOUBLE_FLAT = "__"
    NATURAL = "="


@dataclass(frozen=True)
class Pitch:
    """A note letter with accidental and octave displacement.

    ``letter`` is always uppercase A-G; the case of the source token is
    folded into ``octave_shift`` (lowercase letter = +1, each ``'`` adds one,
    each ``,`` subtracts one).
    """

    letter: str
    accidental: Optional[Accidental] = None
    octave_shift: int = 0

    def to_abc(self) -> str:
        acc = self.accidental.value if self.accidental else ""
        if self.octave_shift >= 1:
            return acc + self.letter.lower() + "'" * (self.octave_shift - 1)
        return acc + self.letter.upper() + "," * (-self.octave_shift)


class EventKind(Enum):
    NOTE = "note"
    REST = "rest"
    OPAQUE = "opaque"


@dataclass(frozen=True)
class NoteEvent:
    """One event in a bar.

    * ``NOTE``: has a pitch and a positive duration in units of the unit
      note length.
    * ``REST``: ``z`` rests carry their duration directly; ``Z`` measure
      rests are expanded to ``measures * meter / unit`` at parse time.
    * ``OPAQUE``: source text carried verbatim with duration zero (chords,
      tuplet markers, ties, unknown junk, ...). Never contributes to bar
      fill.

    ``decorations`` preserves prefix text glued to a note or rest in the
    source (gracenote groups, slur opens, ornament characters).
    """

    kind: EventKind
    duration: Fraction = Fraction(0)
    pitch: Optional[Pitch] = None
    decorations: str = ""
    text: str = ""
    rest_measures: Optional[int] = None
    junk: bool = False

    def to_abc(self) -> str:
        if self.kind is EventKind.NOTE:
            assert self.pitch is not None
            return self.decorations + self.pitch.to_abc() + _duration_suffix(self.duration)
        if self.kind is EventKind.REST:
            if self.rest_measures is not None:
                count = "" if self.rest_measures == 1 else str(self.rest_measures)
                return self.decorations + "Z" + count
            return self.decorations + "z" + _duration_suffix(self.duration)
        return self.text


def _duration_suffix(duration: Fraction) -> str:
    """Canonical abc duration suffix: 1 -> '', 1/2 -> '/', 3/2 -> '3/2'."""
    n, d = duration.numerator, duration.denominator
    if d == 1:
        return "" if n == 1 else str(n)
    if n == 1:
        return "/" if d == 2 else f"/{d}"
    return f"{n}/{d}"


class Barline(Enum):
    NONE = ""
    PLAIN = "|"
    REPEAT_START = "|:"
    REPEAT_END = ":|"
    DOUBLE = "||"
    FINAL = "|]"


_BARLINE_BY_TEXT = {b.value: b for b in Barline if b is not Barline.NONE}


@dataclass(frozen=True)
class Bar:
    """Events between two barlines. Adjacent bars share the physical
    barline: ``close_barline`` of bar N equals ``open_barline`` of bar N+1.
    An open barline of NONE is only valid on the first bar (anacrusis
    position)."""

    events: tuple[NoteEvent, ...]
    open_barline: Barline = Barline.NONE
    close_barline: Barline = Barline.NONE


# --- header model -----------------------------------------------------------


@dataclass(frozen=True)
class Meter:
    numerator: int
    denominator: int
    symbol: Optional[str] = None  # "C" or "C|" when written symbolically

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def to_abc(self) -> str:
        return self.symbol if self.symbol else f"{self.numerator}/{self.denominator}"


@dataclass(frozen=True)
class Key:
    tonic: str  # uppercase A-G
    accidental: Optional[str] = None  # "#" or "b"
    mode: str = "major"

    def to_abc(self) -> str:
        return f"{self.tonic}{self.accidental or ''}{_MODE_ABBREV[self.mode]}"


@dataclass(frozen=True)
class TuneHeader:
    reference: Optional[int] = None
    title: Optional[str] = None
    meter: Optional[Meter] = None
    unit_length: Optional[Fraction] = None
    key: Optional[Key] = None
    rhythm: Optional[str] = None
    extra_fields: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class Tune:
    header: TuneHeader
    body: tuple[Bar, ...]
    raw: str = field(default="", compare=False)

    @property
    def effective_unit_length(self) -> Fraction:
        """L: if present, else the abc v2.1 default derived from the meter
        (1/16 below 3/4, 1/8 at or above; 1/8 when there is no meter)."""
        if self.header.unit_length is not None:
            return self.header.unit_length
        if self.header.meter is not None and self.header.meter.value < Fraction(3, 4):
            return Fraction(1, 16)
        return Fraction(1, 8)

    @property
    def has_tuplets(self) -> bool:
        return any(
            e.kind is EventKind.OPAQUE and _TUPLET_RE.match(e.text)
            for bar in self.body
            for e in bar.events
        )


# --- validation model --------------------------------------------------------


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


class IssueCode(Enum):
    BAR_OVERFULL = "BAR_OVERFULL"
    BAR_UNDERFULL = "BAR_UNDERFULL"
    MISSING_METER = "MISSING_METER"
    MISSING_KEY = "MISSING_KEY"
    UNPARSEABLE_TOKEN = "UNPARSEABLE_TOKEN"
    SKIPPED_TUPLET = "SKIPPED_TUPLET"


@dataclass(frozen=True)
class ValidationIssue:
    severity: Severity
    code: IssueCode
    detail: str
    bar_index: Optional[int] = None


# --- tokenizer ---------------------------------------------------------------

_FIELD_LINE_RE = re.compile(r"^([A-Za-z]):(.*)$")
_COMMENT_RE = re.compile(r"(?<!\\)%.*$")

_NOTE_RE = re.compile(
    r"(?P<acc>\^\^|\^|__|_|=)?"
    r"(?P<letter>[A-Ga-g])"
    r"(?P<oct>[',]*)"
    r"(?P<num>\d+)?(?P<slash>/+)?(?P<den>\d+)?"
)
_REST_RE = re.compile(r"(?P<sym>[zZxX])(?P<num>\d+)?(?P<slash>/+)?(?P<den>\d+)?")
_BARLINE_RE = re.compile(r"\|\]|\|\||\|:|:\||\|")
_INLINE_FIELD_RE = re.compile(r"\[[A-Za-z]:[^\]\n]*\]")
_ENDING_RE = re.compile(r"\[?\d[\d,\-]*")
_CHORD_RE = re.compile(r"\[[^\]\n]+\]")
_GRACE_RE = re.compile(r"\{[^}\n]*\}")
_BANG_DECOR_RE = re.compile(r"![^!\s]+!")
_QUOTE_RE = re.compile(r"\"[^\"\n]*\"")
_TUPLET_RE = re.compile(r"\((?=\d)\d+(?::\d*){0,2}")
_BROKEN_RE = re.compile(r"<+|>+")
_WS_RE = re.compile(r"\s+")

_DECOR_CHARS = set(".~HLMOPSTuv")


def _parse_duration(num: Optional[str], slash: Optional[str], den: Optional[str]) -> Fraction:
    numerator = int(num) if num else 1
    if den:
        denominator = int(den)
    elif slash:
        denominator = 2 ** len(slash)
    else:
        denominator = 1
    return Fraction(numerator, denominator)


class _BodyBuilder:
    """Accumulates tokens into bars; flushes pending prefix decorations."""

    def __init__(self) -> None:
        self.bars: list[Bar] = []
        self.events: list[NoteEvent] = []
        self.open_barline = Barline.NONE
        self.pending_decor: list[str] = []
        self.saw_music = False

    def flush_decorations(self) -> None:
        for text in self.pending_decor:
            self.events.append(NoteEvent(EventKind.OPAQUE, text=text))
        self.pending_decor.clear()

    def add_opaque(self, text: str, junk: bool = False) -> None:
        self.flush_decorations()
        self.events.append(NoteEvent(EventKind.OPAQUE, text=text, junk=junk))

    def add_event(self, event: NoteEvent) -> None:
        if self.pending_decor:
            event = NoteEvent(
                kind=event.kind,
                duration=event.duration,
                pitch=event.pitch,
                decorations="".join(self.pending_decor),
                text=event.text,
                rest_measures=event.rest_measures,
            )
            self.pending_decor.clear()
        self.events.append(event)
        self.saw_music = True

    def close_bar(self, barline: Barline) -> None:
        self.flush_decorations()
        if self.events:
            self.bars.append(Bar(tuple(self.events), self.open_barline, barline))
            self.events = []
        elif self.bars:
            # stray barline right after the previous one: fold it into the
            # previous bar's close so no empty bar is emitted
            prev = self.bars[-1]
            self.bars[-1] = Bar(prev.events, prev.open_barline, barline)
        self.open_barline = barline

    def finish(self) -> tuple[Bar, ...]:
        self.flush_decorations()
        if self.events:
            self.bars.append(Bar(tuple(self.events), self.open_barline, Barline.NONE))
        return tuple(self.bars)


def _tokenize_line(line: str, builder: _BodyBuilder, bar_units: Optional[Fraction]) -> None:
    pos = 0
    length = len(line)
    while pos < length:
        ws = _WS_RE.match(line, pos)
        if ws:
            builder.flush_decorations()
            pos = ws.end()
            continue

        m = _INLINE_FIELD_RE.match(line, pos)
        if m:
            builder.add_opaque(m.group())
            pos = m.end()
            continue

        m = _NOTE_RE.match(line, pos)
        if m and m.group("letter"):
            shift = 1 if m.group("letter").islower() else 0
            shift += m.group("oct").count("'") - m.group("oct").count(",")
            acc = Accidental(m.group("acc")) if m.group("acc") else None
            pitch = Pitch(m.group("letter").upper(), acc, shift)
            duration = _parse_duration(m.group("num"), m.group("slash"), m.group("den"))
            builder.add_event(NoteEvent(EventKind.NOTE, duration, pitch))
            pos = m.end()
            continue

        m = _REST_RE.match(line, pos)
        if m:
            sym = m.group("sym")
            duration = _parse_duration(m.group("num"), m.group("slash"), m.group("den"))
            if sym in ("Z", "X"):
                # measure rest: length is whole measures, needs a meter
                if bar_units is None:
                    builder.add_opaque(m.group())
                else:
                    count = int(m.group("num")) if m.group("num") else 1
                    builder.add_event(
                        NoteEvent(
                            EventKind.REST,
                            bar_units * count,
                            rest_measures=count,
                        )
                    )
            else:
                builder.add_event(NoteEvent(EventKind.REST, duration))
            pos = m.end()
            continue

        m = _BARLINE_RE.match(line, pos)
        if m:
            builder.close_bar(_BARLINE_BY_TEXT[m.group()])
            pos = m.end()
            # variant ending numbers directly after a barline: |1  |2,3
            e = _ENDING_RE.match(line, pos)
            if e and not e.group().startswith("["):
                builder.add_opaque(e.group())
                pos = e.end()
            continue

        if line[pos] == "[":
            e = _ENDING_RE.match(line, pos)
            if e:
                builder.add_opaque(e.group())
                pos = e.end()
                continue
            m = _CHORD_RE.match(line, pos)
            if m:
                builder.add_opaque(m.group())
                pos = m.end()
                continue

        m = _TUPLET_RE.match(line, pos)
        if m:
            builder.add_opaque(m.group())
            pos = m.end()
            continue

        for decor_re in (_GRACE_RE, _BANG_DECOR_RE, _QUOTE_RE):
            m = decor_re.match(line, pos)
            if m:
                builder.pending_decor.append(m.group())
                pos = m.end()
                break
        else:
            ch = line[pos]
            if ch == "(":
                builder.pending_decor.append(ch)
                pos += 1
            elif ch in _DECOR_CHARS:
                builder.pending_decor.append(ch)
                pos += 1
            elif ch in ")-":
                builder.add_opaque(ch)
                pos += 1
            elif (m := _BROKEN_RE.match(line, pos)) is not None:
                builder.add_opaque(m.group())
                pos = m.end()
            elif ch == "\\" and line[pos + 1 :].strip() == "":
                builder.add_opaque("\\")
                pos = length
            else:
                builder.add_opaque(ch, junk=True)
                pos += 1


# --- header parsing ----------------------------------------------------------


def _parse_meter(text: str) -> Optional[Meter]:
    text = text.strip()
    if text == "C":
        return Meter(4, 4, "C")
    if text == "C|":
        return Meter(2, 2, "C|")
    m = re.fullmatch(r"(\d+)\s*/\s*(\d+)", text)
    if not m:
        return None
    num, den = int(m.group(1)), int(m.group(2))
    if num <= 0 or den <= 0 or den & (den - 1):
        return None  # denominator must be a power of two
    return Meter(num, den)


def _parse_unit_length(text: str) -> Optional[Fraction]:
    m = re.fullmatch(r"(\d+)\s*/\s*(\d+)", text.strip())
    if not m or int(m.group(1)) <= 0 or int(m.group(2)) <= 0:
        return None
    return Fraction(int(m.group(1)), int(m.group(2)))


def _parse_key(text: str) -> Optional[Key]:
    """``Dmajor``, ``D major``, ``D``, ``F#m``, ``Gdor`` -> Key. Unknown
    residue after the tonic falls back to major (lenient)."""
    m = re.match(r"\s*([A-Ga-g])([#b♯♭]?)\s*(.*)$", text)
    if not m:
        return None
    tonic = m.group(1).upper()
    acc = {"#": "#", "♯": "#", "b": "b", "♭": "b"}.get(m.group(2)) or None
    residue = m.group(3).strip().lower()
    if not residue:
        mode = "major"
    elif residue == "m":
        mode = "minor"
    else:
        mode = _MODE_BY_PREFIX.get(residue[:3], "major")
    return Key(tonic, acc, mode)


# --- parse -------------------------------------------------------------------


def parse_tune(source: str) -> Tune:
    """Parse abc text leniently into a :class:`Tune`.

    Line endings are normalized to ``\\n`` and ``%`` comments stripped.
    Tokens outside the supported grammar become opaque events instead of
    failing, so corpus tunes always load.

    Raises :class:`EmptyInput` for blank text and :class:`NoMusicContent`
    when there is neither a K: field nor any recognizable note token.
    """
    if not source or not source.strip():
        raise EmptyInput("no abc content")
    text = source.replace("\r\n", "\n").replace("\r", "\n")

    reference: Optional[int] = None
    title: Optional[str] = None
    meter: Optional[Meter] = None
    unit_length: Optional[Fraction] = None
    key: Optional[Key] = None
    rhythm: Optional[str] = None
    extras: list[tuple[str, str]] = []

    body_lines: list[str] = []
    in_body = False
    for line in text.split("\n"):
        line = _COMMENT_RE.sub("", line).rstrip()
        if in_body:
            body_lines.append(line)
            continue
        if not line.strip():
            continue
        fm = _FIELD_LINE_RE.match(line)
        if not fm:
            in_body = True
            body_lines.append(line)
            continue
        letter, value = fm.group(1), fm.group(2).strip()
        if letter == "X":
            if reference is None and value.isdigit():
                reference = int(value)
            else:
                extras.append((letter, value))
        elif letter == "T":
            if title is None:
                title = value
            else:
                extras.append((letter, value))
        elif letter == "M":
            parsed = _parse_meter(value)
            if parsed is not None and meter is None:
                meter = parsed
            else:
                extras.append((letter, value))
        elif letter == "L":
            parsed_l = _parse_unit_length(value)
            if parsed_l is not None and unit_length is None:
                unit_length = parsed_l
            else:
                extras.append((letter, value))
        elif letter == "R":
            if rhythm is None:
                rhythm = value
            else:
                extras.append((letter, value))
        elif letter == "K":
            parsed_k = _parse_key(value)
            if parsed_k is not None:
                key = parsed_k
            elif value:
                extras.append((letter, value))
            in_body = True  # K: ends the header
        else:
            extras.append((letter, value))

    header = TuneHeader(
        reference=reference,
        title=title,
        meter=meter,
        unit_length=unit_length,
        key=key,
        rhythm=rhythm,
        extra_fields=tuple(extras),
    )

    # bar length in unit-note-length units, for Z measure rests
    effective_unit = unit_length
    if effective_unit is None:
        if meter is not None and meter.value < Fraction(3, 4):
            effective_unit = Fraction(1, 16)
        else:
            effective_unit = Fraction(1, 8)
    bar_units = meter.value / effective_unit if meter is not None else None

    builder = _BodyBuilder()
    for line in body_lines:
        if not line.strip():
            continue
        if _FIELD_LINE_RE.match(line.strip()):
            # field line inside the body: carried opaquely on its own line
            builder.add_opaque(line.strip())
            continue
        _tokenize_line(line, builder, bar_units)
    body = builder.finish()

    if key is None and not builder.saw_music:
        raise NoMusicContent("no K: field and no recognizable note tokens")

    return Tune(header=header, body=body, raw=source)


# --- serialization -----------------------------------------------------------


def _is_field_line_text(text: str) -> bool:
    return bool(_FIELD_LINE_RE.match(text)) and not text.startswith("[")


def _serialize_body(body: tuple[Bar, ...], spaced: bool) -> str:
    sep = " " if spaced else ""
    parts: list[str] = []
    for i, bar in enumerate(body):
        if i == 0 and bar.open_barline is not Barline.NONE:
            parts.append(bar.open_barline.value)
        chunk: list[str] = []
        for event in bar.events:
            if event.kind is EventKind.OPAQUE and _is_field_line_text(event.text):
                if chunk:
                    parts.append(sep.join(chunk))
                    chunk = []
                parts.append("\n" + event.text + "\n")
            else:
                chunk.append(event.to_abc())
        if chunk:
            parts.append(sep.join(chunk))
        if bar.close_barline is not Barline.NONE:
            parts.append(bar.close_barline.value)
    return "".join(parts)


def serialize(tune: Tune) -> str:
    """Emit abc text that reparses to a structurally identical tune."""
    h = tune.header
    lines: list[str] = []
    if h.reference is not None:
        lines.append(f"X:{h.reference}")
    if h.title is not None:
        lines.append(f"T:{h.title}")
    if h.rhythm is not None:
        lines.append(f"R:{h.rhythm}")
    if h.meter is not None:
        lines.append(f"M:{h.meter.to_abc()}")
    if h.unit_length is not None:
        lines.append(f"L:{h.unit_length.numerator}/{h.unit_length.denominator}")
    for letter, value in h.extra_fields:
        lines.append(f"{letter}:{value}")
    if h.key is not None:
        lines.append(f"K:{h.key.to_abc()}")
    body = _serialize_body(tune.body, spaced=True)
    if body:
        lines.append(body)
    return "\n".join(lines) + "\n"


def normalize(tune: Tune) -> str:
    """Canonical text for duplicate detection.

    Title and X: are stripped, header order is fixed (M, L, K), the unit
    length is always made explicit, all whitespace is removed from the body
    and junk tokens are dropped. Idempotent: normalizing the parse of a
    canonical text reproduces it.
    """
    lines: list[str] = []
    if tune.header.meter is not None:
        m = tune.header.meter
        lines.append(f"M:{m.numerator}/{m.denominator}")
    unit = tune.effective_unit_length
    lines.append(f"L:{unit.numerator}/{unit.denominator}")
    if tune.header.key is not None:
        lines.append(f"K:{tune.header.key.to_abc()}")

    parts: list[str] = []
    for i, bar in enumerate(tune.body):
        if i == 0 and bar.open_barline is not Barline.NONE:
            parts.append(bar.open_barline.value)
        for event in bar.events:
            if event.kind is EventKind.OPAQUE:
                if event.junk:
                    continue
                parts.append(re.sub(r"\s+", "", event.text))
            else:
                parts.append(re.sub(r"\s+", "", event.to_abc()))
        if bar.close_barline is not Barline.NONE:
            parts.append(bar.close_barline.value)
    body = "".join(parts)
    if body:
        lines.append(body)
    return "\n".join(lines) + "\n"


# --- bar arithmetic / validation ----------------------------------------------


def bar_fill(bar: Bar, unit_length: Fraction) -> Fraction:
    """Exact total duration of a bar: sum of event durations times the unit
    note length. Opaque events contribute zero."""
    if unit_length <= 0:
        raise ValueError("unit_length must be positive")
    total = Fraction(0)
    for event in bar.events:
        if event.kind is not EventKind.OPAQUE:
            total += event.duration
    return total * unit_length


def _iter_junk_bars(tune: Tune) -> Iterator[tuple[int, list[str]]]:
    for i, bar in enumerate(tune.body):
        tokens = [e.text for e in bar.events if e.kind is EventKind.OPAQUE and e.junk]
        if tokens:
            yield i, tokens


def _complement_partner(tune: Tune, last_index: int) -> int:
    """The bar whose fill complements a partial final bar: the bar right
    after the opening repeat when the tune ends with ``:|``, else the first
    bar. Only one level of repeats is considered."""
    if tune.body[last_index].close_barline is Barline.REPEAT_END:
        for i in range(last_index, -1, -1):
            if tune.body[i].open_barline is Barline.REPEAT_START:
                return i
    return 0


def validate(tune: Tune) -> list[ValidationIssue]:
    """Check bar fill against the meter.

    The first bar may be a partial pickup (anacrusis) and is exempt; a
    partial final bar is exempt iff the pickup's fill complements it to
    exactly one full measure. BAR_OVERFULL is always an error,
    BAR_UNDERFULL a warning. Tunes containing tuplets skip fill checking
    entirely (their opaque duration would make the arithmetic wrong). Pure
    function of the AST: identical input yields an identical issue list.
    """
    issues: list[ValidationIssue] = []

    if tune.header.key is None:
        issues.append(
            ValidationIssue(Severity.ERROR, IssueCode.MISSING_KEY, "no K: header field")
        )

    for bar_index, tokens in _iter_junk_bars(tune):
        issues.append(
            ValidationIssue(
                Severity.WARNING,
                IssueCode.UNPARSEABLE_TOKEN,
                "unrecognized tokens carried opaquely: " + " ".join(tokens),
                bar_index=bar_index,
            )
        )

    issues.extend(_fill_issues(tune))
    issues.sort(key=lambda i: (i.bar_index if i.bar_index is not None else -1, i.code.value))
    return issues


def _fill_issues(tune: Tune) -> list[ValidationIssue]:
    unit = tune.effective_unit_length
    fills = [bar_fill(bar, unit) for bar in tune.body]

    if tune.header.meter is None:
        if any(f > 0 for f in fills):
            return [
                ValidationIssue(
                    Severity.ERROR,
                    IssueCode.MISSING_METER,
                    "no M: header field; bar fill cannot be checked",
                )
            ]
        return []

    if tune.has_tuplets:
        first = next(
            i
            for i, bar in enumerate(tune.body)
            if any(e.kind is EventKind.OPAQUE and _TUPLET_RE.match(e.text) for e in bar.events)
        )
        return [
            ValidationIssue(
                Severity.WARNING,
                IssueCode.SKIPPED_TUPLET,
                "tune contains tuplets; fill checking skipped",
                bar_index=first,
            )
        ]

    meter = tune.header.meter.value
    issues: list[ValidationIssue] = []
    last = len(tune.body) - 1
    for i, fill in enumerate(fills):
        if fill == meter:
            continue
        if fill > meter:
            issues.append(
                ValidationIssue(
                    Severity.ERROR,
                    IssueCode.BAR_OVERFULL,
                    f"bar holds {fill}, meter is {meter}",
                    bar_index=i,
                )
            )
            continue
        if i == 0:
            continue  # pickup bar is exempt
        if i == last:
            partner_fill = fills[_complement_partner(tune, last)]
            credit = partner_fill if partner_fill < meter else Fraction(0)
            if fill + credit == meter:
                continue
            deficit = meter - fill - credit
            issues.append(
                ValidationIssue(
                    Severity.WARNING,
                    IssueCode.BAR_UNDERFULL,
                    f"final bar holds {fill}, lacks {deficit} after pickup credit of {credit}",
                    bar_index=i,
                )
            )
            continue
        issues.append(
            ValidationIssue(
                Severity.WARNING,
                IssueCode.BAR_UNDERFULL,
                f"bar holds {fill}, meter is {meter}",
                bar_index=i,
            )
        )
    return issues
