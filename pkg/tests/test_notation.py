"""Parser, validator, serializer and normalizer behaviour.

The two central fixtures are hand-derived: the eight-bar dorian jig with a
one-eighth pickup (event counts, per-bar fills and the pickup-complement
rule were worked out by hand before the parser existed), and its mutated
final bar whose deficit must come out at exactly 3/8.
"""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tunesmith import (
    EmptyInput,
    IssueCode,
    NoMusicContent,
    Severity,
    bar_fill,
    normalize,
    parse_tune,
    serialize,
    validate,
)
from tunesmith.notation import Accidental, Barline, EventKind, Key, Meter

JIG_BODY = "|:A|dAF DAF|GAG Aag|dAF DAF|Ffe e2a|dAF DAF|GAG Aag|faf dBA|Bdf d2:|"
JIG = f"X:1\nT:A Dorian Jig\nM:6/8\nL:1/8\nK:Ddor\n{JIG_BODY}"


# --- parsing the jig fixture --------------------------------------------------


class TestJigFixture:
    def test_header(self):
        tune = parse_tune(JIG)
        assert tune.header.reference == 1
        assert tune.header.title == "A Dorian Jig"
        assert tune.header.meter == Meter(6, 8)
        assert tune.header.unit_length == Fraction(1, 8)
        assert tune.header.key == Key("D", mode="dorian")

    def test_bar_and_event_counts(self):
        tune = parse_tune(JIG)
        assert len(tune.body) == 9  # pickup + eight full bars
        assert [len(bar.events) for bar in tune.body] == [1, 6, 6, 6, 5, 6, 6, 6, 4]

    def test_pickup_and_fills(self):
        tune = parse_tune(JIG)
        unit = tune.effective_unit_length
        fills = [bar_fill(bar, unit) for bar in tune.body]
        assert fills[0] == Fraction(1, 8)  # the pickup A
        assert fills[1:8] == [Fraction(6, 8)] * 7
        assert fills[8] == Fraction(5, 8)  # complement of the pickup

    def test_repeat_barlines(self):
        tune = parse_tune(JIG)
        assert tune.body[0].open_barline is Barline.REPEAT_START
        assert tune.body[-1].close_barline is Barline.REPEAT_END

    def test_pickup_complement_validates_clean(self):
        assert validate(parse_tune(JIG)) == []

    def test_mutated_final_bar_lacks_three_eighths(self):
        mutated = JIG.replace("Bdf d2:|", "d2:|")
        issues = validate(parse_tune(mutated))
        assert len(issues) == 1
        issue = issues[0]
        assert issue.code is IssueCode.BAR_UNDERFULL
        assert issue.severity is Severity.WARNING
        assert issue.bar_index == 8
        assert "3/8" in issue.detail

    def test_header_fragment_without_reference(self):
        tune = parse_tune("T:An Irish Lively Jig\nM:6/8\nK:Dmajor\nA|def fed|")
        assert tune.header.reference is None
        assert tune.header.title == "An Irish Lively Jig"
        assert tune.header.meter == Meter(6, 8)
        assert tune.header.key == Key("D", mode="major")
        assert tune.effective_unit_length == Fraction(1, 8)


# --- token-level behaviour ----------------------------------------------------


class TestDurations:
    @pytest.mark.parametrize(
        "token,expected",
        [
            ("A", Fraction(1)),
            ("A2", Fraction(2)),
            ("A3", Fraction(3)),
            ("A/", Fraction(1, 2)),
            ("A/2", Fraction(1, 2)),
            ("A//", Fraction(1, 4)),
            ("A/4", Fraction(1, 4)),
            ("A3/2", Fraction(3, 2)),
            ("A3/4", Fraction(3, 4)),
        ],
    )
    def test_note_duration_suffixes(self, token, expected):
        tune = parse_tune(f"X:1\nM:4/4\nK:C\n{token}|")
        event = tune.body[0].events[0]
        assert event.kind is EventKind.NOTE
        assert event.duration == expected

    def test_rest_durations(self):
        tune = parse_tune("X:1\nM:4/4\nK:C\nz z2 z/|")
        durations = [e.duration for e in tune.body[0].events]
        assert durations == [Fraction(1), Fraction(2), Fraction(1, 2)]
        assert all(e.kind is EventKind.REST for e in tune.body[0].events)

    def test_measure_rest_expands_to_meter(self):
        tune = parse_tune("X:1\nM:6/8\nL:1/8\nK:C\nZ|Z2|")
        unit = tune.effective_unit_length
        assert bar_fill(tune.body[0], unit) == Fraction(6, 8)
        assert bar_fill(tune.body[1], unit) == Fraction(12, 8)

    def test_opaque_tokens_contribute_zero(self):
        tune = parse_tune("X:1\nM:4/4\nK:C\n[ceg] C4|")
        fills = bar_fill(tune.body[0], tune.effective_unit_length)
        assert fills == Fraction(4, 8)


class TestPitches:
    @pytest.mark.parametrize(
        "token,letter,accidental,shift",
        [
            ("C", "C", None, 0),
            ("c", "C", None, 1),
            ("c'", "C", None, 2),
            ("C,", "C", None, -1),
            ("C,,", "C", None, -2),
            ("^F", "F", Accidental.SHARP, 0),
            ("^^f", "F", Accidental.DOUBLE_SHARP, 1),
            ("_B", "B", Accidental.FLAT, 0),
            ("__b'", "B", Accidental.DOUBLE_FLAT, 2),
            ("=e", "E", Accidental.NATURAL, 1),
        ],
    )
    def test_accidentals_and_octaves(self, token, letter, accidental, shift):
        tune = parse_tune(f"X:1\nM:4/4\nK:C\n{token}4|")
        pitch = tune.body[0].events[0].pitch
        assert pitch.letter == letter
        assert pitch.accidental is accidental
        assert pitch.octave_shift == shift

    def test_pitch_round_trip(self):
        source = "X:1\nM:4/4\nK:C\n^F =e __b' C,, c'4|"
        assert parse_tune(serialize(parse_tune(source))) == parse_tune(source)


class TestHeaders:
    def test_meter_symbols(self):
        common = parse_tune("X:1\nM:C\nK:C\nC8|")
        cut = parse_tune("X:1\nM:C|\nK:C\nC8|")
        assert common.header.meter.value == Fraction(4, 4)
        assert cut.header.meter.value == Fraction(2, 2)
        assert common.header.meter.to_abc() == "C"
        assert cut.header.meter.to_abc() == "C|"

    @pytest.mark.parametrize(
        "meter,expected",
        [("2/4", Fraction(1, 16)), ("3/4", Fraction(1, 8)), ("4/4", Fraction(1, 8)), ("6/8", Fraction(1, 8))],
    )
    def test_default_unit_length_by_meter(self, meter, expected):
        tune = parse_tune(f"X:1\nM:{meter}\nK:C\nC|")
        assert tune.effective_unit_length == expected

    def test_default_unit_length_without_meter(self):
        tune = parse_tune("X:1\nK:C\nC|")
        assert tune.effective_unit_length == Fraction(1, 8)

    @pytest.mark.parametrize(
        "text,tonic,accidental,mode",
        [
            ("D", "D", None, "major"),
            ("Dmajor", "D", None, "major"),
            ("Dmaj", "D", None, "major"),
            ("Ddor", "D", None, "dorian"),
            ("Ddorian", "D", None, "dorian"),
            ("Gm", "G", None, "minor"),
            ("Gmin", "G", None, "minor"),
            ("F#mix", "F", "#", "mixolydian"),
            ("Bb", "B", "b", "major"),
            ("a minor", "A", None, "minor"),
        ],
    )
    def test_key_parsing(self, text, tonic, accidental, mode):
        tune = parse_tune(f"X:1\nM:4/4\nK:{text}\nC|")
        assert tune.header.key == Key(tonic, accidental, mode)

    def test_rhythm_field(self):
        tune = parse_tune("X:1\nR:jig\nM:6/8\nK:D\nDED|")
        assert tune.header.rhythm == "jig"

    def test_unknown_header_fields_preserved(self):
        tune = parse_tune("X:1\nC:Trad.\nO:Ireland\nM:4/4\nK:C\nC|")
        assert ("C", "Trad.") in tune.header.extra_fields
        assert ("O", "Ireland") in tune.header.extra_fields

    def test_header_ends_at_key_line(self):
        # A T: line after K: is body content, kept opaquely, not a title.
        tune = parse_tune("X:1\nM:4/4\nK:C\nCDEF|\nT:Not A Title\nGABc|")
        assert tune.header.title is None


class TestLenientParsing:
    def test_comments_stripped(self):
        tune = parse_tune("X:1 % ref\nM:4/4\nK:C % the key\nC4 D4| % a bar\n")
        assert len(tune.body) == 1
        assert len(tune.body[0].events) == 2

    def test_crlf_normalized(self):
        assert parse_tune("X:1\r\nM:4/4\r\nK:C\r\nC4|\r\n") == parse_tune(
            "X:1\nM:4/4\nK:C\nC4|\n"
        )

    def test_junk_becomes_opaque_zero_duration(self):
        tune = parse_tune("X:1\nM:4/4\nK:C\nC4 $ D4|")
        junk = [e for e in tune.body[0].events if e.junk]
        assert len(junk) == 1
        assert junk[0].kind is EventKind.OPAQUE
        assert junk[0].duration == 0

    def test_empty_input_rejected(self):
        with pytest.raises(EmptyInput):
            parse_tune("")
        with pytest.raises(EmptyInput):
            parse_tune("   \n\t\n")

    def test_no_key_and_no_notes_rejected(self):
        with pytest.raises(NoMusicContent):
            parse_tune("X:1\nT:Nothing\nM:4/4\n")

    def test_key_field_alone_suffices(self):
        tune = parse_tune("X:1\nT:Nothing\nM:4/4\nK:C\n")
        assert tune.body == ()

    def test_minimal_tune(self):
        tune = parse_tune("K:C\nz|")
        assert len(tune.body) == 1
        event = tune.body[0].events[0]
        assert event.kind is EventKind.REST
        assert event.duration == Fraction(1)

    def test_continuation_and_multiline_body(self):
        tune = parse_tune("X:1\nM:4/4\nK:C\nCDEF GABc|\ncBAG FEDC|")
        assert len(tune.body) == 2


# --- validation ---------------------------------------------------------------


class TestValidate:
    def test_overfull_bar_is_error(self):
        issues = validate(parse_tune("X:1\nM:4/4\nL:1/8\nK:C\nC8 D2|"))
        assert [i.code for i in issues] == [IssueCode.BAR_OVERFULL]
        assert issues[0].severity is Severity.ERROR
        assert issues[0].bar_index == 0

    def test_underfull_interior_bar_is_warning(self):
        issues = validate(parse_tune("X:1\nM:4/4\nL:1/8\nK:C\nC8|D4|E8|"))
        assert [i.code for i in issues] == [IssueCode.BAR_UNDERFULL]
        assert issues[0].severity is Severity.WARNING
        assert issues[0].bar_index == 1

    def test_partial_first_bar_always_exempt(self):
        assert validate(parse_tune("X:1\nM:4/4\nL:1/8\nK:C\nC4|D8|E8|")) == []

    def test_missing_key_is_error(self):
        issues = validate(parse_tune("X:1\nM:4/4\nC4 D4|"))
        assert IssueCode.MISSING_KEY in [i.code for i in issues]
        severities = {i.code: i.severity for i in issues}
        assert severities[IssueCode.MISSING_KEY] is Severity.ERROR

    def test_missing_meter_is_error_when_bars_have_content(self):
        issues = validate(parse_tune("X:1\nK:C\nC4 D4|"))
        assert IssueCode.MISSING_METER in [i.code for i in issues]

    def test_junk_reported_per_bar(self):
        issues = validate(parse_tune("X:1\nM:4/4\nL:1/8\nK:C\nC8|$ D8|"))
        junk = [i for i in issues if i.code is IssueCode.UNPARSEABLE_TOKEN]
        assert len(junk) == 1
        assert junk[0].severity is Severity.WARNING
        assert junk[0].bar_index == 1

    def test_tuplet_skips_fill_checks(self):
        source = "X:1\nM:4/4\nL:1/8\nK:C\n(3CDE C2|"
        tune = parse_tune(source)
        assert tune.has_tuplets
        codes = [i.code for i in validate(tune)]
        assert IssueCode.SKIPPED_TUPLET in codes
        assert IssueCode.BAR_UNDERFULL not in codes
        assert IssueCode.BAR_OVERFULL not in codes

    def test_anacrusis_without_complement_still_flags_final(self):
        # Pickup 1/8 but final bar misses more than the complement.
        source = "X:1\nM:6/8\nL:1/8\nK:C\nA|CDE CDE|C2|"
        issues = validate(parse_tune(source))
        assert [i.code for i in issues] == [IssueCode.BAR_UNDERFULL]

    def test_full_first_and_partial_final_complementless(self):
        # No pickup: a short final bar alone is a warning.
        source = "X:1\nM:4/4\nL:1/8\nK:C\nC8|D4|"
        issues = validate(parse_tune(source))
        assert [i.code for i in issues] == [IssueCode.BAR_UNDERFULL]
        assert issues[0].bar_index == 1

    def test_exact_pickup_complement_with_repeats(self):
        # |:A| ... d2:| pairing: 1/8 pickup + 5/8 final inside the repeat.
        assert validate(parse_tune(JIG)) == []

    def test_issue_order_deterministic(self):
        source = "X:1\nM:4/4\nL:1/8\nK:C\n$ C2|D12|"
        first = validate(parse_tune(source))
        second = validate(parse_tune(source))
        assert first == second
        assert [i.bar_index for i in first] == sorted(
            i.bar_index for i in first
        )


# --- serialization and normalization -------------------------------------------


class TestSerialize:
    def test_round_trip_fixture(self):
        tune = parse_tune(JIG)
        assert parse_tune(serialize(tune)) == tune

    def test_serialize_is_parseable_text(self):
        text = serialize(parse_tune(JIG))
        assert text.startswith("X:1\n")
        assert "K:Ddor" in text

    def test_round_trip_with_opaque_material(self):
        source = 'X:1\nM:4/4\nK:C\n"Am" [ceg] (3CDE ~G2 {ag}f2 C2-|C8|'
        tune = parse_tune(source)
        assert parse_tune(serialize(tune)) == tune


class TestNormalize:
    def test_strips_title_and_reference(self):
        text = normalize(parse_tune(JIG))
        assert "T:" not in text
        assert "X:" not in text

    def test_explicit_unit_length(self):
        text = normalize(parse_tune("X:1\nM:6/8\nK:D\nDED DED|"))
        assert "L:1/8" in text

    def test_whitespace_and_title_invariant(self):
        a = normalize(parse_tune(JIG))
        b = normalize(
            parse_tune(JIG.replace("A Dorian Jig", "Other Name").replace(" ", ""))
        )
        assert a == b

    def test_one_note_change_distinguishes(self):
        a = normalize(parse_tune(JIG))
        b = normalize(parse_tune(JIG.replace("Bdf d2:|", "Bdf e2:|")))
        assert a != b

    def test_idempotent_on_fixture(self):
        tune = parse_tune(JIG)
        once = normalize(tune)
        assert normalize(parse_tune(once)) == once

    def test_key_spelling_canonicalized(self):
        a = normalize(parse_tune("X:1\nM:4/4\nK:Ddorian\nD4 E4|"))
        b = normalize(parse_tune("X:9\nT:Name\nM:4/4\nK:Ddor\nD4E4|"))
        assert a == b


# --- property tests -----------------------------------------------------------

_PITCHES = st.tuples(
    st.sampled_from(["", "^", "^^", "_", "__", "="]),
    st.sampled_from("ABCDEFGabcdefg"),
    st.sampled_from(["", "'", ",", "''"]),
)
_DURATIONS = st.sampled_from(["", "2", "3", "4", "/", "/2", "3/2", "//", "/4", "3/4"])


@st.composite
def _note_token(draw) -> str:
    accidental, letter, octave = draw(_PITCHES)
    if accidental and letter in "'," or octave == "'" and letter.isupper():
        pass  # any combination is legal abc, nothing to filter
    return f"{accidental}{letter}{octave}{draw(_DURATIONS)}"


@st.composite
def _bar_tokens(draw) -> str:
    tokens = draw(
        st.lists(
            st.one_of(
                _note_token(),
                st.sampled_from(["z", "z2", "z/", "(3", "~", "[ceg]", '"Am"', "$"]),
            ),
            min_size=1,
            max_size=6,
        )
    )
    return " ".join(tokens)


@st.composite
def tune_source(draw) -> str:
    meter = draw(st.sampled_from(["4/4", "6/8", "3/4", "2/4", "C", "9/8"]))
    unit = draw(st.sampled_from(["", "L:1/8\n", "L:1/16\n", "L:1/4\n"]))
    key = draw(st.sampled_from(["C", "D", "Ddor", "Gm", "Amix", "F#min", "Bb"]))
    bars = draw(st.lists(_bar_tokens(), min_size=1, max_size=8))
    closing = draw(st.sampled_from(["|", ":|", "|]", "||"]))
    body = "|".join(bars) + closing
    return f"X:1\nT:Generated\nM:{meter}\n{unit}K:{key}\n{body}"


@settings(max_examples=120, deadline=None)
@given(tune_source())
def test_parse_serialize_parse_round_trip(source):
    tune = parse_tune(source)
    assert parse_tune(serialize(tune)) == tune


@settings(max_examples=120, deadline=None)
@given(tune_source())
def test_normalize_idempotent(source):
    once = normalize(parse_tune(source))
    assert normalize(parse_tune(once)) == once


@settings(max_examples=80, deadline=None)
@given(tune_source())
def test_bar_fill_never_negative(source):
    tune = parse_tune(source)
    unit = tune.effective_unit_length
    for bar in tune.body:
        assert bar_fill(bar, unit) >= 0


@settings(max_examples=80, deadline=None)
@given(tune_source())
def test_validate_deterministic(source):
    tune = parse_tune(source)
    assert validate(tune) == validate(tune)
