"""Drive a full two-turn composition dialogue against scripted models.

Runs offline: both model roles are MockBackends with canned replies, so
the retrieval -> few-shot prompt -> compose -> validate loop is visible
end to end without any network access. Swap the backends for HttpBackend
instances (see demos/README.md) to talk to a live endpoint.
"""

import json
import tempfile
from pathlib import Path

from tunesmith import (
    DialogueEngine,
    FieldMapping,
    MockBackend,
    ModelConfig,
    export_transcript,
    ingest,
    read_dump,
)

RECORDS = [
    {
        "ref": "E1",
        "name": "The Dorian Jig",
        "kind": "jig",
        "key": "Ddorian",
        "time": "6/8",
        "tune": "|:A|dAF DAF|GAG Aag|dAF DAF|Ffe e2a|"
                "dAF DAF|GAG Aag|faf dBA|Bdf d2:|",
    },
    {
        "ref": "E2",
        "name": "The Major Reel",
        "kind": "reel",
        "key": "Gmajor",
        "time": "4/4",
        "tune": "GABc dedB|dedB dedB|c2ec B2dB|A2A2 A4:|",
    },
    {
        "ref": "E3",
        "name": "The Plain Jig",
        "kind": "jig",
        "time": "6/8",
        "tune": "FAA dAA|BAB dfe|dBB AFA|BEE E2D|"
                "FAA dAA|BAB def|gfe dBA|BEE E3|",
    },
]

MAPPING = FieldMapping(
    abc="tune", type="kind", mode="key", meter="time", title="name", id="ref"
)

FIRST_REPLY = """\
This will be a lively jig in the dorian mode, in the style of the examples.

```
X:1
T:A Fresh Jig
M:6/8
L:1/8
K:Ddor
|:A|dAF DAF|GAG Aag|dAF DAF|Ffe e2a|dAF DAF|GAG Aag|faf dBA|Bdf d2:|
```

Eight bars with a pickup, resolving back to the tonic."""

SECOND_REPLY = """\
Here it is recast as a polka: duple time, crisp two-bar phrases.

```
X:1
T:A Fresh Polka
M:2/4
L:1/8
K:Ddor
dA FA|GA Bc|dA FA|GE E2|dA FA|GA Bc|df ec|d2 d2|
```

Every bar now carries exactly two crotchets of melody."""


def describe(turn) -> None:
    print(f"  tags extracted : {sorted(turn.tags)}")
    print(f"  examples used  : {[c.entry_id for c in turn.candidates]}")
    print(f"  commentary     : {turn.commentary.splitlines()[0]}")
    if turn.tune is not None:
        print(f"  tune           : {turn.tune.header.title!r}, "
              f"{len(turn.tune.body)} bars in {turn.tune.header.meter.to_abc()}")
    else:
        print("  tune           : none produced")
    print(f"  issues         : {[i.code.value for i in turn.issues] or 'clean'}")
    print(f"  duplicate of   : {turn.duplicate_of}")
    print()


def main() -> None:
    with tempfile.TemporaryDirectory() as scratch:
        dump = Path(scratch) / "tunes.jsonl"
        dump.write_text(
            "".join(json.dumps(record) + "\n" for record in RECORDS),
            encoding="utf-8",
        )
        index, report = ingest(read_dump(dump), MAPPING)
        print(f"corpus: {report.summary()}")
        print()

    engine = DialogueEngine(
        index=index,
        retrieval_backend=MockBackend(replies=["{jig, dorian}", "{polka}"]),
        composer_backend=MockBackend(replies=[FIRST_REPLY, SECOND_REPLY]),
        retrieval_model=ModelConfig(endpoint="mock://", model="tagger"),
        composer_model=ModelConfig(endpoint="mock://", model="composer"),
    )
    session = engine.new_session()

    print('turn 1: "Generate a piece of irish folk music"')
    describe(engine.handle_request(session, "Generate a piece of irish folk music"))

    print('turn 2: "Turn this tune into a polka"')
    describe(engine.handle_request(session, "Turn this tune into a polka"))

    print(f"transcript: {len(session.transcript)} messages "
          f"({session.turn_count} turns); full text follows")
    print("-" * 60)
    print(export_transcript(session), end="")


if __name__ == "__main__":
    main()
