"""Ingest a tiny tune dump, persist the index, and rank tag queries.

Runs offline; builds its own three-tune corpus in a temp directory.
"""

import json
import tempfile
from pathlib import Path

from tunesmith import FieldMapping, ingest, load_index, rank, read_dump, save_index
from tunesmith.retrieval import RetrievalConfig, fraction_to_decimal

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


def main() -> None:
    with tempfile.TemporaryDirectory() as scratch:
        dump = Path(scratch) / "tunes.jsonl"
        dump.write_text(
            "".join(json.dumps(record) + "\n" for record in RECORDS),
            encoding="utf-8",
        )

        index, report = ingest(read_dump(dump), MAPPING)
        print(f"ingest      : {report.summary()}")
        for message in report.messages:
            print(f"  note: {message}")

        print("vocabulary  :")
        for family, tags in index.vocabulary_by_family.items():
            print(f"  {family}: {', '.join(tags)}")
        print()

        index_path = Path(scratch) / "tunes.index.json"
        save_index(index, index_path)
        index = load_index(index_path)  # survives a disk round trip
        print(f"persisted to {index_path.name} and reloaded")
        print()

        for query in ({"jig", "reel", "dorian"}, {"jig"}, {"polka"}):
            ranked = rank(frozenset(query), index, RetrievalConfig(k=3))
            print(f"query {sorted(query)}:")
            if not ranked:
                print("  (no overlapping entries)")
            for hit in ranked:
                title = index.entries[hit.entry_id].title
                print(f"  {hit.entry_id}  {fraction_to_decimal(hit.similarity)}"
                      f"  {title}  matched={sorted(hit.matched_tags)}")
            print()


if __name__ == "__main__":
    main()
