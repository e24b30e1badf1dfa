"""Command line entry points.

Exit codes: 0 success, 1 usage error (bad flags/arguments, help printed
to stderr), 2 runtime error (bad config, unreadable files, upstream
failures, validation errors found).
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import corpus as corpus_mod
from .config import load_config, make_backend
from .dialogue import DialogueEngine
from .errors import TunesmithError
from .notation import Severity, parse_tune, validate
from .retrieval import RetrievalConfig, fraction_to_decimal, rank

__all__ = ["cli", "main"]


class _RuntimeFailure(click.ClickException):
    exit_code = 2


@click.group()
def cli() -> None:
    """Retrieval-assisted folk tune composition over a tagged abc corpus."""


@cli.command()
@click.argument("dump", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option(
    "--mapping",
    "mapping_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="JSON file mapping dump field names to roles (abc, type, mode, meter, title, id).",
)
@click.option(
    "--out",
    "out_path",
    required=True,
    type=click.Path(dir_okay=False, path_type=Path),
    help="Where to write the index file.",
)
def ingest(dump: Path, mapping_path: Path, out_path: Path) -> None:
    """Build a corpus index from a JSONL dump."""
    mapping = corpus_mod.FieldMapping.from_file(mapping_path)
    index, report = corpus_mod.ingest(corpus_mod.read_dump(dump), mapping)
    corpus_mod.save_index(index, out_path)
    click.echo(report.summary())
    for message in report.messages:
        click.echo(f"  {message}")
    click.echo(f"index written to {out_path}")


@cli.command()
@click.option(
    "--config",
    "config_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
)
def serve(config_path: Path) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service import app_from_config

    cfg = load_config(config_path)
    app = app_from_config(cfg)
    uvicorn.run(app, host=cfg.service.host, port=cfg.service.port, log_level="info")


@cli.command()
@click.option(
    "--config",
    "config_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
)
def chat(config_path: Path) -> None:
    """Interactive terminal dialogue with the composer."""
    cfg = load_config(config_path)
    index = corpus_mod.load_index(cfg.index_path)
    backend = make_backend(cfg.backend)
    engine = DialogueEngine(
        index=index,
        retrieval_backend=backend,
        composer_backend=backend,
        retrieval_model=cfg.retrieval_model,
        composer_model=cfg.composer_model,
        retrieval_cfg=RetrievalConfig(k=cfg.k),
        max_turns=cfg.max_turns,
        templates=cfg.load_templates(),
    )
    session = engine.new_session()
    click.echo(f"session {session.id} — describe the tune you want (blank line quits)")
    while True:
        try:
            text = click.prompt("you", prompt_suffix="> ", default="", show_default=False)
        except (EOFError, click.Abort):
            break
        if not text.strip():
            break
        result = engine.handle_request(session, text)
        if result.candidates:
            titles = ", ".join(
                index.entries[c.entry_id].title or c.entry_id
                for c in result.candidates
            )
            click.echo(f"[examples: {titles}]")
        click.echo(result.commentary)
        if result.tune_text and result.tune is not None:
            click.echo()
            click.echo(result.tune_text)
            for issue in result.issues:
                click.echo(f"  {issue.severity.value}: {issue.detail}")
            if result.duplicate_of:
                click.echo(f"  warning: duplicates corpus entry {result.duplicate_of}")
        else:
            click.echo("(no tune produced this turn)")
    click.echo("bye")


@cli.command("validate")
@click.argument("abc_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
def validate_cmd(abc_file: Path) -> None:
    """Check an abc file for structural problems; exit 2 if errors found."""
    tune = parse_tune(abc_file.read_text(encoding="utf-8"))
    issues = validate(tune)
    for issue in issues:
        where = f" (bar {issue.bar_index})" if issue.bar_index is not None else ""
        click.echo(f"{issue.severity.value}: {issue.code.value}{where}: {issue.detail}")
    if not issues:
        click.echo("no issues")
    if any(i.severity is Severity.ERROR for i in issues):
        raise _RuntimeFailure("validation errors found")


@cli.command()
@click.option("--index", "index_path", required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--tags", "tags_csv", required=True,
              help="Comma-separated query tags, e.g. jig,dorian.")
@click.option("--k", default=3, show_default=True, type=click.IntRange(min=1))
def retrieve(index_path: Path, tags_csv: str, k: int) -> None:
    """Rank corpus entries against a tag query (no model calls)."""
    index = corpus_mod.load_index(index_path)
    tags = frozenset(
        t for t in (corpus_mod.normalize_tag(p) for p in tags_csv.split(",")) if t
    )
    for candidate in rank(tags, index, RetrievalConfig(k=k)):
        entry = index.entries[candidate.entry_id]
        matched = ", ".join(sorted(candidate.matched_tags))
        click.echo(
            f"{candidate.entry_id}\t{fraction_to_decimal(candidate.similarity)}"
            f"\t{entry.title or ''}\t[{matched}]"
        )


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        return 1
    except _RuntimeFailure as exc:
        exc.show(file=sys.stderr)
        return 2
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        return 1
    except click.Abort:
        return 1
    except TunesmithError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
