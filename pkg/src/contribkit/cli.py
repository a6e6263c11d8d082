"""Command-line interface.

Exit codes: 0 ok, 1 validation failure, 2 IO/usage errors.  The store
directory defaults to the CONTRIBKIT_STORE environment variable.
"""
from __future__ import annotations

import sys
from pathlib import Path

import click

from . import analytics, ingest
from .model import UnitKind, canonicalize_unit
from .store import ContributionGraph, FormatVersionError
from .triplify import FORMATS, InvalidDocumentError, export, flatten

STORE_OPTION = click.option(
    "--store",
    "store_dir",
    envvar="CONTRIBKIT_STORE",
    required=True,
    type=click.Path(file_okay=False, path_type=Path),
    help="Store directory (or set CONTRIBKIT_STORE).",
)


@click.group()
def main() -> None:
    """Validate, triplify and analyse contribution-annotation files."""


def _read(path: Path) -> bytes:
    try:
        return path.read_bytes()
    except OSError as exc:
        raise click.ClickException(str(exc)) from exc


def _parse_file(path: Path) -> ingest.ParseResult:
    return ingest.parse_document(
        _read(path), default_paper_id=path.stem, source_uri=str(path)
    )


@main.command("validate")
@click.argument("paths", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--strict", is_flag=True, help="Treat warnings as failures.")
def cli_validate(paths: tuple[Path, ...], strict: bool) -> None:
    """Check annotation files and print one diagnostic per line."""
    failed = False
    for path in paths:
        result = _parse_file(path)
        for diag in result.diagnostics:
            click.echo(f"{diag.severity.value}\t{diag.code.value}\t{path}\t{diag.path}\t{diag.message}")
            if diag.severity is ingest.Severity.ERROR or strict:
                failed = True
    sys.exit(1 if failed else 0)


@main.command("triplify")
@click.argument("paths", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--format", "fmt", type=click.Choice(FORMATS), default="csv", show_default=True)
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), default=Path("."), show_default=True)
@click.option(
    "--allow-incomplete",
    is_flag=True,
    help="Triplify single-unit extracts that lack other mandatory units.",
)
def cli_triplify(paths: tuple[Path, ...], fmt: str, out: Path, allow_incomplete: bool) -> None:
    """Flatten files to triples; one output file per input, stable names."""
    extensions = {"ntriples": ".nt", "csv": ".csv", "jsonl": ".jsonl"}
    ignore = (
        frozenset({ingest.Code.MISSING_MANDATORY_UNIT}) if allow_incomplete else frozenset()
    )
    failed = False
    out.mkdir(parents=True, exist_ok=True)
    for path in paths:
        result = _parse_file(path)
        blocking = [
            d
            for d in result.diagnostics
            if d.severity is ingest.Severity.ERROR and d.code not in ignore
        ]
        if result.document is None or blocking:
            failed = True
            for diag in blocking or result.diagnostics:
                click.echo(f"INVALID_DOCUMENT\t{path}\t{diag.code.value}\t{diag.path}\t{diag.message}", err=True)
            continue
        triples = flatten(result.document, check=False)
        target = out / (path.stem + extensions[fmt])
        target.write_bytes(export(triples, fmt))
        click.echo(f"{path} -> {target} ({len(triples)} triples)")
    sys.exit(1 if failed else 0)


@main.command("ingest")
@STORE_OPTION
@click.argument("paths", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
def cli_ingest(store_dir: Path, paths: tuple[Path, ...]) -> None:
    """Add annotation files to the store (replacing same paper ids)."""
    graph = _load_graph(store_dir)
    failed = False
    for path in paths:
        result = _parse_file(path)
        if result.document is None or ingest.has_errors(result.diagnostics):
            failed = True
            for diag in result.diagnostics:
                if diag.severity is ingest.Severity.ERROR:
                    click.echo(f"INVALID_DOCUMENT\t{path}\t{diag.code.value}\t{diag.path}\t{diag.message}", err=True)
            continue
        report = graph.ingest(result.document)
        verb = "replaced" if report.replaced else "ingested"
        click.echo(f"{verb} {report.paper_id}: {report.triple_count} triples")
    graph.save(store_dir)
    click.echo(f"store: {len(graph.papers)} papers, {len(graph)} triples")
    sys.exit(1 if failed else 0)


def _load_graph(store_dir: Path) -> ContributionGraph:
    try:
        return ContributionGraph.load(store_dir)
    except FormatVersionError as exc:
        raise click.ClickException(str(exc)) from exc


def _parse_unit(unit: str) -> UnitKind:
    kind = canonicalize_unit(unit)
    if kind is None:
        raise click.ClickException(f"unknown unit {unit!r}")
    return kind


@main.command("stats")
@STORE_OPTION
@click.option("--min-count", default=0, show_default=True)
@click.option("--exclude-root/--include-root", default=True, show_default=True)
@click.option("--exclude-evidence/--include-evidence", default=True, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["md", "csv", "json"]), default="md", show_default=True)
@click.option("--figure", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Also render a predicate-frequency chart to this file.")
@click.option("--task-figure", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Also render a per-task unique-triples chart to this file.")
def cli_stats(store_dir, min_count, exclude_root, exclude_evidence, fmt, figure, task_figure) -> None:
    """Corpus statistics: unique S/P/O counts and predicate frequencies."""
    graph = _load_graph(store_dir)
    report = analytics.stats(
        graph, min_count=min_count, exclude_root=exclude_root, exclude_evidence=exclude_evidence
    )
    if fmt == "md":
        click.echo(analytics.stats_to_markdown(report), nl=False)
    elif fmt == "csv":
        click.echo(analytics.stats_to_csv(report), nl=False)
    else:
        click.echo(analytics.stats_to_json(report), nl=False)
    if figure is not None:
        from .figures import render_predicate_frequencies

        render_predicate_frequencies(report, figure)
        click.echo(f"figure written to {figure}", err=True)
    if task_figure is not None:
        from .figures import render_task_totals

        render_task_totals(report, task_figure)
        click.echo(f"figure written to {task_figure}", err=True)


@main.command("compare")
@STORE_OPTION
@click.option("--unit", required=True)
@click.option("--ids", required=True, help="Comma-separated paper ids.")
@click.option("--min-common", default=2, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["md", "csv", "json"]), default="md", show_default=True)
def cli_compare(store_dir, unit, ids, min_common, fmt) -> None:
    """Cross-paper comparison table over common unit properties."""
    import json as json_mod

    graph = _load_graph(store_dir)
    paper_ids = [pid.strip() for pid in ids.split(",") if pid.strip()]
    try:
        table = analytics.compare(graph, _parse_unit(unit), paper_ids, min_common=min_common)
    except analytics.UnknownPaperError as exc:
        raise click.ClickException(f"unknown paper {exc.args[0]!r}")
    if fmt == "md":
        click.echo(analytics.comparison_to_markdown(table), nl=False)
    elif fmt == "csv":
        click.echo(analytics.comparison_to_csv(table), nl=False)
    else:
        click.echo(json_mod.dumps(analytics.comparison_to_dict(table), ensure_ascii=False, indent=2))


@main.command("export")
@STORE_OPTION
@click.option("--format", "fmt", type=click.Choice(FORMATS), default="jsonl", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), required=True)
@click.option("--paper", "paper_id", default=None, help="Restrict to one paper.")
def cli_export(store_dir, fmt, out, paper_id) -> None:
    """Export stored triples to N-Triples, CSV or JSONL."""
    graph = _load_graph(store_dir)
    triples = graph.query(paper_id=paper_id) if paper_id else graph.triples
    out.write_bytes(export(triples, fmt))
    click.echo(f"wrote {len(triples)} triples to {out}")


@main.command("serve")
@STORE_OPTION
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8040, show_default=True)
def cli_serve(store_dir, host, port) -> None:
    """Run the HTTP service over a store directory."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(store_dir), host=host, port=port)


if __name__ == "__main__":
    main()
