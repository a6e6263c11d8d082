"""Cross-paper comparison tables and corpus statistics."""
from __future__ import annotations

import csv
import io
import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .model import TaskLabel, Triple, UnitKind
from .store import ContributionGraph

EVIDENCE_PREDICATE = "from sentence"


class UnknownPaperError(KeyError):
    pass


@dataclass(frozen=True)
class ComparisonTable:
    """Papers x common-properties matrix for one information unit.

    Columns are first-level properties under the unit (root-attachment
    "has" plus the predicates of first-level bindings) shared by at
    least ``min_common`` of the selected papers, ordered by descending
    support then lexicographically.  Cells keep per-paper object order.
    """

    unit: UnitKind
    paper_ids: tuple[str, ...]
    columns: tuple[str, ...]
    cells: dict[str, dict[str, tuple[str, ...]]]  # paper_id -> column -> values
    min_common: int = 2

    def row(self, paper_id: str) -> list[tuple[str, ...]]:
        return [self.cells[paper_id].get(col, ()) for col in self.columns]


def _first_level_properties(triples: Sequence[Triple]) -> dict[str, list[str]]:
    """Property -> objects map over one paper's unit triples.

    First level means path length 2 (explicit root attachments, as the
    "has" property) or 4 (direct bindings off a root or collapsed unit
    label).
    """
    props: dict[str, list[str]] = defaultdict(list)
    for t in triples:
        if len(t.path) in (2, 4):
            props[t.predicate].append(t.object)
    return props


def compare(
    graph: ContributionGraph,
    unit: UnitKind,
    paper_ids: Sequence[str],
    min_common: int = 2,
) -> ComparisonTable:
    """Tabulate the unit's properties shared across the selected papers."""
    for pid in paper_ids:
        if pid not in graph.papers:
            raise UnknownPaperError(pid)

    per_paper: dict[str, dict[str, list[str]]] = {}
    for pid in paper_ids:
        per_paper[pid] = _first_level_properties(graph.query(paper_id=pid, unit=unit))

    support = Counter()
    for props in per_paper.values():
        for prop, values in props.items():
            if values:
                support[prop] += 1
    columns = tuple(
        sorted((p for p, n in support.items() if n >= min_common), key=lambda p: (-support[p], p))
    )
    cells = {
        pid: {col: tuple(props.get(col, ())) for col in columns if props.get(col)}
        for pid, props in per_paper.items()
    }
    return ComparisonTable(
        unit=unit,
        paper_ids=tuple(paper_ids),
        columns=columns,
        cells=cells,
        min_common=min_common,
    )


@dataclass(frozen=True)
class StatsBucket:
    total_triples: int = 0
    unique_triples: int = 0
    unique_subjects: int = 0
    unique_predicates: int = 0
    unique_objects: int = 0


@dataclass(frozen=True)
class StatsReport:
    overall: StatsBucket
    per_task: dict[TaskLabel, StatsBucket]
    predicate_frequencies: dict[str, int]
    min_count: int = 0
    exclude_root: bool = True
    exclude_evidence: bool = True


def _bucket(rows: list[tuple[str, str, str]]) -> StatsBucket:
    return StatsBucket(
        total_triples=len(rows),
        unique_triples=len(set(rows)),
        unique_subjects=len({s for s, _, _ in rows}),
        unique_predicates=len({p for _, p, _ in rows}),
        unique_objects=len({o for _, _, o in rows}),
    )


def stats(
    graph: ContributionGraph,
    min_count: int = 0,
    *,
    exclude_root: bool = True,
    exclude_evidence: bool = True,
) -> StatsReport:
    """Unique S/P/O counts and predicate frequencies, overall and per task.

    ``exclude_root`` drops the synthetic Contribution-to-unit
    attachments.  With ``exclude_evidence=False``, evidence spans are
    counted as synthetic ``(node, "from sentence", sentence)``
    statements, once per carrying node.
    """
    rows: list[tuple[str, str, str]] = []
    tasks: list[TaskLabel] = []
    papers = graph.papers

    def task_of(paper_id: str) -> TaskLabel:
        record = papers.get(paper_id)
        return record.task_label if record else TaskLabel.OTHER

    for t in graph:
        task = task_of(t.paper_id)
        if not (exclude_root and len(t.path) == 1):
            rows.append((t.subject, t.predicate, t.object))
            tasks.append(task)
        if not exclude_evidence:
            # Each node is the object of exactly one triple, so
            # object-side spans count each attachment exactly once.
            for span in t.object_evidence:
                rows.append((t.object, EVIDENCE_PREDICATE, span.sentence))
                tasks.append(task)

    per_task_rows: dict[TaskLabel, list[tuple[str, str, str]]] = defaultdict(list)
    for row, task in zip(rows, tasks):
        per_task_rows[task].append(row)

    frequencies = Counter(p for _, p, _ in rows)
    if min_count > 0:
        frequencies = Counter({p: n for p, n in frequencies.items() if n > min_count})
    ordered = dict(sorted(frequencies.items(), key=lambda kv: (-kv[1], kv[0])))

    return StatsReport(
        overall=_bucket(rows),
        per_task={task: _bucket(task_rows) for task, task_rows in sorted(per_task_rows.items(), key=lambda kv: kv[0].value)},
        predicate_frequencies=ordered,
        min_count=min_count,
        exclude_root=exclude_root,
        exclude_evidence=exclude_evidence,
    )


# ---------------------------------------------------------------------------
# rendering


def comparison_to_markdown(table: ComparisonTable) -> str:
    header = ["paper"] + list(table.columns)
    lines = ["| " + " | ".join(header) + " |", "| " + " | ".join("---" for _ in header) + " |"]
    for pid in table.paper_ids:
        cells = ["; ".join(values) for values in table.row(pid)]
        lines.append("| " + " | ".join([pid] + cells) + " |")
    return "\n".join(lines) + "\n"


def comparison_to_csv(table: ComparisonTable) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(["paper"] + list(table.columns))
    for pid in table.paper_ids:
        writer.writerow([pid] + ["; ".join(values) for values in table.row(pid)])
    return buffer.getvalue()


def comparison_to_dict(table: ComparisonTable) -> dict:
    return {
        "unit": table.unit.value,
        "min_common": table.min_common,
        "columns": list(table.columns),
        "rows": [
            {
                "paper": pid,
                "cells": {col: list(values) for col, values in table.cells[pid].items()},
            }
            for pid in table.paper_ids
        ],
    }


def _bucket_to_dict(bucket: StatsBucket) -> dict:
    return {
        "total_triples": bucket.total_triples,
        "unique_triples": bucket.unique_triples,
        "unique_subjects": bucket.unique_subjects,
        "unique_predicates": bucket.unique_predicates,
        "unique_objects": bucket.unique_objects,
    }


def stats_to_dict(report: StatsReport) -> dict:
    return {
        "overall": _bucket_to_dict(report.overall),
        "per_task": {task.value: _bucket_to_dict(b) for task, b in report.per_task.items()},
        "predicate_frequencies": dict(report.predicate_frequencies),
        "min_count": report.min_count,
        "exclude_root": report.exclude_root,
        "exclude_evidence": report.exclude_evidence,
    }


def stats_to_json(report: StatsReport) -> str:
    return json.dumps(stats_to_dict(report), ensure_ascii=False, indent=2) + "\n"


def stats_to_markdown(report: StatsReport) -> str:
    lines = [
        "| partition | total | unique | subjects | predicates | objects |",
        "| --- | --- | --- | --- | --- | --- |",
    ]

    def row(name: str, b: StatsBucket) -> str:
        return (
            f"| {name} | {b.total_triples} | {b.unique_triples} | "
            f"{b.unique_subjects} | {b.unique_predicates} | {b.unique_objects} |"
        )

    lines.append(row("overall", report.overall))
    for task, bucket in report.per_task.items():
        lines.append(row(task.value, bucket))
    if report.predicate_frequencies:
        lines.append("")
        lines.append("| predicate | count |")
        lines.append("| --- | --- |")
        for predicate, count in report.predicate_frequencies.items():
            lines.append(f"| {predicate} | {count} |")
    return "\n".join(lines) + "\n"


def stats_to_csv(report: StatsReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(
        ["partition", "total_triples", "unique_triples", "unique_subjects", "unique_predicates", "unique_objects"]
    )
    b = report.overall
    writer.writerow(["overall", b.total_triples, b.unique_triples, b.unique_subjects, b.unique_predicates, b.unique_objects])
    for task, bucket in report.per_task.items():
        writer.writerow(
            [task.value, bucket.total_triples, bucket.unique_triples, bucket.unique_subjects, bucket.unique_predicates, bucket.unique_objects]
        )
    return buffer.getvalue()
