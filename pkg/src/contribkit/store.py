"""File-backed multi-paper contribution graph.

The store is a single directory holding ``manifest.json`` (format tag,
version, paper records) and ``triples.jsonl`` (one triple per line, in
ingest order).  Ingesting a paper_id twice atomically replaces the
prior paper's triples.  Writes go through temp files + rename so a
failed save never corrupts an existing store.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional, Union

from .model import AnnotationDocument, PaperRecord, TaskLabel, Triple, UnitKind
from .triplify import flatten, triple_from_dict, triple_to_dict

FORMAT_TAG = "contribkit-graph"
FORMAT_VERSION = 1

MANIFEST_FILE = "manifest.json"
TRIPLES_FILE = "triples.jsonl"


class FormatVersionError(ValueError):
    """Store was written with an unknown format tag or version."""


@dataclass(frozen=True)
class IngestReport:
    paper_id: str
    triple_count: int
    replaced: bool


class ContributionGraph:
    """In-memory triple store with per-paper replacement semantics.

    Single writer, any number of readers; all query results are plain
    lists over immutable triples.
    """

    def __init__(self) -> None:
        self._papers: dict[str, PaperRecord] = {}
        self._triples: list[Triple] = []
        self._by_paper: dict[str, list[int]] = {}
        self._by_unit: dict[UnitKind, list[int]] = {}
        self._by_predicate: dict[str, list[int]] = {}
        self._by_subject: dict[str, list[int]] = {}

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    @property
    def papers(self) -> dict[str, PaperRecord]:
        return dict(self._papers)

    @property
    def triples(self) -> list[Triple]:
        return list(self._triples)

    def _reindex(self) -> None:
        self._by_paper = {}
        self._by_unit = {}
        self._by_predicate = {}
        self._by_subject = {}
        for i, t in enumerate(self._triples):
            self._by_paper.setdefault(t.paper_id, []).append(i)
            if t.unit.canonical is not None:
                self._by_unit.setdefault(t.unit.canonical, []).append(i)
            self._by_predicate.setdefault(t.predicate, []).append(i)
            self._by_subject.setdefault(t.subject, []).append(i)

    def ingest(self, doc: AnnotationDocument) -> IngestReport:
        """Flatten and store a document; replaces any prior version.

        Validation failures raise before the graph is touched, so a
        failed ingest leaves the store unchanged.
        """
        triples = flatten(doc)
        paper_id = doc.paper.paper_id
        if not paper_id:
            raise ValueError("document has no paper id")
        replaced = paper_id in self._papers
        if replaced:
            self._triples = [t for t in self._triples if t.paper_id != paper_id]
        self._papers[paper_id] = doc.paper
        self._triples.extend(triples)
        self._reindex()
        return IngestReport(paper_id=paper_id, triple_count=len(triples), replaced=replaced)

    def ingest_triples(self, paper: PaperRecord, triples: list[Triple]) -> IngestReport:
        """Store pre-flattened triples (used by load and bulk import)."""
        replaced = paper.paper_id in self._papers
        if replaced:
            self._triples = [t for t in self._triples if t.paper_id != paper.paper_id]
        self._papers[paper.paper_id] = paper
        self._triples.extend(triples)
        self._reindex()
        return IngestReport(paper.paper_id, len(triples), replaced)

    def query(
        self,
        paper_id: Optional[str] = None,
        unit: Optional[UnitKind] = None,
        predicate: Optional[str] = None,
        subject: Optional[str] = None,
    ) -> list[Triple]:
        """Conjunctive exact-match filter, in stable ingest order."""
        candidates: Optional[list[int]] = None
        if paper_id is not None:
            candidates = self._by_paper.get(paper_id, [])
        elif unit is not None:
            candidates = self._by_unit.get(unit, [])
        elif predicate is not None:
            candidates = self._by_predicate.get(predicate, [])
        elif subject is not None:
            candidates = self._by_subject.get(subject, [])
        if candidates is None:
            candidates = range(len(self._triples))

        result = []
        for i in candidates:
            t = self._triples[i]
            if paper_id is not None and t.paper_id != paper_id:
                continue
            if unit is not None and t.unit.canonical is not unit:
                continue
            if predicate is not None and t.predicate != predicate:
                continue
            if subject is not None and t.subject != subject:
                continue
            result.append(t)
        return result

    def save(self, location: Union[str, Path]) -> None:
        directory = Path(location)
        directory.mkdir(parents=True, exist_ok=True)
        manifest = {
            "format": FORMAT_TAG,
            "version": FORMAT_VERSION,
            "papers": [
                {
                    "id": p.paper_id,
                    "title": p.title,
                    "task": p.task_label.value,
                    "source_uri": p.source_uri,
                }
                # Manifest order mirrors first-ingest order of papers.
                for p in self._papers.values()
            ],
        }
        _atomic_write(
            directory / MANIFEST_FILE,
            json.dumps(manifest, ensure_ascii=False, indent=2).encode("utf-8"),
        )
        lines = [
            json.dumps(triple_to_dict(t), ensure_ascii=False, separators=(",", ":")) + "\n"
            for t in self._triples
        ]
        _atomic_write(directory / TRIPLES_FILE, "".join(lines).encode("utf-8"))

    @classmethod
    def load(cls, location: Union[str, Path]) -> "ContributionGraph":
        directory = Path(location)
        graph = cls()
        manifest_path = directory / MANIFEST_FILE
        if not manifest_path.exists():
            return graph
        manifest = json.loads(manifest_path.read_text("utf-8"))
        if manifest.get("format") != FORMAT_TAG or manifest.get("version") != FORMAT_VERSION:
            raise FormatVersionError(
                f"unsupported store format {manifest.get('format')!r} "
                f"version {manifest.get('version')!r}"
            )
        for raw in manifest.get("papers", []):
            graph._papers[raw["id"]] = PaperRecord(
                paper_id=raw["id"],
                title=raw.get("title", ""),
                task_label=TaskLabel(raw.get("task", "OTHER")),
                source_uri=raw.get("source_uri"),
            )
        triples_path = directory / TRIPLES_FILE
        if triples_path.exists():
            with triples_path.open("r", encoding="utf-8") as handle:
                for line in handle:
                    line = line.strip()
                    if line:
                        graph._triples.append(triple_from_dict(json.loads(line)))
        graph._reindex()
        return graph


def _atomic_write(path: Path, payload: bytes) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(payload)
    os.replace(tmp, path)
