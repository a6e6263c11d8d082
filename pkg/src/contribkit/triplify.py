"""Deterministic flattening of documents into triples, and back.

Emission order is depth-first document order:

* ``("Contribution", root_predicate(kind), unit label)`` per unit;
* ``(unit label, "has", root label)`` per explicit sequence root —
  omitted for collapsed units, whose bindings hang directly off the
  unit label;
* ``(entity, predicate, target)`` for every binding, recursing into the
  target right after emitting it.  Array targets fan out into one
  triple each, sharing subject and predicate.

Exports are byte-deterministic for a given triple order.
"""
from __future__ import annotations

import csv
import io
import json
import urllib.parse
from typing import Iterable, Optional, Sequence

from . import ingest
from .model import (
    AnnotationDocument,
    EvidenceSpan,
    InfoUnit,
    PaperRecord,
    PredicateEdge,
    SequenceNode,
    Triple,
    UnitBlock,
    UnitKind,
    root_predicate,
)

DEFAULT_BASE_IRI = "https://example.org/contribkit"

#: Objects longer than this containing whitespace are emitted as
#: N-Triples literals instead of IRIs (clausal sentence parts).
LITERAL_THRESHOLD = 80

FORMATS = ("ntriples", "csv", "jsonl")


class InvalidDocumentError(ValueError):
    """Raised when a document with blocking diagnostics is flattened."""

    def __init__(self, diagnostics):
        self.diagnostics = diagnostics
        super().__init__(
            "document has blocking diagnostics: "
            + "; ".join(str(d) for d in diagnostics)
        )


class InconsistentPathsError(ValueError):
    """Raised when triple paths conflict or a parent path is missing."""


def flatten(
    doc: AnnotationDocument,
    *,
    check: bool = True,
    ignore_codes: frozenset = frozenset(),
) -> list[Triple]:
    """Flatten a document into its triples.

    With ``check`` (the default) the document is validated first and
    any ERROR diagnostic raises :class:`InvalidDocumentError`;
    ``ignore_codes`` exempts specific codes (used e.g. to triplify
    single-unit extracts that lack the other mandatory units).
    """
    if check:
        blocking = [
            d
            for d in ingest.validate(doc)
            if d.severity is ingest.Severity.ERROR and d.code not in ignore_codes
        ]
        if blocking:
            raise InvalidDocumentError(blocking)

    triples: list[Triple] = []
    paper_id = doc.paper.paper_id

    def emit_bindings(node: SequenceNode, base: tuple[int, ...], unit: InfoUnit) -> None:
        for e, edge in enumerate(node.edges):
            for t, target in enumerate(edge.targets):
                path = base + (e, t)
                triples.append(
                    Triple(
                        subject=node.label,
                        predicate=edge.predicate,
                        object=target.label,
                        unit=unit,
                        paper_id=paper_id,
                        path=path,
                        evidence=node.evidence,
                        object_evidence=target.evidence,
                        object_role=target.role,
                        object_table=target.table_ref,
                    )
                )
                emit_bindings(target, path, unit)

    for u, block in enumerate(doc.units):
        if block.unit.canonical is None:
            continue
        label = block.unit.display_label
        pseudo = block.roots[0] if block.collapsed and block.roots else None
        triples.append(
            Triple(
                subject="Contribution",
                predicate=root_predicate(block.unit.canonical),
                object=label,
                unit=block.unit,
                paper_id=paper_id,
                path=(u,),
                object_evidence=pseudo.evidence if pseudo else (),
                object_role=pseudo.role if pseudo else None,
                object_table=pseudo.table_ref if pseudo else None,
            )
        )
        for r, root in enumerate(block.roots):
            if block.collapsed:
                emit_bindings(root, (u, r), block.unit)
            else:
                triples.append(
                    Triple(
                        subject=label,
                        predicate="has",
                        object=root.label,
                        unit=block.unit,
                        paper_id=paper_id,
                        path=(u, r),
                        object_evidence=root.evidence,
                        object_role=root.role,
                        object_table=root.table_ref,
                    )
                )
                emit_bindings(root, (u, r), block.unit)
    return triples


class _NodeBuilder:
    __slots__ = ("label", "evidence", "edges", "role", "table")

    def __init__(self, label, evidence=(), role=None, table=None):
        self.label = label
        self.evidence = evidence
        self.edges: list[tuple[str, list["_NodeBuilder"]]] = []
        self.role = role
        self.table = table

    def freeze(self) -> SequenceNode:
        return SequenceNode(
            self.label,
            evidence=tuple(self.evidence),
            edges=tuple(
                PredicateEdge(pred, tuple(t.freeze() for t in targets))
                for pred, targets in self.edges
            ),
            role=self.role,
            table_ref=self.table,
        )


def unflatten(
    triples: Sequence[Triple], *, paper: Optional[PaperRecord] = None
) -> AnnotationDocument:
    """Rebuild a document tree from its triples using their paths.

    ``unflatten(flatten(doc))`` is structurally equal to the canonical
    (trimmed) form of ``doc``.  Paper metadata beyond the id is not
    carried by triples; pass ``paper`` to restore it.
    """
    if not triples:
        return AnnotationDocument(paper=paper or PaperRecord(paper_id=""))

    paper_ids = {t.paper_id for t in triples}
    if len(paper_ids) > 1:
        raise InconsistentPathsError(f"triples span multiple papers: {sorted(paper_ids)}")
    if paper is None:
        paper = PaperRecord(paper_id=paper_ids.pop())

    by_path: dict[tuple[int, ...], Triple] = {}
    for t in triples:
        if t.path in by_path:
            raise InconsistentPathsError(f"duplicate path {t.path}")
        by_path[t.path] = t

    unit_triples: dict[int, Triple] = {}
    for path, t in by_path.items():
        if len(path) == 1:
            unit_triples[path[0]] = t
    if sorted(unit_triples) != list(range(len(unit_triples))):
        raise InconsistentPathsError("unit indices are not contiguous")
    for path in by_path:
        if path[0] not in unit_triples:
            raise InconsistentPathsError(f"no unit attachment for path {path}")

    units: list[UnitBlock] = []
    for u in sorted(unit_triples):
        unit_triple = unit_triples[u]
        unit = unit_triple.unit
        attachments = {
            path[1]: t for path, t in by_path.items() if len(path) == 2 and path[0] == u
        }
        bindings = sorted(
            (path, t) for path, t in by_path.items() if len(path) > 2 and path[0] == u
        )
        roots: dict[int, _NodeBuilder] = {}
        collapsed = False
        if attachments:
            if sorted(attachments) != list(range(len(attachments))):
                raise InconsistentPathsError(f"root indices for unit {u} are not contiguous")
            for r, t in attachments.items():
                roots[r] = _NodeBuilder(
                    t.object, t.object_evidence, t.object_role, t.object_table
                )
        elif bindings:
            collapsed = True
            roots[0] = _NodeBuilder(
                unit.display_label,
                unit_triple.object_evidence,
                unit_triple.object_role,
                unit_triple.object_table,
            )

        for path, t in bindings:
            if len(path) % 2 != 0:
                raise InconsistentPathsError(f"binding path {path} has odd length")
            r = path[1]
            if r not in roots:
                raise InconsistentPathsError(f"binding {path} references missing root {r}")
            node = roots[r]
            pairs = [(path[i], path[i + 1]) for i in range(2, len(path), 2)]
            for e, ti in pairs[:-1]:
                if e >= len(node.edges) or ti >= len(node.edges[e][1]):
                    raise InconsistentPathsError(f"missing parent for path {path}")
                node = node.edges[e][1][ti]
            e, ti = pairs[-1]
            if node.label != t.subject:
                raise InconsistentPathsError(
                    f"subject {t.subject!r} at {path} does not match node {node.label!r}"
                )
            if e == len(node.edges):
                node.edges.append((t.predicate, []))
            elif e > len(node.edges):
                raise InconsistentPathsError(f"edge index gap at {path}")
            pred, targets = node.edges[e]
            if pred != t.predicate:
                raise InconsistentPathsError(
                    f"predicate {t.predicate!r} at {path} conflicts with {pred!r}"
                )
            if ti != len(targets):
                raise InconsistentPathsError(f"target index gap at {path}")
            targets.append(
                _NodeBuilder(t.object, t.object_evidence, t.object_role, t.object_table)
            )

        units.append(
            UnitBlock(
                unit,
                tuple(roots[r].freeze() for r in sorted(roots)),
                collapsed=collapsed,
            )
        )

    return AnnotationDocument(paper=paper, units=tuple(units))


def _encode(segment: str) -> str:
    return urllib.parse.quote(segment, safe="")


def _escape_literal(text: str) -> str:
    return (
        text.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )


def _entity_iri(base: str, paper_id: str, label: str) -> str:
    return f"<{base}/paper/{_encode(paper_id)}/e/{_encode(label)}>"


def to_ntriples(triples: Iterable[Triple], base_iri: str = DEFAULT_BASE_IRI) -> bytes:
    lines = []
    for t in triples:
        subject = _entity_iri(base_iri, t.paper_id, t.subject)
        predicate = f"<{base_iri}/p/{_encode(t.predicate)}>"
        if len(t.object) > LITERAL_THRESHOLD and any(c.isspace() for c in t.object):
            obj = f'"{_escape_literal(t.object)}"'
        else:
            obj = _entity_iri(base_iri, t.paper_id, t.object)
        lines.append(f"{subject} {predicate} {obj} .\n")
    return "".join(lines).encode("utf-8")


def to_csv(triples: Iterable[Triple]) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(["paper_id", "unit", "subject", "predicate", "object"])
    for t in triples:
        unit = t.unit.canonical.value if t.unit.canonical else t.unit.surface_label
        writer.writerow([t.paper_id, unit, t.subject, t.predicate, t.object])
    return buffer.getvalue().encode("utf-8")


def triple_to_dict(t: Triple) -> dict:
    record = {
        "paper_id": t.paper_id,
        "unit": {
            "kind": t.unit.canonical.value if t.unit.canonical else None,
            "label": t.unit.surface_label,
        },
        "subject": t.subject,
        "predicate": t.predicate,
        "object": t.object,
        "path": list(t.path),
        "evidence": [_span_to_dict(s) for s in t.evidence],
    }
    if t.object_evidence:
        record["object_evidence"] = [_span_to_dict(s) for s in t.object_evidence]
    if t.object_role is not None:
        record["object_role"] = t.object_role
    if t.object_table is not None:
        record["object_table"] = t.object_table
    return record


def _span_to_dict(span: EvidenceSpan) -> dict:
    record = {"sentence": span.sentence}
    if span.section is not None:
        record["section"] = span.section
    return record


def _span_from_dict(record: dict) -> EvidenceSpan:
    return EvidenceSpan(record["sentence"], record.get("section"))


def triple_from_dict(record: dict) -> Triple:
    unit_raw = record["unit"]
    kind = UnitKind(unit_raw["kind"]) if unit_raw.get("kind") else None
    return Triple(
        subject=record["subject"],
        predicate=record["predicate"],
        object=record["object"],
        unit=InfoUnit(kind, unit_raw["label"]),
        paper_id=record["paper_id"],
        path=tuple(record["path"]),
        evidence=tuple(_span_from_dict(s) for s in record.get("evidence", [])),
        object_evidence=tuple(_span_from_dict(s) for s in record.get("object_evidence", [])),
        object_role=record.get("object_role"),
        object_table=record.get("object_table"),
    )


def to_jsonl(triples: Iterable[Triple]) -> bytes:
    lines = [
        json.dumps(triple_to_dict(t), ensure_ascii=False, separators=(",", ":")) + "\n"
        for t in triples
    ]
    return "".join(lines).encode("utf-8")


def export(
    triples: Sequence[Triple], format: str, *, base_iri: str = DEFAULT_BASE_IRI
) -> bytes:
    """Serialize triples to one of the exchange formats."""
    fmt = format.lower()
    if fmt == "ntriples":
        return to_ntriples(triples, base_iri)
    if fmt == "csv":
        return to_csv(triples)
    if fmt == "jsonl":
        return to_jsonl(triples)
    raise ValueError(f"unsupported format {format!r}; expected one of {FORMATS}")
