"""Parsing and validation of annotation files.

The file format is a UTF-8 JSON object with top-level keys ``paper``
(``id``, ``title``, ``task``) and ``contribution``, the latter keyed by
information-unit surface labels.  Each unit body follows an alternating
grammar: a dictionary of entity labels owning predicate dictionaries,
where each predicate maps to a string (leaf object), an array (fan-out
of leaves and/or entity dictionaries) or an entity dictionary.  A unit
body may also start directly with predicate keys (the collapsed shape);
the parser tries the entity-first reading and falls back to the
predicate-first one, which is the unique assignment consistent with the
parity forced by string leaves.

Reserved keys at entity level: ``from sentence`` (evidence, string or
array of strings), ``role`` (string) and ``table`` (integer).
"""
from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, replace
from typing import Optional, Union

from .model import (
    EVIDENCE_KEY,
    INFERRED_VOCAB,
    MANDATORY_UNITS,
    AnnotationDocument,
    EvidenceSpan,
    InfoUnit,
    PaperRecord,
    PredicateEdge,
    SequenceNode,
    TaskLabel,
    UnitBlock,
    UnitKind,
    canonicalize_unit,
)

RESERVED_KEYS = frozenset({EVIDENCE_KEY, "role", "table"})

_URL_RE = re.compile(r"^https?://\S+$")

#: Admissible nesting orders of tagged result elements.
RESULT_PRECEDENCE = (
    ("dataset", "task", "metric", "score"),
    ("task", "dataset", "metric", "score"),
)


class Severity(enum.Enum):
    ERROR = "ERROR"
    WARNING = "WARNING"


class Code(enum.Enum):
    MALFORMED_JSON = "MALFORMED_JSON"
    MALFORMED_SEQUENCE = "MALFORMED_SEQUENCE"
    UNKNOWN_UNIT = "UNKNOWN_UNIT"
    MISSING_MANDATORY_UNIT = "MISSING_MANDATORY_UNIT"
    NONCANONICAL_INFERRED_PREDICATE = "NONCANONICAL_INFERRED_PREDICATE"
    RESULTS_PRECEDENCE = "RESULTS_PRECEDENCE"
    EMPTY_UNIT = "EMPTY_UNIT"
    BAD_EVIDENCE = "BAD_EVIDENCE"
    BAD_CODE_URL = "BAD_CODE_URL"
    DANGLING_PREDICATE = "DANGLING_PREDICATE"
    DUPLICATE_UNIT = "DUPLICATE_UNIT"


#: Codes that block triplification when present.
ERROR_CODES = frozenset(
    {
        Code.MALFORMED_JSON,
        Code.MALFORMED_SEQUENCE,
        Code.UNKNOWN_UNIT,
        Code.MISSING_MANDATORY_UNIT,
        Code.BAD_EVIDENCE,
        Code.DANGLING_PREDICATE,
    }
)


@dataclass(frozen=True)
class Diagnostic:
    code: Code
    severity: Severity
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity.value} {self.code.value} {self.path}: {self.message}"


def _diag(code: Code, path: str, message: str) -> Diagnostic:
    severity = Severity.ERROR if code in ERROR_CODES else Severity.WARNING
    return Diagnostic(code, severity, path, message)


@dataclass
class ParseResult:
    """Outcome of :func:`parse_document`.

    ``document`` is ``None`` only when the input could not be read at
    all (malformed JSON or a non-object top level).  ``diagnostics``
    merges parse-time grammar findings with a full validation pass.
    """

    document: Optional[AnnotationDocument]
    diagnostics: list[Diagnostic]

    @property
    def ok(self) -> bool:
        return self.document is not None and not any(
            d.severity is Severity.ERROR for d in self.diagnostics
        )


class _GrammarError(Exception):
    def __init__(self, code: Code, path: str, message: str, depth: int):
        super().__init__(message)
        self.code = code
        self.path = path
        self.message = message
        self.depth = depth


def _join(path: str, key: str) -> str:
    return f"{path}/{key}"


def _parse_evidence(value: object, path: str, depth: int) -> tuple[EvidenceSpan, ...]:
    if isinstance(value, str):
        if not value.strip():
            raise _GrammarError(Code.BAD_EVIDENCE, path, "empty evidence sentence", depth)
        return (EvidenceSpan(value.strip()),)
    if isinstance(value, list):
        spans = []
        for i, item in enumerate(value):
            if not isinstance(item, str) or not item.strip():
                raise _GrammarError(
                    Code.BAD_EVIDENCE,
                    _join(path, str(i)),
                    "evidence entries must be non-empty strings",
                    depth,
                )
            spans.append(EvidenceSpan(item.strip()))
        return tuple(spans)
    raise _GrammarError(
        Code.BAD_EVIDENCE, path, "evidence must be a string or array of strings", depth
    )


def _leaf(value: str, path: str, depth: int) -> SequenceNode:
    label = value.strip()
    if not label:
        raise _GrammarError(Code.MALFORMED_SEQUENCE, path, "empty object label", depth)
    if label == EVIDENCE_KEY:
        raise _GrammarError(
            Code.MALFORMED_SEQUENCE, path, f"{EVIDENCE_KEY!r} is reserved", depth
        )
    return SequenceNode(label)


def _parse_pred_value(
    value: object, path: str, depth: int
) -> tuple[tuple[SequenceNode, ...], tuple[EvidenceSpan, ...]]:
    """Parse a predicate's value into its fan-out of target nodes.

    Returns the targets plus evidence spans that were placed inside the
    value (array elements or entity-dict keys) and therefore belong to
    the edge's owning subject node.
    """
    if isinstance(value, str):
        return (_leaf(value, path, depth),), ()
    if isinstance(value, list):
        targets: list[SequenceNode] = []
        owner_evidence: list[EvidenceSpan] = []
        for i, item in enumerate(value):
            item_path = _join(path, str(i))
            if isinstance(item, str):
                targets.append(_leaf(item, item_path, depth + 1))
            elif isinstance(item, dict):
                if set(item) and set(item) <= {EVIDENCE_KEY}:
                    owner_evidence.extend(
                        _parse_evidence(item[EVIDENCE_KEY], _join(item_path, EVIDENCE_KEY), depth + 1)
                    )
                else:
                    nodes, extra = _parse_entity_dict(item, item_path, depth + 1)
                    targets.extend(nodes)
                    owner_evidence.extend(extra)
            else:
                raise _GrammarError(
                    Code.MALFORMED_SEQUENCE,
                    item_path,
                    f"array element must be a string or object, got {type(item).__name__}",
                    depth + 1,
                )
        return tuple(targets), tuple(owner_evidence)
    if isinstance(value, dict):
        nodes, owner_evidence = _parse_entity_dict(value, path, depth)
        return tuple(nodes), tuple(owner_evidence)
    raise _GrammarError(
        Code.MALFORMED_SEQUENCE,
        path,
        f"predicate value must be a string, array or object, got {type(value).__name__}",
        depth,
    )


def _parse_entity_dict(
    mapping: dict, path: str, depth: int
) -> tuple[list[SequenceNode], tuple[EvidenceSpan, ...]]:
    """Parse a dictionary whose keys are entity labels.

    A ``from sentence`` key here belongs to the subject that owns the
    surrounding edge and is handed back to the caller.
    """
    nodes: list[SequenceNode] = []
    owner_evidence: list[EvidenceSpan] = []
    for key, value in mapping.items():
        key_path = _join(path, key)
        if key == EVIDENCE_KEY:
            owner_evidence.extend(_parse_evidence(value, key_path, depth))
            continue
        if key in RESERVED_KEYS:
            raise _GrammarError(
                Code.MALFORMED_SEQUENCE,
                key_path,
                f"reserved key {key!r} is not allowed between entities",
                depth,
            )
        label = key.strip()
        if not label:
            raise _GrammarError(Code.MALFORMED_SEQUENCE, key_path, "empty entity label", depth)
        if not isinstance(value, dict):
            raise _GrammarError(
                Code.MALFORMED_SEQUENCE,
                key_path,
                "an entity must own a dictionary of predicates",
                depth,
            )
        edges, evidence, role, table = _parse_pred_dict(value, key_path, depth + 1)
        nodes.append(
            SequenceNode(label, evidence=evidence, edges=edges, role=role, table_ref=table)
        )
    return nodes, tuple(owner_evidence)


def _parse_pred_dict(
    mapping: dict, path: str, depth: int
) -> tuple[tuple[PredicateEdge, ...], tuple[EvidenceSpan, ...], Optional[str], Optional[int]]:
    """Parse the dictionary owned by an entity: predicates + reserved keys."""
    edges: list[PredicateEdge] = []
    evidence: list[EvidenceSpan] = []
    role: Optional[str] = None
    table: Optional[int] = None
    for key, value in mapping.items():
        key_path = _join(path, key)
        if key == EVIDENCE_KEY:
            evidence.extend(_parse_evidence(value, key_path, depth))
            continue
        if key == "role":
            if not isinstance(value, str):
                raise _GrammarError(Code.MALFORMED_SEQUENCE, key_path, "role must be a string", depth)
            role = value.strip()
            continue
        if key == "table":
            if not isinstance(value, int) or isinstance(value, bool):
                raise _GrammarError(
                    Code.MALFORMED_SEQUENCE, key_path, "table must be an integer", depth
                )
            table = value
            continue
        predicate = key.strip()
        if not predicate:
            raise _GrammarError(Code.MALFORMED_SEQUENCE, key_path, "empty predicate", depth)
        targets, extra = _parse_pred_value(value, key_path, depth + 1)
        evidence.extend(extra)
        edges.append(PredicateEdge(predicate, targets))
    return tuple(edges), tuple(evidence), role, table


def _parse_unit_body(body: object, path: str, unit: InfoUnit) -> UnitBlock:
    if not isinstance(body, dict):
        raise _GrammarError(
            Code.MALFORMED_SEQUENCE,
            path,
            f"unit body must be an object, got {type(body).__name__}",
            0,
        )
    # Entity-first reading: keys are sequence roots.
    try:
        nodes, stray_evidence = _parse_entity_dict(body, path, 0)
        if stray_evidence:
            if not nodes:
                raise _GrammarError(
                    Code.BAD_EVIDENCE, path, "evidence without any sequence to attach to", 0
                )
            # Unit-level evidence attaches to the first sequence root.
            nodes[0] = replace(nodes[0], evidence=nodes[0].evidence + stray_evidence)
        return UnitBlock(unit, tuple(nodes), collapsed=False)
    except _GrammarError as entity_err:
        # Predicate-first reading: the unit label itself is the subject.
        try:
            edges, evidence, role, table = _parse_pred_dict(body, path, 0)
        except _GrammarError as pred_err:
            raise pred_err if pred_err.depth > entity_err.depth else entity_err
        pseudo = SequenceNode(
            unit.display_label, evidence=evidence, edges=edges, role=role, table_ref=table
        )
        return UnitBlock(unit, (pseudo,), collapsed=True)


def parse_document(
    data: Union[str, bytes], *, default_paper_id: str = "", source_uri: Optional[str] = None
) -> ParseResult:
    """Parse annotation-file bytes into a document plus diagnostics.

    Identical bytes always yield structurally identical results.  Units
    whose body violates the grammar are dropped from the document and
    reported.  The returned diagnostics include a full validation pass
    over whatever could be built.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            return ParseResult(None, [_diag(Code.MALFORMED_JSON, "", f"not UTF-8: {exc}")])
    try:
        payload = json.loads(data)
    except json.JSONDecodeError as exc:
        return ParseResult(None, [_diag(Code.MALFORMED_JSON, "", str(exc))])
    if not isinstance(payload, dict):
        return ParseResult(
            None, [_diag(Code.MALFORMED_JSON, "", "top level must be a JSON object")]
        )

    diagnostics: list[Diagnostic] = []

    paper_raw = payload.get("paper", {})
    if not isinstance(paper_raw, dict):
        diagnostics.append(_diag(Code.MALFORMED_SEQUENCE, "/paper", "paper must be an object"))
        paper_raw = {}
    paper_id = str(paper_raw.get("id") or default_paper_id).strip()
    if not paper_id:
        diagnostics.append(
            _diag(Code.MALFORMED_SEQUENCE, "/paper/id", "paper id is missing or empty")
        )
    paper = PaperRecord(
        paper_id=paper_id,
        title=str(paper_raw.get("title") or "").strip(),
        task_label=TaskLabel.parse(paper_raw.get("task")),
        source_uri=source_uri,
    )

    contribution = payload.get("contribution", {})
    if not isinstance(contribution, dict):
        diagnostics.append(
            _diag(Code.MALFORMED_SEQUENCE, "/contribution", "contribution must be an object")
        )
        contribution = {}

    blocks: list[UnitBlock] = []
    seen: dict[str, int] = {}
    for label, body in contribution.items():
        unit = InfoUnit.from_label(label)
        path = _join("/contribution", label)
        try:
            block = _parse_unit_body(body, path, unit)
        except _GrammarError as exc:
            diagnostics.append(_diag(exc.code, exc.path, exc.message))
            continue
        if unit.key in seen:
            diagnostics.append(
                _diag(Code.DUPLICATE_UNIT, path, f"unit {label!r} repeats a canonical kind; last occurrence wins")
            )
            blocks[seen[unit.key]] = block
        else:
            seen[unit.key] = len(blocks)
            blocks.append(block)

    document = AnnotationDocument(paper=paper, units=tuple(blocks))
    merged = diagnostics + validate(document)
    deduped: list[Diagnostic] = []
    seen_diags = set()
    for diag in merged:
        key = (diag.code, diag.path, diag.message)
        if key not in seen_diags:
            seen_diags.add(key)
            deduped.append(diag)
    deduped.sort(key=lambda d: (d.path, d.code.value))
    return ParseResult(document, deduped)


def _walk_nodes(root: SequenceNode, path: str):
    """Yield (node, path) pairs over a sequence tree, depth first."""
    yield root, path
    for edge in root.edges:
        for target in edge.targets:
            yield from _walk_nodes(target, _join(_join(path, edge.predicate), target.label))


def _check_precedence(root: SequenceNode, path: str, diagnostics: list[Diagnostic]) -> None:
    """V5: tagged result-element roles must follow an admissible order."""

    def walk(node: SequenceNode, node_path: str, roles: tuple[str, ...]) -> None:
        role = (node.role or "").strip().lower()
        if role in {"dataset", "task", "metric", "score"}:
            roles = roles + (role,)
            if not any(_is_subsequence(roles, order) for order in RESULT_PRECEDENCE):
                diagnostics.append(
                    _diag(
                        Code.RESULTS_PRECEDENCE,
                        node_path,
                        f"result elements nested as {' -> '.join(roles)} violate the "
                        "dataset/task -> metric -> score precedence",
                    )
                )
                return
        for edge in node.edges:
            for target in edge.targets:
                walk(target, _join(_join(node_path, edge.predicate), target.label), roles)

    walk(root, path, ())


def _is_subsequence(seq: tuple[str, ...], order: tuple[str, ...]) -> bool:
    it = iter(order)
    return all(item in it for item in seq)


def validate(doc: AnnotationDocument) -> list[Diagnostic]:
    """Run every machine-checkable rule; returns path-ordered diagnostics."""
    diagnostics: list[Diagnostic] = []

    present: dict[UnitKind, UnitBlock] = {}
    for block in doc.units:
        if block.unit.canonical is not None:
            present.setdefault(block.unit.canonical, block)

    # V1: mandatory units absent or without content.
    for kind in sorted(MANDATORY_UNITS, key=lambda k: k.value):
        block = present.get(kind)
        if block is None:
            diagnostics.append(
                _diag(Code.MISSING_MANDATORY_UNIT, "/contribution", f"mandatory unit {kind.value} is missing")
            )
        elif not block.has_content():
            diagnostics.append(
                _diag(
                    Code.MISSING_MANDATORY_UNIT,
                    _join("/contribution", block.unit.display_label),
                    f"mandatory unit {kind.value} has no contribution sequences",
                )
            )

    for block in doc.units:
        unit_path = _join("/contribution", block.unit.display_label)
        # V2: unknown unit label.
        if block.unit.canonical is None:
            diagnostics.append(
                _diag(Code.UNKNOWN_UNIT, unit_path, f"unknown information unit {block.unit.surface_label!r}")
            )
            continue
        # V6: empty non-mandatory unit.
        if not block.has_content() and block.unit.canonical not in MANDATORY_UNITS:
            diagnostics.append(
                _diag(Code.EMPTY_UNIT, unit_path, "unit has no contribution sequences")
            )
        for root in block.roots:
            root_path = unit_path if block.collapsed else _join(unit_path, root.label)
            for node, node_path in _walk_nodes(root, root_path):
                for span in node.evidence:
                    # V7: post-construction evidence sanity.
                    if not span.sentence.strip():
                        diagnostics.append(
                            _diag(Code.BAD_EVIDENCE, node_path, "empty evidence sentence")
                        )
                for edge in node.edges:
                    edge_path = _join(node_path, edge.predicate)
                    # V9: predicate with no targets.
                    if not edge.targets:
                        diagnostics.append(
                            _diag(Code.DANGLING_PREDICATE, edge_path, f"predicate {edge.predicate!r} has no targets")
                        )
                    # V4: explicitly inferred predicate outside the vocabulary.
                    if edge.inferred is True and edge.predicate.lower() not in INFERRED_VOCAB:
                        diagnostics.append(
                            _diag(
                                Code.NONCANONICAL_INFERRED_PREDICATE,
                                edge_path,
                                f"inferred predicate {edge.predicate!r} is outside the closed vocabulary",
                            )
                        )
                # V8: Code unit leaves should be URL-shaped.
                if (
                    block.unit.canonical is UnitKind.CODE
                    and not node.edges
                    and not _URL_RE.match(node.label)
                ):
                    diagnostics.append(
                        _diag(Code.BAD_CODE_URL, node_path, f"{node.label!r} does not look like a URL")
                    )
            # V5: result-element precedence, only over tagged roles.
            if block.unit.canonical is UnitKind.RESULTS:
                _check_precedence(root, root_path, diagnostics)

    diagnostics.sort(key=lambda d: (d.path, d.code.value))
    return diagnostics


def has_errors(diagnostics: list[Diagnostic]) -> bool:
    return any(d.severity is Severity.ERROR for d in diagnostics)


def infer_predicate_flags(doc: AnnotationDocument) -> AnnotationDocument:
    """Fill in ``inferred`` on edges that lack an explicit flag.

    A predicate is deemed inferred when it belongs to the closed
    vocabulary and does not occur (case-insensitively) in any evidence
    sentence attached anywhere on its contribution sequence.
    """

    def sentences(root: SequenceNode) -> list[str]:
        return [span.sentence.lower() for node, _ in _walk_nodes(root, "") for span in node.evidence]

    def rebuild(node: SequenceNode, seq_sentences: list[str]) -> SequenceNode:
        edges = []
        for edge in node.edges:
            inferred = edge.inferred
            if inferred is None:
                pred = edge.predicate.lower()
                inferred = pred in INFERRED_VOCAB and all(
                    pred not in sent for sent in seq_sentences
                )
            edges.append(
                PredicateEdge(
                    edge.predicate,
                    tuple(rebuild(t, seq_sentences) for t in edge.targets),
                    inferred=inferred,
                )
            )
        return replace(node, edges=tuple(edges))

    units = []
    for block in doc.units:
        roots = tuple(rebuild(root, sentences(root)) for root in block.roots)
        units.append(replace(block, roots=roots))
    return replace(doc, units=tuple(units))
