"""contribkit: parse, validate, triplify and analyse contribution annotations."""

from .model import (
    AnnotationDocument,
    EvidenceSpan,
    InfoUnit,
    PaperRecord,
    PredicateEdge,
    SequenceNode,
    TaskLabel,
    Triple,
    UnitBlock,
    UnitKind,
    canonicalize_unit,
    root_predicate,
)
from .ingest import Code, Diagnostic, ParseResult, Severity, infer_predicate_flags, parse_document, validate
from .triplify import InconsistentPathsError, InvalidDocumentError, export, flatten, unflatten
from .store import ContributionGraph, FormatVersionError, IngestReport
from .analytics import ComparisonTable, StatsReport, UnknownPaperError, compare, stats

__all__ = [
    "AnnotationDocument",
    "Code",
    "ComparisonTable",
    "ContributionGraph",
    "Diagnostic",
    "EvidenceSpan",
    "FormatVersionError",
    "InconsistentPathsError",
    "InfoUnit",
    "IngestReport",
    "InvalidDocumentError",
    "PaperRecord",
    "ParseResult",
    "PredicateEdge",
    "SequenceNode",
    "Severity",
    "StatsReport",
    "TaskLabel",
    "Triple",
    "UnitBlock",
    "UnitKind",
    "UnknownPaperError",
    "canonicalize_unit",
    "compare",
    "export",
    "flatten",
    "infer_predicate_flags",
    "parse_document",
    "root_predicate",
    "stats",
    "unflatten",
    "validate",
]

__version__ = "0.1.0"
