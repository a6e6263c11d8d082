"""Core data model for contribution-annotation documents.

An annotation document describes one paper's research contribution as a
set of *information units* (ResearchProblem, Approach, Results, ...),
each holding one or more *contribution sequences*: rooted trees of
entity nodes connected by predicate edges.  Flattening such a tree
yields (subject, predicate, object) triples.

All types here are frozen dataclasses; documents are immutable after
construction and safe to share across threads.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional


class UnitKind(enum.Enum):
    """The ten canonical information units."""

    RESEARCH_PROBLEM = "ResearchProblem"
    APPROACH = "Approach"
    OBJECTIVE = "Objective"
    EXPERIMENTAL_SETUP = "ExperimentalSetup"
    RESULTS = "Results"
    TASKS = "Tasks"
    EXPERIMENTS = "Experiments"
    ABLATION_ANALYSIS = "AblationAnalysis"
    BASELINES = "Baselines"
    CODE = "Code"


#: Units that every valid document must contain, each with content.
MANDATORY_UNITS = frozenset(
    {UnitKind.RESEARCH_PROBLEM, UnitKind.APPROACH, UnitKind.RESULTS}
)

#: Closed vocabulary for predicates introduced by the annotator rather
#: than found verbatim in the source sentence.
INFERRED_VOCAB = frozenset(
    {
        "has",
        "on",
        "by",
        "for",
        "has value",
        "has description",
        "based on",
        "called",
        "name",
    }
)

#: Reserved key under which evidence sentences are stored in annotation
#: files.  Never a valid entity label or predicate.
EVIDENCE_KEY = "from sentence"

_ALIASES: dict[str, UnitKind] = {kind.value.lower(): kind for kind in UnitKind}
_ALIASES.update(
    {
        # Solution-type aliases.
        "model": UnitKind.APPROACH,
        "method": UnitKind.APPROACH,
        "architecture": UnitKind.APPROACH,
        "system": UnitKind.APPROACH,
        "application": UnitKind.APPROACH,
        "idea": UnitKind.APPROACH,
        # Setup alias.
        "hyperparameters": UnitKind.EXPERIMENTAL_SETUP,
        # Non-generic result-section names.
        "main results": UnitKind.RESULTS,
        "end-to-end results": UnitKind.RESULTS,
    }
)


def canonicalize_unit(surface_label: str) -> Optional[UnitKind]:
    """Map a surface unit label to its canonical kind.

    Matching is case-insensitive.  Any label containing "results" maps
    to :attr:`UnitKind.RESULTS`.  Returns ``None`` for labels outside
    the alias closure (the UNKNOWN_UNIT case).
    """
    key = surface_label.strip().lower()
    if not key:
        return None
    if key in _ALIASES:
        return _ALIASES[key]
    if "results" in key:
        return UnitKind.RESULTS
    return None


def root_predicate(kind: UnitKind) -> str:
    """Predicate attaching a unit to the synthetic Contribution root."""
    if kind is UnitKind.RESEARCH_PROBLEM:
        return "hasResearchProblem"
    return "has"


class TaskLabel(enum.Enum):
    MT = "MT"
    NER = "NER"
    QA = "QA"
    RC = "RC"
    TC = "TC"
    OTHER = "OTHER"

    @classmethod
    def parse(cls, text: Optional[str]) -> "TaskLabel":
        """Lenient parse of a task label; unknown values become OTHER."""
        if not text:
            return cls.OTHER
        key = text.strip().lower().replace("_", " ").replace("-", " ")
        mapping = {
            "mt": cls.MT,
            "machine translation": cls.MT,
            "ner": cls.NER,
            "named entity recognition": cls.NER,
            "qa": cls.QA,
            "question answering": cls.QA,
            "rc": cls.RC,
            "relation classification": cls.RC,
            "tc": cls.TC,
            "text classification": cls.TC,
        }
        return mapping.get(key, cls.OTHER)


@dataclass(frozen=True)
class PaperRecord:
    paper_id: str
    title: str = ""
    task_label: TaskLabel = TaskLabel.OTHER
    source_uri: Optional[str] = None


@dataclass(frozen=True)
class InfoUnit:
    """A unit as written in a document: canonical kind + surface label.

    ``canonical`` is ``None`` for labels outside the alias closure;
    such units are kept for diagnosis but never triplified.
    """

    canonical: Optional[UnitKind]
    surface_label: str

    @classmethod
    def from_label(cls, surface_label: str) -> "InfoUnit":
        return cls(canonicalize_unit(surface_label), surface_label.strip())

    @property
    def display_label(self) -> str:
        return self.surface_label

    @property
    def key(self) -> str:
        """Identity used for uniqueness after canonicalization."""
        if self.canonical is not None:
            return self.canonical.value
        return self.surface_label.lower()


@dataclass(frozen=True)
class EvidenceSpan:
    sentence: str
    section: Optional[str] = None


@dataclass(frozen=True)
class SequenceNode:
    """An entity node in a contribution sequence.

    A node without edges plays the role of a leaf object; it is never
    emitted as a triple subject.
    """

    label: str
    evidence: tuple[EvidenceSpan, ...] = ()
    edges: tuple["PredicateEdge", ...] = ()
    role: Optional[str] = None
    table_ref: Optional[int] = None


@dataclass(frozen=True)
class PredicateEdge:
    """A predicate with its fan-out of target nodes.

    ``inferred`` is ``True`` when the predicate was introduced by the
    annotator rather than found in the text, ``False`` when found, and
    ``None`` when not yet decided (see ``infer_predicate_flags``).
    """

    predicate: str
    targets: tuple[SequenceNode, ...] = ()
    inferred: Optional[bool] = None


@dataclass(frozen=True)
class UnitBlock:
    """One information unit with its contribution sequences.

    ``collapsed`` marks the shape where the unit body starts directly
    with predicate keys: the single pseudo-root carries the unit's
    display label and is not emitted as a (unit, has, root) attachment.
    """

    unit: InfoUnit
    roots: tuple[SequenceNode, ...] = ()
    collapsed: bool = False

    def has_content(self) -> bool:
        if not self.roots:
            return False
        if self.collapsed:
            return any(root.edges for root in self.roots)
        return True


@dataclass(frozen=True)
class AnnotationDocument:
    paper: PaperRecord
    units: tuple[UnitBlock, ...] = ()

    def unit(self, kind: UnitKind) -> Optional[UnitBlock]:
        for block in self.units:
            if block.unit.canonical is kind:
                return block
        return None

    def mandatory_present(self) -> bool:
        return all(
            (block := self.unit(kind)) is not None and block.has_content()
            for kind in MANDATORY_UNITS
        )


@dataclass(frozen=True)
class Triple:
    """A flattened statement with full provenance.

    ``path`` locates the binding in the document tree: ``(u,)`` for a
    Contribution-to-unit attachment, ``(u, r)`` for a unit-to-root
    attachment, and ``(u, r, e0, t0, ...)`` with alternating edge and
    target indices for entity bindings.

    ``evidence`` holds the spans of the subject node; ``object_*``
    fields preserve the object node's own provenance so documents can
    be reconstructed loss-free from their triples.
    """

    subject: str
    predicate: str
    object: str
    unit: InfoUnit
    paper_id: str
    path: tuple[int, ...]
    evidence: tuple[EvidenceSpan, ...] = ()
    object_evidence: tuple[EvidenceSpan, ...] = ()
    object_role: Optional[str] = None
    object_table: Optional[int] = None
