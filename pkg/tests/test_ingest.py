import json
import random

import pytest

from contribkit import ingest
from contribkit.ingest import Code, Severity, infer_predicate_flags, parse_document, validate
from contribkit.model import (
    AnnotationDocument,
    EvidenceSpan,
    PaperRecord,
    PredicateEdge,
    SequenceNode,
    UnitKind,
)

from conftest import parse_fixture
from docgen import document_to_payload, random_document


def codes(diagnostics):
    return [d.code for d in diagnostics]


class TestParsing:
    def test_nested_results_shape(self):
        result = parse_fixture("units/results_nested.json")
        doc = result.document
        block = doc.unit(UnitKind.RESULTS)
        assert not block.collapsed
        root = block.roots[0]
        assert root.label == "CoNLL test set"
        assert root.evidence[0].sentence.startswith("For NER (Table 7)")
        assert root.edges[0].predicate == "For"
        ner = root.edges[0].targets[0]
        assert ner.label == "NER"
        assert ner.edges[0].predicate == "F1-score"
        assert ner.edges[0].targets[0].label == "91.57%"

    def test_fanout_shape(self):
        result = parse_fixture("units/setup_sequences.json")
        block = result.document.unit(UnitKind.EXPERIMENTAL_SETUP)
        assert block.collapsed
        pseudo = block.roots[0]
        assert pseudo.label == "ExperimentalSetup"
        used = pseudo.edges[0]
        assert used.predicate == "used"
        assert [t.label for t in used.targets] == [
            "BERTBase model",
            "NVIDIA V100 (32GB) GPUs",
        ]
        bert = used.targets[0]
        fanout = {e.predicate: [t.label for t in e.targets] for e in bert.edges}
        assert fanout == {
            "pre-trained for": ["1M steps"],
            "pre-trained on": ["English Wikipedia", "BooksCorpus"],
        }

    def test_empty_top_level(self):
        result = parse_document(b"{}")
        assert codes(result.diagnostics).count(Code.MISSING_MANDATORY_UNIT) == 3
        assert all(
            d.severity is Severity.ERROR
            for d in result.diagnostics
            if d.code is Code.MISSING_MANDATORY_UNIT
        )

    def test_malformed_json(self):
        result = parse_document(b"{not json")
        assert result.document is None
        assert codes(result.diagnostics) == [Code.MALFORMED_JSON]

    def test_predicate_to_number_is_malformed(self):
        payload = {"paper": {"id": "p"}, "contribution": {"Baselines": {"compared to": 7}}}
        result = parse_document(json.dumps(payload))
        assert Code.MALFORMED_SEQUENCE in codes(result.diagnostics)
        assert result.document.unit(UnitKind.BASELINES) is None

    def test_bad_evidence_value(self):
        payload = {
            "paper": {"id": "p"},
            "contribution": {"Baselines": {"sys": {"from sentence": [1]}}},
        }
        result = parse_document(json.dumps(payload))
        assert Code.BAD_EVIDENCE in codes(result.diagnostics)

    def test_duplicate_unit_last_wins(self):
        text = (
            '{"paper": {"id": "p"}, "contribution": '
            '{"Model": {"called": "A"}, "Method": {"called": "B"}}}'
        )
        result = parse_document(text)
        assert Code.DUPLICATE_UNIT in codes(result.diagnostics)
        block = result.document.unit(UnitKind.APPROACH)
        assert block.roots[0].edges[0].targets[0].label == "B"
        assert len(result.document.units) == 1

    def test_determinism(self):
        rng = random.Random(7)
        for _ in range(25):
            payload = json.dumps(document_to_payload(random_document(rng)))
            first = parse_document(payload)
            second = parse_document(payload)
            assert first.document == second.document
            assert first.diagnostics == second.diagnostics

    def test_serialization_round_trip(self):
        rng = random.Random(11)
        for _ in range(50):
            doc = random_document(rng)
            result = parse_document(json.dumps(document_to_payload(doc)))
            assert result.diagnostics == []
            assert result.document.units == doc.units


def make_doc(units):
    return AnnotationDocument(paper=PaperRecord("p"), units=tuple(units))


class TestValidate:
    def test_missing_results(self):
        payload = {
            "paper": {"id": "p"},
            "contribution": {
                "ResearchProblem": {"parsing": {}},
                "Approach": {"called": "X"},
            },
        }
        result = parse_document(json.dumps(payload))
        assert codes(result.diagnostics) == [Code.MISSING_MANDATORY_UNIT]
        assert "Results" in result.diagnostics[0].message

    def test_noncanonical_inferred_predicate_warns(self):
        edge = PredicateEdge("evaluated-against", (SequenceNode("x"),), inferred=True)
        root = SequenceNode("sys", edges=(edge,))
        doc = make_doc([_unit(UnitKind.BASELINES, [root])])
        diags = [d for d in validate(doc) if d.code is Code.NONCANONICAL_INFERRED_PREDICATE]
        assert len(diags) == 1
        assert diags[0].severity is Severity.WARNING

    def test_inferred_in_vocab_ok(self):
        edge = PredicateEdge("has description", (SequenceNode("x"),), inferred=True)
        root = SequenceNode("sys", edges=(edge,))
        doc = make_doc([_unit(UnitKind.BASELINES, [root])])
        assert Code.NONCANONICAL_INFERRED_PREDICATE not in codes(validate(doc))

    def test_results_precedence_ok_in_order(self):
        payload = {
            "paper": {"id": "p"},
            "contribution": {
                "Results": {
                    "CoNLL": {
                        "role": "dataset",
                        "For": {
                            "NER": {
                                "role": "task",
                                "measured by": {
                                    "F1": {
                                        "role": "metric",
                                        "has value": {"91.57%": {"role": "score"}},
                                    }
                                },
                            }
                        },
                    }
                }
            },
        }
        result = parse_document(json.dumps(payload))
        assert Code.RESULTS_PRECEDENCE not in codes(result.diagnostics)

    def test_results_precedence_violation(self):
        payload = {
            "paper": {"id": "p"},
            "contribution": {
                "Results": {
                    "91.57%": {"role": "score", "on": {"CoNLL": {"role": "dataset"}}}
                }
            },
        }
        result = parse_document(json.dumps(payload))
        assert Code.RESULTS_PRECEDENCE in codes(result.diagnostics)

    def test_task_first_order_also_accepted(self):
        payload = {
            "paper": {"id": "p"},
            "contribution": {
                "Results": {
                    "NER": {"role": "task", "on": {"CoNLL": {"role": "dataset"}}}
                }
            },
        }
        result = parse_document(json.dumps(payload))
        assert Code.RESULTS_PRECEDENCE not in codes(result.diagnostics)

    def test_empty_unit_warns(self):
        payload = {"paper": {"id": "p"}, "contribution": {"Baselines": {}}}
        result = parse_document(json.dumps(payload))
        diags = [d for d in result.diagnostics if d.code is Code.EMPTY_UNIT]
        assert len(diags) == 1
        assert diags[0].severity is Severity.WARNING

    def test_bad_code_url_warns(self):
        payload = {"paper": {"id": "p"}, "contribution": {"Code": {"has": "on request"}}}
        result = parse_document(json.dumps(payload))
        assert Code.BAD_CODE_URL in codes(result.diagnostics)

    def test_good_code_url(self):
        payload = {
            "paper": {"id": "p"},
            "contribution": {"Code": {"has": "https://github.com/a/b"}},
        }
        result = parse_document(json.dumps(payload))
        assert Code.BAD_CODE_URL not in codes(result.diagnostics)

    def test_dangling_predicate(self):
        payload = {
            "paper": {"id": "p"},
            "contribution": {"Baselines": {"sys": {"compared to": {}}}},
        }
        result = parse_document(json.dumps(payload))
        diags = [d for d in result.diagnostics if d.code is Code.DANGLING_PREDICATE]
        assert len(diags) == 1
        assert diags[0].severity is Severity.ERROR

    def test_validate_is_pure(self):
        result = parse_fixture("complete/sstate_lstm.json")
        doc = result.document
        before = doc.units
        first = validate(doc)
        second = validate(doc)
        assert first == second
        assert doc.units == before

    def test_no_errors_implies_mandatory_present(self):
        rng = random.Random(23)
        for _ in range(30):
            doc = random_document(rng)
            diags = validate(doc)
            if not ingest.has_errors(diags):
                assert doc.mandatory_present()


def _unit(kind, roots, collapsed=False):
    from contribkit.model import InfoUnit, UnitBlock

    return UnitBlock(InfoUnit(kind, kind.value), tuple(roots), collapsed=collapsed)


class TestInferFlags:
    def test_vocab_predicate_absent_from_evidence(self):
        edge = PredicateEdge("has description", (SequenceNode("a deep net"),))
        root = SequenceNode(
            "sys",
            evidence=(EvidenceSpan("The model consists of a deep net."),),
            edges=(edge,),
        )
        doc = make_doc([_unit(UnitKind.APPROACH, [root])])
        flagged = infer_predicate_flags(doc)
        assert flagged.units[0].roots[0].edges[0].inferred is True

    def test_predicate_found_in_evidence(self):
        edge = PredicateEdge("on", (SequenceNode("BooksCorpus"),))
        root = SequenceNode(
            "BERTBase",
            evidence=(EvidenceSpan("BERTBase was pre-trained on BooksCorpus."),),
            edges=(edge,),
        )
        doc = make_doc([_unit(UnitKind.EXPERIMENTAL_SETUP, [root])])
        flagged = infer_predicate_flags(doc)
        assert flagged.units[0].roots[0].edges[0].inferred is False

    def test_non_vocab_predicate_not_inferred(self):
        edge = PredicateEdge("F1-score", (SequenceNode("91.57%"),))
        root = SequenceNode("NER", edges=(edge,))
        doc = make_doc([_unit(UnitKind.RESULTS, [root])])
        flagged = infer_predicate_flags(doc)
        assert flagged.units[0].roots[0].edges[0].inferred is False

    def test_explicit_flag_preserved(self):
        edge = PredicateEdge("on", (SequenceNode("x"),), inferred=True)
        root = SequenceNode("s", edges=(edge,))
        doc = make_doc([_unit(UnitKind.RESULTS, [root])])
        flagged = infer_predicate_flags(doc)
        assert flagged.units[0].roots[0].edges[0].inferred is True
