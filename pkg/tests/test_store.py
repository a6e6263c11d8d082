import json
import random

import pytest

from contribkit.model import UnitKind
from contribkit.store import ContributionGraph, FormatVersionError
from contribkit.triplify import InvalidDocumentError, flatten

from conftest import parse_fixture
from docgen import count_triples, random_document


@pytest.fixture
def graph():
    g = ContributionGraph()
    g.ingest(parse_fixture("complete/sstate_lstm.json").document)
    g.ingest(parse_fixture("complete/domain_bert.json").document)
    return g


class TestIngest:
    def test_report_counts(self):
        g = ContributionGraph()
        doc = parse_fixture("complete/sstate_lstm.json").document
        report = g.ingest(doc)
        assert report.paper_id == "sstate-lstm"
        assert report.triple_count == count_triples(doc)
        assert len(g) == report.triple_count

    def test_replacement_idempotent(self, graph):
        before = len(graph)
        doc = parse_fixture("complete/sstate_lstm.json").document
        report = graph.ingest(doc)
        assert report.replaced
        assert len(graph) == before
        assert len(graph.papers) == 2

    def test_failed_ingest_leaves_graph_unchanged(self, graph):
        before = graph.triples
        bad = parse_fixture("units/results_nested.json").document
        with pytest.raises(InvalidDocumentError):
            graph.ingest(bad)
        assert graph.triples == before


class TestQuery:
    def test_predicate_filter(self):
        g = ContributionGraph()
        doc = parse_fixture("units/results_nested.json").document
        triples = flatten(doc, check=False)
        g.ingest_triples(doc.paper, triples)
        assert len(g.query(predicate="has")) == 2

    def test_absent_unit_empty(self, graph):
        assert graph.query(unit=UnitKind.TASKS) == []

    def test_subject_and_paper_conjunction(self, graph):
        result = graph.query(paper_id="domain-bert", subject="BERTBase model")
        assert len(result) == 3
        assert {t.predicate for t in result} == {"pre-trained for", "pre-trained on"}

    def test_stable_ingest_order(self, graph):
        result = graph.query(paper_id="domain-bert")
        assert result == [t for t in graph.triples if t.paper_id == "domain-bert"]

    def test_query_matches_linear_scan(self):
        rng = random.Random(17)
        g = ContributionGraph()
        docs = [random_document(rng) for _ in range(5)]
        for doc in docs:
            g.ingest(doc)
        everything = g.triples
        for _ in range(25):
            filters = {}
            if rng.random() < 0.5:
                filters["paper_id"] = rng.choice(docs).paper.paper_id
            if rng.random() < 0.5:
                filters["unit"] = rng.choice(list(UnitKind))
            if rng.random() < 0.5:
                t = rng.choice(everything)
                filters["predicate"] = t.predicate
            if rng.random() < 0.5:
                t = rng.choice(everything)
                filters["subject"] = t.subject
            expected = [
                t
                for t in everything
                if (filters.get("paper_id") is None or t.paper_id == filters["paper_id"])
                and (filters.get("unit") is None or t.unit.canonical is filters["unit"])
                and (filters.get("predicate") is None or t.predicate == filters["predicate"])
                and (filters.get("subject") is None or t.subject == filters["subject"])
            ]
            assert g.query(**filters) == expected


class TestPersistence:
    def test_round_trip(self, graph, tmp_path):
        graph.save(tmp_path / "store")
        loaded = ContributionGraph.load(tmp_path / "store")
        assert loaded.triples == graph.triples
        assert loaded.papers == graph.papers

    def test_load_empty_directory(self, tmp_path):
        loaded = ContributionGraph.load(tmp_path)
        assert len(loaded) == 0
        assert loaded.papers == {}

    def test_version_mismatch(self, graph, tmp_path):
        store = tmp_path / "store"
        graph.save(store)
        manifest = json.loads((store / "manifest.json").read_text())
        manifest["version"] = 99
        (store / "manifest.json").write_text(json.dumps(manifest))
        with pytest.raises(FormatVersionError):
            ContributionGraph.load(store)

    def test_unknown_format_tag(self, graph, tmp_path):
        store = tmp_path / "store"
        graph.save(store)
        manifest = json.loads((store / "manifest.json").read_text())
        manifest["format"] = "something-else"
        (store / "manifest.json").write_text(json.dumps(manifest))
        with pytest.raises(FormatVersionError):
            ContributionGraph.load(store)

    def test_save_overwrites_atomically(self, graph, tmp_path):
        store = tmp_path / "store"
        graph.save(store)
        graph.save(store)
        loaded = ContributionGraph.load(store)
        assert loaded.triples == graph.triples
