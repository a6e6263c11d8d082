"""HTTP surface over the toolkit, shared with the CLI core.

All bodies are JSON.  ``POST /validate`` always answers 200 with the
diagnostics list (the validation itself succeeded); 422 is reserved for
operations that require a valid document, such as ``POST /triplify``.
"""
from __future__ import annotations

from pathlib import Path
from typing import Optional, Union

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import analytics, ingest
from .model import UnitKind, canonicalize_unit
from .store import ContributionGraph
from .triplify import flatten, triple_to_dict


def _diagnostic_dict(diag: ingest.Diagnostic) -> dict:
    return {
        "code": diag.code.value,
        "severity": diag.severity.value,
        "path": diag.path,
        "message": diag.message,
    }


def create_app(store_dir: Optional[Union[str, Path]] = None) -> FastAPI:
    app = FastAPI(title="contribkit", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store_dir = Path(store_dir) if store_dir else None

    def load_graph() -> ContributionGraph:
        if app.state.store_dir is None:
            return ContributionGraph()
        return ContributionGraph.load(app.state.store_dir)

    @app.post("/validate")
    async def validate_endpoint(request: Request) -> JSONResponse:
        body = await request.body()
        result = ingest.parse_document(body, default_paper_id="request")
        return JSONResponse(
            {"diagnostics": [_diagnostic_dict(d) for d in result.diagnostics]}
        )

    @app.post("/triplify")
    async def triplify_endpoint(request: Request) -> JSONResponse:
        body = await request.body()
        result = ingest.parse_document(body, default_paper_id="request")
        if result.document is None:
            return JSONResponse(
                {"diagnostics": [_diagnostic_dict(d) for d in result.diagnostics]},
                status_code=400,
            )
        if ingest.has_errors(result.diagnostics):
            return JSONResponse(
                {"diagnostics": [_diagnostic_dict(d) for d in result.diagnostics]},
                status_code=422,
            )
        triples = flatten(result.document)
        return JSONResponse(
            {
                "triples": [triple_to_dict(t) for t in triples],
                "diagnostics": [_diagnostic_dict(d) for d in result.diagnostics],
            }
        )

    @app.get("/papers")
    def papers_endpoint() -> dict:
        graph = load_graph()
        return {
            "papers": [
                {
                    "id": record.paper_id,
                    "title": record.title,
                    "task": record.task_label.value,
                }
                for record in graph.papers.values()
            ]
        }

    @app.get("/compare")
    def compare_endpoint(
        unit: str,
        ids: str,
        min_common: int = Query(default=2, ge=1),
    ) -> dict:
        kind = canonicalize_unit(unit)
        if kind is None:
            raise HTTPException(status_code=400, detail=f"unknown unit {unit!r}")
        paper_ids = [pid.strip() for pid in ids.split(",") if pid.strip()]
        graph = load_graph()
        try:
            table = analytics.compare(graph, kind, paper_ids, min_common=min_common)
        except analytics.UnknownPaperError as exc:
            raise HTTPException(status_code=404, detail=f"unknown paper {exc.args[0]!r}")
        return analytics.comparison_to_dict(table)

    @app.get("/stats")
    def stats_endpoint(
        min_count: int = Query(default=0, ge=0),
        exclude_root: bool = True,
        exclude_evidence: bool = True,
    ) -> dict:
        graph = load_graph()
        report = analytics.stats(
            graph,
            min_count=min_count,
            exclude_root=exclude_root,
            exclude_evidence=exclude_evidence,
        )
        return analytics.stats_to_dict(report)

    return app
