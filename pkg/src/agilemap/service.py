"""Stateless HTTP JSON API over one loaded map.

A thin adapter: every endpoint's response is exactly what the
corresponding analysis call returns, reshaped to JSON.  The map is loaded
once, is immutable, and is shared read-only across request handlers, so
no locking is needed and responses are deterministic.  Selections are
client-held; nothing is persisted server-side.

Error bodies use one schema: ``{"code": ..., "message": ..., "details": ...}``
with code drawn from a closed set (malformed_body, unknown_practice,
excluded_practice, not_alternatives, not_selected, already_selected,
selection_incomplete, unknown_objective, internal_error) and HTTP status
400, 404, 422, or 500.
"""

from __future__ import annotations

import hashlib
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .analysis import (
    AlreadySelectedError,
    ExcludedPracticeError,
    NotAlternativesError,
    NotSelectedError,
    Selection,
    SelectionIncompleteError,
    SelectionReport,
    UnknownPracticeError,
    compose_plan,
    select_by_objectives,
    substitute,
    validate_selection,
)
from .mapio import export_json_graph, practice_to_dict
from .model import AgileMap, ObjectiveTag

__all__ = ["create_app", "report_to_dict", "plan_to_dict"]


class _BadRequest(Exception):
    def __init__(self, message: str):
        self.message = message


def _error(status: int, code: str, message: str, details: Any = None) -> JSONResponse:
    return JSONResponse(
        {"code": code, "message": message, "details": details}, status_code=status
    )


def report_to_dict(report: SelectionReport) -> dict:
    return {
        "closure": list(report.closure),
        "missingRequired": list(report.missing_required),
        "supportSuggestions": [
            {"id": s.id, "justification": s.justification}
            for s in report.support_suggestions
        ],
        "alternativeHints": [
            {"missing": h.missing, "alternatives": list(h.alternatives)}
            for h in report.alternative_hints
        ],
        "warnings": list(report.warnings),
    }


def plan_to_dict(plan) -> dict:
    return {
        "stages": [list(stage) for stage in plan.stages],
        "byCategory": {
            category.value: list(ids) for category, ids in plan.by_category
        },
    }


async def _json_body(request: Request) -> dict:
    try:
        body = await request.json()
    except Exception:
        raise _BadRequest("request body is not valid JSON") from None
    if not isinstance(body, dict):
        raise _BadRequest("request body must be a JSON object")
    return body


def _selection_from(body: dict) -> Selection:
    chosen = body.get("chosen")
    if not isinstance(chosen, list) or not all(isinstance(c, str) for c in chosen):
        raise _BadRequest("'chosen' must be a list of practice id strings")
    include_excluded = body.get("includeExcluded", False)
    if not isinstance(include_excluded, bool):
        raise _BadRequest("'includeExcluded' must be a boolean")
    return Selection(chosen=frozenset(chosen), include_excluded=include_excluded)


def create_app(agile_map: AgileMap, ui_dir: str | Path | None = None) -> FastAPI:
    """Build the API application for one immutable map.

    ``ui_dir`` optionally mounts a directory of built static assets at the
    web root, after the API routes.
    """
    app = FastAPI(title="agilemap", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    map_body = export_json_graph(agile_map)
    map_etag = '"' + hashlib.sha256(map_body.encode("utf-8")).hexdigest() + '"'

    @app.exception_handler(Exception)
    async def _unhandled(request: Request, exc: Exception) -> JSONResponse:
        return _error(500, "internal_error", str(exc))

    @app.get("/api/map")
    def get_map(request: Request) -> Response:
        if request.headers.get("if-none-match") == map_etag:
            return Response(status_code=304, headers={"ETag": map_etag})
        return Response(
            content=map_body,
            media_type="application/json",
            headers={"ETag": map_etag},
        )

    @app.post("/api/selection/validate")
    async def post_validate(request: Request) -> Response:
        try:
            selection = _selection_from(await _json_body(request))
        except _BadRequest as exc:
            return _error(400, "malformed_body", exc.message)
        try:
            report = validate_selection(agile_map, selection)
        except UnknownPracticeError as exc:
            return _error(404, "unknown_practice", str(exc), {"practices": list(exc.practice_ids)})
        except ExcludedPracticeError as exc:
            return _error(422, "excluded_practice", str(exc), {"practices": list(exc.practice_ids)})
        return JSONResponse(report_to_dict(report))

    @app.post("/api/selection/substitute")
    async def post_substitute(request: Request) -> Response:
        try:
            body = await _json_body(request)
            selection = _selection_from(body)
            from_id = body.get("from")
            to_id = body.get("to")
            if not isinstance(from_id, str) or not isinstance(to_id, str):
                raise _BadRequest("'from' and 'to' must be practice id strings")
        except _BadRequest as exc:
            return _error(400, "malformed_body", exc.message)
        try:
            updated = substitute(agile_map, selection, from_id, to_id)
        except UnknownPracticeError as exc:
            return _error(404, "unknown_practice", str(exc), {"practices": list(exc.practice_ids)})
        except NotSelectedError as exc:
            return _error(422, "not_selected", str(exc), {"practice": exc.practice_id})
        except AlreadySelectedError as exc:
            return _error(422, "already_selected", str(exc), {"practice": exc.practice_id})
        except NotAlternativesError as exc:
            return _error(
                422,
                "not_alternatives",
                str(exc),
                {"from": exc.source, "to": exc.target, "actualRelation": exc.actual_relation},
            )
        return JSONResponse({"chosen": sorted(updated.chosen)})

    @app.post("/api/plan")
    async def post_plan(request: Request) -> Response:
        try:
            selection = _selection_from(await _json_body(request))
        except _BadRequest as exc:
            return _error(400, "malformed_body", exc.message)
        try:
            plan = compose_plan(agile_map, selection)
        except UnknownPracticeError as exc:
            return _error(404, "unknown_practice", str(exc), {"practices": list(exc.practice_ids)})
        except ExcludedPracticeError as exc:
            return _error(422, "excluded_practice", str(exc), {"practices": list(exc.practice_ids)})
        except SelectionIncompleteError as exc:
            return _error(
                422,
                "selection_incomplete",
                str(exc),
                {"missingRequired": list(exc.report.missing_required)},
            )
        return JSONResponse(plan_to_dict(plan))

    @app.get("/api/practices")
    def get_practices(request: Request) -> Response:
        raw_tags = request.query_params.getlist("objective")
        if raw_tags:
            tags = []
            for raw in raw_tags:
                try:
                    tags.append(ObjectiveTag.parse(raw))
                except ValueError as exc:
                    return _error(400, "unknown_objective", str(exc), {"objective": raw})
            wanted = select_by_objectives(agile_map, tags)
            selected = [p for p in agile_map.practices if p.id in wanted]
        else:
            selected = [p for p in agile_map.practices if not p.excluded]
        return JSONResponse([practice_to_dict(p) for p in selected])

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
