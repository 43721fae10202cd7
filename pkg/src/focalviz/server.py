"""Read-only HTTP API serving catalogs, documents, layouts, SVG exports, and
annotation explanations.

Stories load once at startup into immutable memory; every endpoint is a
pure function of path and query, so responses are byte-stable across
requests and restarts. All error bodies share one shape: {code, message, path}.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from .layout import (
    CardTooWide,
    LayoutConfig,
    LayoutError,
    UnknownViewTarget,
    View,
    build_layout,
    layout_to_dict,
)
from .model import NarrativeDocument, Span
from .render import GlyphStyle, render_timeline
from .store import load_story, scan_catalog, serialize_canonical

logger = logging.getLogger("focalviz.server")


@dataclass(frozen=True)
class ServerConfig:
    stories_dir: str | Path = "stories"
    host: str = "127.0.0.1"
    port: int = 8000
    layout: LayoutConfig = field(default_factory=LayoutConfig)
    style: GlyphStyle = field(default_factory=GlyphStyle)
    cors_origins: tuple[str, ...] = ()
    static_dir: str | Path | None = None

    def __post_init__(self) -> None:
        if not (0 < self.port < 65536):
            raise ValueError(f"port {self.port} out of range")


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code


def _error_response(request: Request, status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "path": request.url.path},
    )


def _json_bytes(payload: object) -> bytes:
    return (json.dumps(payload, ensure_ascii=False, indent=2) + "\n").encode("utf-8")


def create_app(config: ServerConfig) -> FastAPI:
    """Build the application with all stories loaded and validated."""
    catalog = scan_catalog(config.stories_dir)
    for skip in catalog.skipped:
        logger.warning("skipping %s: %s", skip.path, skip.reason)
    stories: dict[str, NarrativeDocument] = {
        entry.id: load_story(entry.path) for entry in catalog.entries
    }
    logger.info("serving %d stories from %s: %s", len(stories), catalog.directory,
                ", ".join(stories) or "(none)")

    app = FastAPI(title="focalviz", openapi_url=None, docs_url=None, redoc_url=None)

    if config.cors_origins:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(CORSMiddleware, allow_origins=list(config.cors_origins),
                           allow_methods=["GET"], allow_headers=["*"])

    @app.exception_handler(ApiError)
    async def handle_api_error(request: Request, exc: ApiError) -> JSONResponse:
        return _error_response(request, exc.status, exc.code, str(exc))

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(request: Request,
                                      exc: RequestValidationError) -> JSONResponse:
        first = exc.errors()[0] if exc.errors() else {}
        where = ".".join(str(part) for part in first.get("loc", ()))
        return _error_response(request, 400, "malformed_query",
                               f"{where}: {first.get('msg', 'invalid value')}")

    @app.exception_handler(StarletteHTTPException)
    async def handle_http_error(request: Request,
                                exc: StarletteHTTPException) -> JSONResponse:
        return _error_response(request, exc.status_code, "http_error", str(exc.detail))

    def get_story(story_id: str) -> NarrativeDocument:
        doc = stories.get(story_id)
        if doc is None:
            raise ApiError(404, "unknown_story", f"no story with id {story_id!r}")
        return doc

    def get_layout(doc: NarrativeDocument, view_text: str, width: int | None):
        try:
            view = View.parse(view_text)
        except ValueError as exc:
            raise ApiError(400, "malformed_view", str(exc)) from exc
        cfg = config.layout
        if width is not None:
            if width < 1:
                raise ApiError(400, "malformed_width", f"width must be positive, got {width}")
            cfg = replace(cfg, container_width=width)
        try:
            return build_layout(doc, view, cfg)
        except UnknownViewTarget as exc:
            raise ApiError(404, "unknown_view_target", str(exc)) from exc
        except CardTooWide as exc:
            raise ApiError(422, "card_too_wide", str(exc)) from exc
        except LayoutError as exc:
            raise ApiError(422, "layout_error", str(exc)) from exc

    @app.get("/api/stories")
    def list_stories() -> Response:
        payload = [{"id": e.id, "title": e.title} for e in catalog.entries]
        return Response(content=_json_bytes(payload), media_type="application/json")

    @app.get("/api/stories/{story_id}")
    def story_document(story_id: str) -> Response:
        doc = get_story(story_id)
        return Response(content=serialize_canonical(doc), media_type="application/json")

    @app.get("/api/stories/{story_id}/layout")
    def story_layout(story_id: str, view: str = "overview",
                     width: int | None = None) -> Response:
        doc = get_story(story_id)
        layout = get_layout(doc, view, width)
        return Response(content=_json_bytes(layout_to_dict(layout)),
                        media_type="application/json")

    @app.get("/api/stories/{story_id}/explanations/{event_id}/{character_id}")
    def explanation(story_id: str, event_id: str, character_id: str) -> Response:
        doc = get_story(story_id)
        found = doc.find_event(event_id)
        if found is None:
            raise ApiError(404, "unknown_event", f"no event with id {event_id!r}")
        scene, event = found
        annotation = event.annotation_for(character_id)
        if annotation is None:
            raise ApiError(404, "unknown_annotation",
                           f"event {event_id!r} has no annotation for {character_id!r}")
        exp = annotation.explanation
        payload = {
            "story": doc.id,
            "scene": scene.id,
            "scene_span": _span(scene.span),
            "event": event.id,
            "event_span": _span(event.span),
            "character": character_id,
            "rationale": exp.rationale if exp else "",
            "cues": [_span(c) for c in exp.cues] if exp else [],
            "unmatched_cues": list(exp.unmatched_cues) if exp else [],
        }
        return Response(content=_json_bytes(payload), media_type="application/json")

    @app.get("/api/stories/{story_id}/render.svg")
    def render_svg(story_id: str, request: Request, view: str = "overview",
                   width: int | None = None) -> Response:
        doc = get_story(story_id)
        layout = get_layout(doc, view, width)
        body = render_timeline(layout, doc, config.style).to_bytes()
        etag = '"' + hashlib.sha256(body).hexdigest() + '"'
        if request.headers.get("if-none-match") == etag:
            return Response(status_code=304, headers={"ETag": etag})
        return Response(content=body, media_type="image/svg+xml",
                        headers={"ETag": etag, "Cache-Control": "public, max-age=3600"})

    if config.static_dir is not None and Path(config.static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(config.static_dir), html=True),
                  name="ui")

    return app


def _span(span: Span) -> list[int]:
    return [span.start, span.end]


def serve(config: ServerConfig) -> None:
    """Run until terminated."""
    import uvicorn

    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
