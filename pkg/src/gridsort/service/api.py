"""Loopback HTTP API exposing the explorer session to the browser UI.

All errors come back as JSON bodies of the shape {code, message, detail}.
Unknown ids map to 404, malformed filters and parameters to 400.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import FileResponse, JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from ..errors import DecodeError, UnknownId
from ..imgscan import FilterSpec
from .session import SORT_MODES, Session


class FilterBody(BaseModel):
    name_substring: str | None = None
    mtime_range: tuple[float, float] | None = None  # seconds
    ctime_range: tuple[float, float] | None = None
    size_range: tuple[int, int] | None = None

    def to_spec(self) -> FilterSpec:
        def ns(rng):
            return None if rng is None else (round(rng[0] * 1e9), round(rng[1] * 1e9))

        return FilterSpec(
            name_substring=self.name_substring,
            mtime_range=ns(self.mtime_range),
            ctime_range=ns(self.ctime_range),
            size_range=tuple(self.size_range) if self.size_range else None,
        )


class RootsBody(BaseModel):
    roots: list[str] = Field(min_length=1)
    recursive: bool = False
    filter: FilterBody = Field(default_factory=FilterBody)


class SearchBody(BaseModel):
    query_ids: list[str] = Field(min_length=1)
    scope_ids: list[str] | None = None


def _error(status: int, code: str, message: str, detail: str | None = None) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"code": code, "message": message, "detail": detail},
    )


def create_app(session: Session, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="gridsort", docs_url=None, redoc_url=None)

    @app.exception_handler(RequestValidationError)
    async def on_validation(_req: Request, exc: RequestValidationError):
        return _error(400, "bad_request", "request failed validation", str(exc.errors()))

    @app.exception_handler(UnknownId)
    async def on_unknown(_req: Request, exc: UnknownId):
        return _error(404, "unknown_id", str(exc))

    @app.exception_handler(DecodeError)
    async def on_decode(_req: Request, exc: DecodeError):
        return _error(404, "decode_error", str(exc))

    @app.exception_handler(ValueError)
    async def on_value(_req: Request, exc: ValueError):
        return _error(400, "bad_request", str(exc))

    @app.post("/session/roots")
    def set_roots(body: RootsBody):
        try:
            spec = body.filter.to_spec()
        except ValueError as exc:
            return _error(400, "bad_filter", str(exc))
        return session.set_roots(body.roots, recursive=body.recursive, filter_spec=spec)

    @app.get("/grid")
    def grid(
        cols: int | None = Query(default=None, ge=1, le=256),
        mode: str | None = Query(default=None),
    ):
        if mode is not None and mode not in SORT_MODES:
            return _error(400, "bad_mode", f"mode must be one of {SORT_MODES}")
        return session.grid(cols=cols, mode=mode)

    @app.post("/search")
    def search(body: SearchBody):
        return session.search(body.query_ids, scope_ids=body.scope_ids)

    @app.get("/thumb/{image_id}")
    def thumb(image_id: str, edge: int = Query(default=160, ge=16, le=1024)):
        data = session.thumbnail_bytes(image_id, edge)
        return Response(content=data, media_type="image/png")

    @app.get("/image/{image_id}")
    def image(image_id: str):
        return FileResponse(session.image_path(image_id))

    @app.get("/progress")
    def progress():
        return session.progress()

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
