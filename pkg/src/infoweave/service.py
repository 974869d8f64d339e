"""HTTP service exposing the pipeline with per-stage intervention.

Each project persists as plain documents in a data directory (atomic
temp-file-plus-rename writes, no database), and every mutation bumps a
revision checked optimistically on writes: a stale PUT conflicts instead of
clobbering the editor's state.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
from dataclasses import dataclass, field, replace
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from .blueprint import Blueprint, default_canvas, make_blueprint
from .docio import (
    DocumentError,
    Override,
    blueprint_from_dict,
    blueprint_to_dict,
    frame_from_dict,
    frame_to_dict,
    ranking_to_dict,
)
from .model import InvalidFrameError, LayoutKind, StoryFrame, compute_metrics, parse_layout_kind, validate_frame
from .pipeline import build_frame, collect_icons
from .providers import Provider, ProviderConfig, ProviderError, make_provider
from .recommend import score_layouts
from .render import render

PROJECT_SCHEMA = "project/1"


class ServiceError(Exception):
    def __init__(self, status: int, code: str, message: str, details: dict | None = None):
        self.status = status
        self.code = code
        self.message = message
        self.details = details or {}
        super().__init__(message)


@dataclass
class Project:
    id: str
    revision: int
    source_text: str
    goal: str
    frame: StoryFrame
    chosen_layout: LayoutKind | None = None
    blueprint: Blueprint | None = None
    overrides: list[Override] = field(default_factory=list)


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=path.suffix)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


class ProjectStore:
    """Directory-backed project persistence with an in-memory cache."""

    def __init__(self, data_dir: Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._cache: dict[str, Project] = {}
        self._lock = threading.Lock()

    def _dir(self, project_id: str) -> Path:
        return self.data_dir / project_id

    def next_id(self) -> str:
        with self._lock:
            taken = {p.name for p in self.data_dir.iterdir() if p.is_dir()}
            n = 1
            while f"p{n:04d}" in taken:
                n += 1
            return f"p{n:04d}"

    def save(self, project: Project) -> None:
        base = self._dir(project.id)
        # Write the dependent documents first; meta.json (with the revision)
        # lands last so an acknowledged revision always has its files.
        _atomic_write(base / "storyframe.json", json.dumps(frame_to_dict(project.frame), indent=2, ensure_ascii=False) + "\n")
        if project.blueprint is not None:
            doc = blueprint_to_dict(project.blueprint, project.overrides)
            _atomic_write(base / "blueprint.json", json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
        meta = {
            "schema_version": PROJECT_SCHEMA,
            "id": project.id,
            "revision": project.revision,
            "source_text": project.source_text,
            "goal": project.goal,
            "chosen_layout": project.chosen_layout.value if project.chosen_layout else None,
            "has_blueprint": project.blueprint is not None,
        }
        _atomic_write(base / "meta.json", json.dumps(meta, indent=2, ensure_ascii=False) + "\n")
        with self._lock:
            self._cache[project.id] = project

    def load(self, project_id: str) -> Project:
        with self._lock:
            if project_id in self._cache:
                return self._cache[project_id]
        base = self._dir(project_id)
        meta_path = base / "meta.json"
        if not meta_path.exists():
            raise ServiceError(404, "project_not_found", f"no project {project_id!r}")
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        if meta.get("schema_version") != PROJECT_SCHEMA:
            raise ServiceError(500, "bad_project_document", f"unsupported project schema in {project_id!r}")
        frame = frame_from_dict(json.loads((base / "storyframe.json").read_text(encoding="utf-8")))
        blueprint = None
        overrides: list[Override] = []
        if meta.get("has_blueprint") and (base / "blueprint.json").exists():
            blueprint, overrides = blueprint_from_dict(json.loads((base / "blueprint.json").read_text(encoding="utf-8")))
        project = Project(
            id=meta["id"],
            revision=int(meta["revision"]),
            source_text=meta.get("source_text", ""),
            goal=meta.get("goal", ""),
            frame=frame,
            chosen_layout=parse_layout_kind(meta["chosen_layout"]) if meta.get("chosen_layout") else None,
            blueprint=blueprint,
            overrides=overrides,
        )
        with self._lock:
            self._cache[project_id] = project
        return project


@dataclass(frozen=True)
class ServiceSettings:
    data_dir: Path
    provider_config: ProviderConfig = ProviderConfig(kind="mock")


def _error_response(exc: ServiceError) -> JSONResponse:
    body = {"error": {"code": exc.code, "message": exc.message, **exc.details}}
    return JSONResponse(status_code=exc.status, content=body)


def _violations_payload(violations) -> dict:
    return {"violations": [{"path": v.path, "rule": v.rule, "message": v.message} for v in violations]}


def create_app(settings: ServiceSettings, provider: Provider | None = None) -> FastAPI:
    app = FastAPI(title="infoweave", docs_url=None, redoc_url=None)
    store = ProjectStore(settings.data_dir)
    prov = provider if provider is not None else make_provider(settings.provider_config)
    mutation_lock = threading.Lock()

    @app.exception_handler(ServiceError)
    async def service_error_handler(_: Request, exc: ServiceError):
        return _error_response(exc)

    def _expect_revision(project: Project, payload: dict) -> None:
        revision = payload.get("revision")
        if not isinstance(revision, int):
            raise ServiceError(400, "missing_revision", "body must carry the expected integer revision")
        if revision != project.revision:
            raise ServiceError(
                409,
                "stale_revision",
                f"expected revision {project.revision}, got {revision}",
                {"revision": project.revision},
            )

    async def _json_body(request: Request) -> dict:
        try:
            payload = json.loads(await request.body())
        except json.JSONDecodeError as exc:
            raise ServiceError(400, "invalid_json", f"request body is not JSON: {exc.msg}")
        if not isinstance(payload, dict):
            raise ServiceError(400, "invalid_json", "request body must be a JSON object")
        return payload

    @app.post("/projects", status_code=201)
    async def create_project(request: Request):
        payload = await _json_body(request)
        source_text = payload.get("source_text")
        goal = payload.get("goal")
        if not isinstance(source_text, str) or not source_text.strip():
            raise ServiceError(400, "missing_source_text", "source_text must be a non-empty string")
        if not isinstance(goal, str) or not goal.strip():
            raise ServiceError(400, "missing_goal", "goal must be a non-empty string")
        seed = payload.get("seed")
        if seed is not None and not isinstance(seed, int):
            raise ServiceError(400, "invalid_seed", "seed must be an integer")
        try:
            frame = build_frame(source_text, goal, prov, seed=seed)
        except InvalidFrameError as exc:
            raise ServiceError(422, "validation_failure", str(exc), _violations_payload(exc.violations))
        except ProviderError as exc:
            raise ServiceError(502, "provider_error", str(exc))
        with mutation_lock:
            project = Project(id=store.next_id(), revision=1, source_text=source_text, goal=goal, frame=frame)
            store.save(project)
        return {"id": project.id, "revision": project.revision, "storyframe": frame_to_dict(frame)}

    @app.get("/projects/{project_id}/storyframe")
    async def get_storyframe(project_id: str):
        project = store.load(project_id)
        return {"revision": project.revision, "storyframe": frame_to_dict(project.frame)}

    @app.put("/projects/{project_id}/storyframe")
    async def put_storyframe(project_id: str, request: Request):
        payload = await _json_body(request)
        with mutation_lock:
            project = store.load(project_id)
            _expect_revision(project, payload)
            if "storyframe" not in payload:
                raise ServiceError(400, "missing_storyframe", "body must carry a storyframe document")
            try:
                frame = frame_from_dict(payload["storyframe"])
            except DocumentError as exc:
                raise ServiceError(400, "malformed_document", str(exc))
            violations = validate_frame(frame)
            if violations:
                raise ServiceError(422, "validation_failure", "storyframe is invalid", _violations_payload(violations))
            updated = replace_project(project, frame=frame)
            store.save(updated)
        return {"revision": updated.revision, "storyframe": frame_to_dict(updated.frame)}

    @app.post("/projects/{project_id}/stylization:refresh")
    async def refresh_stylization(project_id: str, request: Request):
        payload = await _json_body(request)
        seed = payload.get("seed")
        if not isinstance(seed, int):
            raise ServiceError(400, "invalid_seed", "body must carry an integer seed")
        with mutation_lock:
            project = store.load(project_id)
            summary = "\n".join([project.frame.goal] + [p.subtitle for p in project.frame.pieces])
            try:
                stylization = prov.suggest_stylization(summary, seed=seed)
            except ProviderError as exc:
                raise ServiceError(502, "provider_error", str(exc))
            frame = replace(project.frame, stylization=stylization)
            updated = replace_project(project, frame=frame)
            store.save(updated)
        return {
            "revision": updated.revision,
            "stylization": frame_to_dict(updated.frame)["stylization"],
        }

    @app.get("/projects/{project_id}/layouts")
    async def rank_layouts(project_id: str):
        project = store.load(project_id)
        ranking = score_layouts(compute_metrics(project.frame))
        return {"revision": project.revision, "ranking": ranking_to_dict(ranking)}

    @app.post("/projects/{project_id}/blueprint")
    async def build_project_blueprint(project_id: str, request: Request):
        payload = await _json_body(request)
        layout_name = payload.get("layout")
        if not isinstance(layout_name, str):
            raise ServiceError(400, "missing_layout", "body must name a layout kind")
        try:
            layout = parse_layout_kind(layout_name)
        except ValueError as exc:
            raise ServiceError(400, "unknown_layout", str(exc))
        overrides_raw = payload.get("overrides", [])
        if not isinstance(overrides_raw, list):
            raise ServiceError(400, "invalid_overrides", "overrides must be a list")
        overrides = []
        for entry in overrides_raw:
            if not isinstance(entry, dict) or not isinstance(entry.get("id"), str):
                raise ServiceError(400, "invalid_overrides", "each override needs a string id")
            overrides.append(
                Override(
                    id=entry["id"],
                    dx=float(entry.get("dx", 0.0)),
                    dy=float(entry.get("dy", 0.0)),
                    sx=float(entry.get("sx", 1.0)),
                    sy=float(entry.get("sy", 1.0)),
                )
            )
        with mutation_lock:
            project = store.load(project_id)
            blueprint = make_blueprint(project.frame, layout, canvas=default_canvas(layout))
            updated = replace_project(project, chosen_layout=layout, blueprint=blueprint, overrides=overrides)
            store.save(updated)
        return {"revision": updated.revision, "blueprint": blueprint_to_dict(blueprint, overrides)}

    @app.get("/projects/{project_id}/render.svg")
    async def render_svg(project_id: str):
        project = store.load(project_id)
        if project.blueprint is None:
            raise ServiceError(404, "missing_blueprint", "build a blueprint before rendering")
        warnings: list[str] = []
        assets = collect_icons(project.frame, prov, warnings)
        svg = render(
            project.frame,
            project.blueprint,
            project.frame.stylization,
            assets,
            overrides=project.overrides,
            warnings=warnings,
        )
        return Response(content=svg, media_type="image/svg+xml")

    app.state.store = store
    app.state.provider = prov
    return app


def replace_project(project: Project, **changes) -> Project:
    """Copy a project with changes and the revision bumped by exactly one."""
    merged = {
        "id": project.id,
        "revision": project.revision + 1,
        "source_text": project.source_text,
        "goal": project.goal,
        "frame": project.frame,
        "chosen_layout": project.chosen_layout,
        "blueprint": project.blueprint,
        "overrides": project.overrides,
    }
    merged.update(changes)
    return Project(**merged)
