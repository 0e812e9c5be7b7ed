"""HTTP API backing the review dashboard.

Every pipeline stage is invocable over JSON; long-running simulations run
as background jobs with polled status. Map edits use optimistic
concurrency: each PUT must carry the version it read, and a stale version
is answered with 409 so a second client cannot silently clobber a review.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import FileResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from ..generator import DialogActMap
from ..generator.goals import UnrevisedMapError
from ..jsonio import load_json, load_jsonl
from ..remediator import UnknownVertex, enumerate_paths
from ..schema import BotSyntaxError, SchemaError, ValidationError
from .config import PipelineConfig
from .pipeline import (
    EPISODES_FILE,
    GRAPH_FILE,
    REPORT_FILE,
    StageOrderError,
    generate_stage,
    load_maps,
    parse_stage,
    remediate_stage,
    save_maps,
    simulate_stage,
)
from .store import (
    JOB_DONE,
    JOB_FAILED,
    JOB_RUNNING,
    STAGES,
    SessionStore,
    StageTransitionError,
    UnknownSession,
)
from ..jsonio import dumps


class CreateSessionBody(BaseModel):
    name: str
    bot_definition: dict
    utterances: dict | None = None
    config: dict = Field(default_factory=dict)


class PutMapsBody(BaseModel):
    version: int
    maps: dict[str, dict]


class PutOntologyBody(BaseModel):
    ontology: dict


class GoalsBody(BaseModel):
    cap: int | None = None
    goal_source: str | None = None


def _stage_at_least(session, stage: str) -> bool:
    return STAGES.index(session.stage) >= STAGES.index(stage)


def create_api(
    store: SessionStore,
    data_root: str | Path,
    static_dir: str | Path | None = None,
    job_workers: int = 2,
) -> FastAPI:
    app = FastAPI(title="dialogforge", docs_url=None, redoc_url=None)
    data_root = Path(data_root)
    data_root.mkdir(parents=True, exist_ok=True)
    executor = ThreadPoolExecutor(max_workers=job_workers)
    jobs_lock = threading.Lock()

    def session_or_404(session_id: str):
        try:
            return store.get_session(session_id)
        except UnknownSession:
            raise HTTPException(404, f"no session {session_id!r}")

    def config_for(session) -> PipelineConfig:
        return PipelineConfig.from_doc(load_json(Path(session.data_dir) / "config_snapshot.json"))

    # -- sessions -------------------------------------------------------------

    @app.post("/api/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        try:
            config = PipelineConfig.from_doc(body.config) if body.config else PipelineConfig()
        except (TypeError, ValueError) as exc:
            raise HTTPException(422, f"bad config: {exc}")
        entry = store.create_session(body.name, dumps(config.to_doc(), indent=None), "")
        data_dir = data_root / entry.session_id
        data_dir.mkdir(parents=True, exist_ok=True)
        import sqlite3  # tiny update; the store has no setter for data_dir

        with sqlite3.connect(store.db_path) as conn:
            conn.execute(
                "UPDATE sessions SET data_dir = ? WHERE session_id = ?",
                (str(data_dir), entry.session_id),
            )

        bot_path = data_dir / "upload_bot.json"
        bot_path.write_text(dumps(body.bot_definition), encoding="utf-8")
        sidecar_path = None
        if body.utterances:
            sidecar_path = data_dir / "upload_utterances.json"
            sidecar_path.write_text(dumps(body.utterances), encoding="utf-8")
        try:
            parse_stage(bot_path, data_dir, config, utterances_sidecar=sidecar_path, force=True)
        except (BotSyntaxError, SchemaError, ValidationError) as exc:
            store.delete_session(entry.session_id)
            raise HTTPException(422, exc.to_dict())
        store.advance_stage(entry.session_id, "parsed")
        return store.get_session(entry.session_id).to_doc()

    @app.get("/api/sessions")
    def list_sessions():
        return [s.to_doc() for s in store.list_sessions()]

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str):
        session = session_or_404(session_id)
        doc = session.to_doc()
        doc["metrics"] = store.metrics_for(session_id)
        running = store.running_job(session_id)
        doc["running_job"] = running["job_id"] if running else None
        return doc

    # -- maps / ontology (the human review step) -------------------------------

    @app.get("/api/sessions/{session_id}/dialog-act-maps")
    def get_maps(session_id: str):
        session = session_or_404(session_id)
        if not _stage_at_least(session, "parsed"):
            raise HTTPException(409, "session not parsed yet")
        maps = load_maps(session.data_dir)
        return {
            "version": session.map_version,
            "maps": {dialog: dact.to_doc() for dialog, dact in maps.items()},
        }

    @app.put("/api/sessions/{session_id}/dialog-act-maps")
    def put_maps(session_id: str, body: PutMapsBody):
        session = session_or_404(session_id)
        if not _stage_at_least(session, "parsed"):
            raise HTTPException(409, "session not parsed yet")
        if body.version != session.map_version:
            raise HTTPException(
                409,
                f"stale map version {body.version} (current {session.map_version}); reload",
            )
        existing = load_maps(session.data_dir)
        if set(body.maps) != set(existing):
            raise HTTPException(422, "map set must cover exactly the parsed dialogs")
        parsed = {}
        for dialog, doc in body.maps.items():
            try:
                dact = DialogActMap.from_doc(doc)
            except (KeyError, TypeError) as exc:
                raise HTTPException(422, f"bad map for {dialog!r}: {exc}")
            if dact.dialog != dialog:
                raise HTTPException(422, f"map under key {dialog!r} names {dact.dialog!r}")
            if not dact.intent_success_message or not dact.dialog_success_message:
                raise HTTPException(422, f"map {dialog!r} must keep both golden-label acts")
            parsed[dialog] = dact
        save_maps(session.data_dir, parsed)
        version = store.bump_map_version(session_id)
        if all(d.revised for d in parsed.values()):
            try:
                store.advance_stage(session_id, "revised")
            except StageTransitionError:
                pass  # already past 'revised'
        return {"version": version, "stage": store.get_session(session_id).stage}

    @app.put("/api/sessions/{session_id}/ontology")
    def put_ontology(session_id: str, body: PutOntologyBody):
        session = session_or_404(session_id)
        if not _stage_at_least(session, "parsed"):
            raise HTTPException(409, "session not parsed yet")
        from ..generator.ontology import Ontology

        try:
            ontology = Ontology.from_doc(body.ontology)
        except (KeyError, TypeError) as exc:
            raise HTTPException(422, f"bad ontology document: {exc}")
        from ..jsonio import dump_json

        dump_json(Path(session.data_dir) / "ontology.json", ontology.to_doc())
        return {"ok": True}

    # -- goals ------------------------------------------------------------------

    @app.post("/api/sessions/{session_id}/goals")
    def post_goals(session_id: str, body: GoalsBody | None = None):
        session = session_or_404(session_id)
        config = config_for(session)
        if body:
            if body.cap is not None:
                config.per_intent_cap = body.cap
            if body.goal_source is not None:
                config.goal_source = body.goal_source
        try:
            summary = generate_stage(session.data_dir, config)
        except UnrevisedMapError as exc:
            raise HTTPException(409, exc.to_dict())
        except StageOrderError as exc:
            raise HTTPException(409, exc.to_dict())
        store.advance_stage(session_id, "goals_ready")
        return summary

    # -- simulation jobs ---------------------------------------------------------

    def _run_simulation_job(job_id: str, session_id: str):
        store.update_job(job_id, JOB_RUNNING)
        try:
            session = store.get_session(session_id)
            config = config_for(session)
            simulate_stage(session.data_dir, config)
            store.advance_stage(session_id, "simulated")
            history = store.history()
            summary = remediate_stage(session.data_dir, config, history=history)
            store.record_metrics(
                session_id,
                {"completion_rate": summary["completion_rate"], "macro_f1": summary["macro_f1"]},
            )
            store.advance_stage(session_id, "remediated")
            store.update_job(job_id, JOB_DONE)
        except Exception as exc:  # noqa: BLE001 - job boundary
            store.update_job(job_id, JOB_FAILED, error=str(exc))

    @app.post("/api/sessions/{session_id}/simulate", status_code=202)
    def post_simulate(session_id: str):
        session = session_or_404(session_id)
        if not _stage_at_least(session, "goals_ready"):
            raise HTTPException(409, "goals not generated yet")
        with jobs_lock:
            if store.running_job(session_id):
                raise HTTPException(409, "a simulation is already running for this session")
            job_id = store.create_job(session_id, "simulate")
        executor.submit(_run_simulation_job, job_id, session_id)
        return {"job_id": job_id, "status": "queued"}

    @app.get("/api/sessions/{session_id}/jobs/{job_id}")
    def get_job(session_id: str, job_id: str):
        session_or_404(session_id)
        job = store.get_job(job_id)
        if job is None or job["session_id"] != session_id:
            raise HTTPException(404, f"no job {job_id!r}")
        return job

    # -- results -------------------------------------------------------------------

    @app.get("/api/sessions/{session_id}/report")
    def get_report(session_id: str):
        session = session_or_404(session_id)
        report_path = Path(session.data_dir) / REPORT_FILE
        if not report_path.exists():
            raise HTTPException(409, "report not available: session not remediated")
        return load_json(report_path)

    @app.get("/api/sessions/{session_id}/episodes/{episode_id}")
    def get_episode(session_id: str, episode_id: str):
        session = session_or_404(session_id)
        episodes_path = Path(session.data_dir) / EPISODES_FILE
        if not episodes_path.exists():
            raise HTTPException(409, "episodes not available: session not simulated")
        for doc in load_jsonl(episodes_path):
            if doc.get("goal_id") == episode_id:
                return doc
        raise HTTPException(404, f"no episode {episode_id!r}")

    @app.get("/api/sessions/{session_id}/paths")
    def get_paths(
        session_id: str,
        source: str = Query(...),
        target: str = Query(...),
        max_length: int | None = Query(default=None),
        max_paths: int = Query(default=1000),
    ):
        session = session_or_404(session_id)
        graph_path = Path(session.data_dir) / GRAPH_FILE
        if not graph_path.exists():
            raise HTTPException(409, "graph not available: session not parsed")
        graph_doc = load_json(graph_path)
        adjacency: dict[str, list[str]] = {v: [] for v in graph_doc["vertices"]}
        for edge in graph_doc["edges"]:
            adjacency[edge["source"]].append(edge["target"])
        try:
            query = enumerate_paths(adjacency, source, target, max_length, max_paths)
        except UnknownVertex as exc:
            raise HTTPException(422, exc.to_dict())
        return {"source": source, "target": target, **query.to_doc()}

    # -- static dashboard ------------------------------------------------------------

    if static_dir is not None and Path(static_dir).is_dir():
        static_path = Path(static_dir)

        @app.get("/")
        def index():
            return FileResponse(static_path / "index.html")

        app.mount("/assets", StaticFiles(directory=static_path), name="assets")

    return app
