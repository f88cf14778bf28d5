"""Session-oriented HTTP API for the interactive labeling loop.

Sessions live in memory (optionally snapshotted to disk as JSON). Labeling
mutations serialize per session; synthesis runs on a worker thread, answers
inline when it finishes within one second, and otherwise hands out a polling
status URL. A newer synthesis request supersedes (cancels) the one in
flight for the same session.
"""

from __future__ import annotations

import json
import threading
import uuid
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .dataset import Dataset, EditRequest, LabelSet, load_dataset, resolve_clicks, serialize_dataset
from .dsl import action_from_dict, print_program, run_program
from .errors import SynthesisCancelled, SynthesisTimeout, UserError
from .search import Deadline
from .synth import SynthesisMode, synthesize

INLINE_WAIT_S = 1.0
POLARITIES = ("positive", "negative")


class Session:
    def __init__(self, dataset: Dataset):
        self.id = uuid.uuid4().hex
        self.dataset = dataset
        self.labels: dict[str, str] = {}
        self.version = 0
        self.lock = threading.Lock()
        self.synth_token = 0
        self.synth_state = "idle"  # idle | running | done | error
        self.synth_result: Optional[dict] = None
        self.synth_error: Optional[str] = None
        self.synth_done = threading.Event()

    def object_summaries(self) -> list[dict]:
        return [
            {
                "id": o.id,
                "class": o.class_name,
                "region": {"x": o.region.x, "y": o.region.y, "w": o.region.w, "h": o.region.h},
                "attributes": dict(o.attributes),
            }
            for o in self.dataset.objects
        ]

    def snapshot_dict(self) -> dict:
        return {
            "id": self.id,
            "dataset": serialize_dataset(self.dataset),
            "labels": dict(self.labels),
            "version": self.version,
            "last_result": self.synth_result,
        }


def create_app(snapshot_dir=None, ui_dir=None) -> FastAPI:
    app = FastAPI(title="latticeselect")
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()
    snapshot_path = Path(snapshot_dir) if snapshot_dir else None
    if snapshot_path:
        snapshot_path.mkdir(parents=True, exist_ok=True)

    def snapshot(session: Session) -> None:
        if snapshot_path is None:
            return
        out = snapshot_path / f"{session.id}.json"
        out.write_text(json.dumps(session.snapshot_dict(), indent=2), encoding="utf-8")

    def get_session(session_id: str) -> Optional[Session]:
        with registry_lock:
            return sessions.get(session_id)

    @app.post("/api/sessions")
    async def create_session(request: Request):
        body = await request.body()
        try:
            dataset = load_dataset(body)
        except UserError as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        session = Session(dataset)
        with registry_lock:
            sessions[session.id] = session
        snapshot(session)
        return {"id": session.id, "objects": session.object_summaries()}

    @app.get("/api/sessions/{session_id}/objects")
    def get_objects(session_id: str):
        session = get_session(session_id)
        if session is None:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        with session.lock:
            result = session.synth_result if session.synth_state == "done" else None
            return {
                "objects": session.object_summaries(),
                "labels": dict(session.labels),
                "selection": result["selected"] if result else None,
                "program": result["program"] if result else None,
                "version": session.version,
                "image_url": session.dataset.image_url,
            }

    @app.put("/api/sessions/{session_id}/labels")
    async def put_label(session_id: str, request: Request):
        session = get_session(session_id)
        if session is None:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        body = await request.json()
        polarity = body.get("polarity")
        if polarity is not None and polarity not in POLARITIES:
            return JSONResponse({"error": f"bad polarity {polarity!r}"}, status_code=400)
        matched: Optional[str]
        if "object" in body:
            matched = body["object"]
            if matched not in session.dataset.object_ids:
                return JSONResponse({"error": f"unknown object {matched!r}"}, status_code=404)
        elif "click" in body:
            point = body["click"]
            if not isinstance(point, (list, tuple)) or len(point) != 2:
                return JSONResponse({"error": "click must be [x, y]"}, status_code=400)
            matched = resolve_clicks(session.dataset, [tuple(point)])[0]
        else:
            return JSONResponse({"error": "need 'object' or 'click'"}, status_code=400)
        with session.lock:
            if matched is not None:
                if polarity is None:
                    session.labels.pop(matched, None)
                else:
                    session.labels[matched] = polarity
                session.version += 1
            labels = dict(session.labels)
            version = session.version
        snapshot(session)
        return {"labels": labels, "matched": matched, "version": version}

    def run_synthesis(session: Session, token: int, action_dict: dict, mode: SynthesisMode,
                      timeout_s: float) -> None:
        def abort_check():
            if session.synth_token != token:
                raise SynthesisCancelled()

        try:
            action = action_from_dict(action_dict)
            labels = LabelSet(
                positive_ids=tuple(
                    oid for oid, pol in session.labels.items() if pol == "positive"
                ),
                negative_ids=tuple(
                    oid for oid, pol in session.labels.items() if pol == "negative"
                ),
            )
            report = synthesize(
                session.dataset,
                EditRequest(action, labels),
                mode=mode,
                deadline=Deadline(timeout_s, abort_check),
            )
            selected = run_program(report.program, session.dataset).object_ids
            result = {
                "program": print_program(report.program),
                "selected": list(selected),
                "stats": report.stats_dict(),
            }
            with session.lock:
                if session.synth_token == token:
                    session.synth_state = "done"
                    session.synth_result = result
                    session.synth_done.set()
            snapshot(session)
        except SynthesisCancelled:
            pass
        except (UserError, SynthesisTimeout) as exc:
            with session.lock:
                if session.synth_token == token:
                    session.synth_state = "error"
                    session.synth_error = f"{type(exc).__name__}: {exc}"
                    session.synth_done.set()

    @app.post("/api/sessions/{session_id}/synthesize")
    async def post_synthesize(session_id: str, request: Request):
        session = get_session(session_id)
        if session is None:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        body = await request.json() if await request.body() else {}
        action_dict = body.get("action", {"op": "Remove"})
        try:
            mode = SynthesisMode.parse(body.get("mode", "full"))
        except UserError as exc:
            return JSONResponse({"error": str(exc)}, status_code=400)
        timeout_s = float(body.get("timeout_s", 60.0))

        positives = [oid for oid, pol in session.labels.items() if pol == "positive"]
        if not positives:
            return JSONResponse(
                {"error": "at least one positive label is required"}, status_code=422
            )
        with session.lock:
            session.synth_token += 1
            token = session.synth_token
            session.synth_state = "running"
            session.synth_result = None
            session.synth_error = None
            session.synth_done = threading.Event()
            done = session.synth_done
        worker = threading.Thread(
            target=run_synthesis, args=(session, token, action_dict, mode, timeout_s), daemon=True
        )
        worker.start()
        done.wait(INLINE_WAIT_S)
        with session.lock:
            if session.synth_token == token and session.synth_state == "done":
                return dict(session.synth_result, state="done")
            if session.synth_token == token and session.synth_state == "error":
                return JSONResponse(
                    {"error": session.synth_error, "state": "error"}, status_code=422
                )
        return JSONResponse(
            {"state": "running", "status_url": f"/api/sessions/{session_id}/synthesize/status"},
            status_code=202,
        )

    @app.get("/api/sessions/{session_id}/synthesize/status")
    def synth_status(session_id: str):
        session = get_session(session_id)
        if session is None:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        with session.lock:
            state = session.synth_state
            if state == "done":
                return dict(session.synth_result, state="done")
            if state == "error":
                return {"state": "error", "error": session.synth_error}
            return {"state": state}

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    return app
