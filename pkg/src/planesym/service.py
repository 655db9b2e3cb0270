"""HTTP service hosting live survey sessions.

Responses and enrollments are persisted to an append-only JSONL event log;
replaying the log reconstructs the session state exactly, so a crash loses
at most the in-flight response.  Response POSTs are idempotent per
(participantId, taskId).  The results endpoint serves the same canonical
JSON bytes that cmd_analyze writes as summary.json.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import FileResponse, JSONResponse

from .analytics import MOST_AND_LEAST, SurveyResponse, TaskSpec
from .errors import SchemaError
from .reports import analyze_responses, canonical_json

DEFAULT_PORT_ENV = "PLANESYM_PORT"


@dataclass
class SessionConfig:
    session_id: str
    tasks: list[TaskSpec]
    assets: dict[str, str]
    experiment: int = 2
    time_limit_seconds: int = 30
    warmup_reveal_count: int = 3

    @staticmethod
    def from_json_dict(doc: dict, base_dir: Path | None = None) -> "SessionConfig":
        try:
            tasks = [TaskSpec.from_json_dict(t) for t in doc["tasks"]]
            cfg = SessionConfig(
                session_id=doc["sessionId"],
                tasks=tasks,
                assets=dict(doc.get("assets", {})),
                experiment=int(doc.get("experiment", 2)),
                time_limit_seconds=int(doc.get("timeLimitSeconds", 30)),
                warmup_reveal_count=int(doc.get("warmupRevealCount", 3)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise SchemaError(f"invalid session config: {e}") from e
        ids = [t.task_id for t in cfg.tasks]
        if len(set(ids)) != len(ids):
            raise SchemaError("duplicate task ids in session config")
        if base_dir is not None:
            cfg.assets = {k: str((base_dir / v).resolve()) if not Path(v).is_absolute()
                          else v for k, v in cfg.assets.items()}
        for oid, path in cfg.assets.items():
            if not Path(path).exists():
                raise SchemaError(f"asset for {oid!r} missing: {path}")
        referenced = {t.query for t in cfg.tasks}
        referenced |= {o for t in cfg.tasks for o in t.options}
        missing = referenced - set(cfg.assets)
        if cfg.assets and missing:
            raise SchemaError(f"tasks reference ornaments without assets: "
                              f"{sorted(missing)}")
        # apply the first-N reveal policy to warm-up ordering
        n = 0
        fixed = []
        for t in cfg.tasks:
            if t.warmup:
                n += 1
                if n > cfg.warmup_reveal_count and t.reveal_answer is not None:
                    t = TaskSpec(t.task_id, t.query, t.options, t.mode,
                                 t.time_limit_seconds, True, None)
            fixed.append(t)
        cfg.tasks = fixed
        return cfg

    @staticmethod
    def load(path) -> "SessionConfig":
        p = Path(path)
        return SessionConfig.from_json_dict(json.loads(p.read_text()),
                                            base_dir=p.parent)


@dataclass
class SessionState:
    participants: dict[str, str] = field(default_factory=dict)  # id -> name
    responses: dict[tuple[str, str], SurveyResponse] = field(default_factory=dict)
    order: list[tuple[str, str]] = field(default_factory=list)
    closed: bool = False

    def response_list(self) -> list[SurveyResponse]:
        return [self.responses[k] for k in self.order]


class SessionStore:
    """Event-sourced session state over an append-only JSONL file."""

    def __init__(self, config: SessionConfig, state_dir):
        self.config = config
        self.dir = Path(state_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.log_path = self.dir / f"{config.session_id}.events.jsonl"
        self.state = SessionState()
        self._lock = threading.Lock()
        self._tasks = {t.task_id: t for t in config.tasks}
        if self.log_path.exists():
            for line in self.log_path.read_text().splitlines():
                if line.strip():
                    self._apply(json.loads(line))

    def _apply(self, event: dict) -> None:
        kind = event.get("type")
        if kind == "participant":
            self.state.participants[event["participantId"]] = event.get("name", "")
        elif kind == "response":
            resp = SurveyResponse.from_json_dict(event)
            key = (resp.participant_id, resp.task_id)
            if key not in self.state.responses:
                self.state.responses[key] = resp
                self.state.order.append(key)
        elif kind == "close":
            self.state.closed = True

    def _append(self, event: dict) -> None:
        with self.log_path.open("a") as fh:
            fh.write(json.dumps(event, sort_keys=True) + "\n")
            fh.flush()

    def enroll(self, name: str) -> str:
        with self._lock:
            pid = f"p{len(self.state.participants) + 1:03d}"
            event = {"type": "participant", "participantId": pid, "name": name}
            self._append(event)
            self._apply(event)
            return pid

    def next_task(self, pid: str) -> TaskSpec | None:
        with self._lock:
            for t in self.config.tasks:
                if (pid, t.task_id) not in self.state.responses:
                    return t
            return None

    def record(self, resp: SurveyResponse) -> bool:
        """Append unless already present; returns True when newly stored."""
        with self._lock:
            key = (resp.participant_id, resp.task_id)
            if key in self.state.responses:
                return False
            event = {"type": "response", **resp.to_json_dict()}
            self._append(event)
            self._apply(event)
            return True

    def close(self) -> None:
        with self._lock:
            if not self.state.closed:
                self._append({"type": "close"})
                self._apply({"type": "close"})


def create_app(config: SessionConfig, state_dir) -> FastAPI:
    store = SessionStore(config, state_dir)
    app = FastAPI(title="planesym survey service")
    app.state.store = store

    @app.post("/api/participants")
    async def enroll(request: Request):
        try:
            body = await request.json() if await request.body() else {}
        except json.JSONDecodeError:
            return JSONResponse({"error": "malformed JSON"}, status_code=400)
        if store.state.closed:
            return JSONResponse({"error": "session closed"}, status_code=409)
        name = str(body.get("name", "")) if isinstance(body, dict) else ""
        pid = store.enroll(name)
        return {"participantId": pid}

    @app.get("/api/participants/{pid}/next-task")
    def next_task(pid: str):
        if pid not in store.state.participants:
            return JSONResponse({"error": "unknown participant"}, status_code=404)
        task = store.next_task(pid)
        if task is None:
            return {"done": True}
        doc = task.to_json_dict()
        # the correct answer is revealed only in the response to a submit,
        # never handed out with the task itself
        doc.pop("revealAnswer", None)
        doc["assetUrls"] = {oid: f"/assets/{oid}.png"
                            for oid in (task.query, *task.options)}
        return doc

    @app.post("/api/responses")
    async def submit(request: Request):
        try:
            body = await request.json()
        except json.JSONDecodeError:
            return JSONResponse({"error": "malformed JSON"}, status_code=400)
        if store.state.closed:
            return JSONResponse({"error": "session closed"}, status_code=409)
        required = {"participantId", "taskId", "mostSimilar"}
        if not isinstance(body, dict) or not required <= set(body):
            return JSONResponse(
                {"error": f"fields {sorted(required)} are required"},
                status_code=400)
        pid = body["participantId"]
        if pid not in store.state.participants:
            return JSONResponse({"error": "unknown participant"}, status_code=404)
        task = store._tasks.get(body["taskId"])
        if task is None:
            return JSONResponse({"error": "unknown task"}, status_code=400)
        most = body["mostSimilar"]
        least = body.get("leastSimilar")
        if most not in task.options:
            return JSONResponse({"error": "mostSimilar not among task options"},
                                status_code=400)
        if task.mode == MOST_AND_LEAST:
            if least is None:
                return JSONResponse({"error": "leastSimilar required"},
                                    status_code=400)
            if least not in task.options:
                return JSONResponse(
                    {"error": "leastSimilar not among task options"},
                    status_code=400)
        elif least is not None:
            return JSONResponse(
                {"error": "leastSimilar not allowed for single-pick tasks"},
                status_code=400)
        elapsed = body.get("elapsedMs")
        if elapsed is not None:
            try:
                elapsed = int(elapsed)
            except (TypeError, ValueError):
                return JSONResponse({"error": "elapsedMs must be an integer"},
                                    status_code=400)
        late = (elapsed is not None
                and elapsed > task.time_limit_seconds * 1000)
        resp = SurveyResponse(pid, task.task_id, most, least, elapsed, late)
        store.record(resp)
        out = {"accepted": True, "late": late}
        if task.warmup and task.reveal_answer is not None:
            out["reveal"] = task.reveal_answer
        return out

    @app.post("/api/close")
    def close_session():
        store.close()
        return {"closed": True}

    @app.get("/api/results")
    def results():
        if not store.state.closed:
            return JSONResponse({"error": "session still running"},
                                status_code=409)
        summary = analyze_responses(store.config.tasks, store.state.response_list(),
                                    store.config.experiment)
        return Response(content=canonical_json(summary),
                        media_type="application/json")

    @app.get("/assets/{ornament_id}.png")
    def asset(ornament_id: str):
        path = store.config.assets.get(ornament_id)
        if path is None or not Path(path).exists():
            return JSONResponse({"error": "unknown asset"}, status_code=404)
        return FileResponse(path, media_type="image/png")

    return app
