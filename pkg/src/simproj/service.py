"""Session-oriented HTTP API (JSON over HTTP, /v1 prefix).

One session = one dataset + one model + an append-only layout history.
Mutations go through the API only and are serialized per session; long
optimizations can run as background jobs polled by id. Snapshots are JSON
files on disk keyed by session id.
"""

import hashlib
import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import __version__
from .datasets_io import load_registry
from .errors import (EmptyManipulation, IndexOutOfRange, JobRunning,
                     SerializationError, SimprojError, UnknownSession,
                     StepOutOfRange, VersionMismatch)
from .experiments import make_init_layout, prepare_features
from .init_projections import Layout2D
from .metrics import evaluate
from .optimizer import KernelModel, LinearModel, OptimizerConfig
from .scenarios import (ControlPointSet, ManipulationSet, NeighborSpec,
                        clone_fit, localize_moves, refit_interpolation,
                        refit_neighbors, select_control_points)

SNAPSHOT_VERSION = 1

ERROR_STATUS = {
    "UnknownSession": 404,
    "UnknownDataset": 404,
    "StepOutOfRange": 404,
    "JobRunning": 409,
}


@dataclass
class Session:
    session_id: str
    dataset_name: str
    scenario: int
    init_method: str
    family: str
    seed: int
    config: OptimizerConfig
    neighbor_spec: NeighborSpec
    X: np.ndarray
    labels: np.ndarray | None
    control: ControlPointSet | None
    model: object
    layout_history: list = field(default_factory=list)
    pending_manipulation: ManipulationSet | None = None
    last_loss_trace: list = field(default_factory=list)
    audit: list = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)
    job: dict | None = None

    def record(self, operation: str, payload) -> None:
        digest = hashlib.sha256(
            json.dumps(payload, sort_keys=True, default=str).encode()).hexdigest()
        self.audit.append({"operation": operation, "timestamp": time.time(),
                           "payload_hash": digest})


def _model_to_dict(model):
    if isinstance(model, LinearModel):
        return {"kind": "linear", "weights": model.weights.tolist()}
    return {"kind": "kernel", "coefficients": model.coefficients.tolist(),
            "training_data": model.training_data.tolist(), "gamma": model.gamma}


def _model_from_dict(data):
    if data["kind"] == "linear":
        return LinearModel(weights=np.array(data["weights"], dtype=float))
    return KernelModel(coefficients=np.array(data["coefficients"], dtype=float),
                       training_data=np.array(data["training_data"], dtype=float),
                       gamma=float(data["gamma"]))


class SessionStore:
    def __init__(self, snapshot_dir, registry=None):
        self.snapshot_dir = Path(snapshot_dir)
        self.snapshot_dir.mkdir(parents=True, exist_ok=True)
        self.registry = registry if registry is not None else load_registry()
        self.sessions: dict[str, Session] = {}
        self.jobs: dict[str, dict] = {}

    # ---- session lifecycle -------------------------------------------------

    def create_session(self, dataset_name: str, scenario: int = 1,
                       init_method: str = "pca", family: str = "kernel",
                       seed: int = 0, config: OptimizerConfig | None = None,
                       neighbor_spec: NeighborSpec | None = None,
                       control_count: int | None = None,
                       external_layout_path=None,
                       unlabeled: bool = False) -> Session:
        from .datasets_io import load_registered
        from .experiments import DEFAULT_LEARNING_RATES

        ds = load_registered(dataset_name, self.registry)
        if unlabeled:
            ds = ds.without_labels()
        X = prepare_features(ds)
        if config is None:
            config = OptimizerConfig(learning_rate=DEFAULT_LEARNING_RATES[family],
                                     seed=seed)

        if scenario == 1:
            control = select_control_points(X, count=control_count, seed=seed)
            init = make_init_layout(X[control.indices], init_method, seed,
                                    external_layout_path)
            model, trace = clone_fit(X[control.indices], init, family, config)
        else:
            control = None
            init = make_init_layout(X, init_method, seed, external_layout_path)
            model, trace = clone_fit(X, init, family, config)

        session = Session(
            session_id=uuid.uuid4().hex,
            dataset_name=dataset_name, scenario=scenario,
            init_method=init_method, family=family, seed=seed,
            config=config,
            neighbor_spec=neighbor_spec or NeighborSpec(),
            X=X, labels=ds.labels, control=control, model=model,
        )
        session.layout_history.append(
            Layout2D(coords=model.project(X), source="learned"))
        session.last_loss_trace = trace
        session.record("create_session", {"dataset": dataset_name,
                                          "scenario": scenario, "seed": seed})
        self.sessions[session.session_id] = session
        return session

    def get(self, session_id: str) -> Session:
        if session_id not in self.sessions:
            raise UnknownSession(f"no session {session_id!r}")
        return self.sessions[session_id]

    # ---- operations --------------------------------------------------------

    def submit_manipulation(self, session_id: str, moves) -> int:
        session = self.get(session_id)
        with session.lock:
            if not moves:
                return 0
            manipulation = ManipulationSet(
                [(int(m[0]), (float(m[1]), float(m[2]))) for m in moves])
            n = len(session.layout_history[-1].coords)
            for index in manipulation.indices:
                if not 0 <= index < n:
                    raise IndexOutOfRange(f"index {index} outside layout of {n}")
            session.pending_manipulation = manipulation
            session.record("submit_manipulation", [[int(m[0]), float(m[1]), float(m[2])]
                                                   for m in moves])
            return len(manipulation.moves)

    def _run_optimize(self, session: Session, progress=None):
        manipulation = session.pending_manipulation
        if session.scenario == 2 and (manipulation is None or not manipulation.moves):
            raise EmptyManipulation("scenario 2 requires a pending manipulation")

        X = session.X
        if session.scenario == 1:
            Xs = X[session.control.indices]
            Ys = session.model.project(Xs)
            if manipulation is not None:
                Ys = localize_moves(session.control, manipulation).apply(Ys)
            model, trace = refit_interpolation(session.model, Xs, Ys,
                                               session.family, session.config)
        else:
            Y = session.model.project(X)
            Y_tilde = manipulation.apply(Y)
            model, trace = refit_neighbors(session.model, X, Y_tilde,
                                           manipulation.indices,
                                           session.neighbor_spec,
                                           session.family, session.config)
        session.model = model
        layout = Layout2D(coords=model.project(X), source="learned")
        session.layout_history.append(layout)
        session.pending_manipulation = None
        session.last_loss_trace = trace
        session.record("optimize", {"iterations": session.config.iterations})
        report = evaluate(layout, X, session.labels) if len(X) > 10 else None
        return layout, report, trace

    def optimize(self, session_id: str):
        session = self.get(session_id)
        with session.lock:
            if session.job is not None and session.job["status"] == "running":
                raise JobRunning("an optimization job is already running")
            return self._run_optimize(session)

    def optimize_async(self, session_id: str) -> str:
        session = self.get(session_id)
        if session.job is not None and session.job["status"] == "running":
            raise JobRunning("an optimization job is already running")
        job_id = uuid.uuid4().hex
        job = {"job_id": job_id, "session_id": session_id, "status": "running",
               "iteration": 0, "current_loss": None, "result": None, "error": None}
        self.jobs[job_id] = job
        session.job = job

        def work():
            try:
                with session.lock:
                    layout, report, trace = self._run_optimize(session)
                job["iteration"] = len(trace)
                job["current_loss"] = trace[-1] if trace else None
                job["result"] = {
                    "layout": layout.coords.tolist(),
                    "metrics": report.as_dict() if report else None,
                    "loss_trace": [float(v) for v in trace],
                }
                job["status"] = "done"
            except Exception as exc:
                job["error"] = {"code": getattr(exc, "code", type(exc).__name__),
                                "message": str(exc)}
                job["status"] = "failed"

        threading.Thread(target=work, daemon=True).start()
        return job_id

    def get_trajectories(self, session_id: str, from_step: int, to_step: int):
        session = self.get(session_id)
        history = session.layout_history
        if not (0 <= from_step < len(history) and 0 <= to_step < len(history)):
            raise StepOutOfRange(
                f"steps must lie in [0, {len(history) - 1}]")
        old, new = history[from_step].coords, history[to_step].coords
        return [{"index": i, "old_xy": old[i].tolist(), "new_xy": new[i].tolist()}
                for i in range(len(old))]

    # ---- persistence -------------------------------------------------------

    def snapshot(self, session_id: str, path=None) -> Path:
        session = self.get(session_id)
        path = Path(path) if path else self.snapshot_dir / f"{session_id}.json"
        state = {
            "version": SNAPSHOT_VERSION,
            "simproj_version": __version__,
            "session_id": session.session_id,
            "dataset_name": session.dataset_name,
            "scenario": session.scenario,
            "init_method": session.init_method,
            "family": session.family,
            "seed": session.seed,
            "config": vars(session.config),
            "neighbor_spec": vars(session.neighbor_spec),
            "X": session.X.tolist(),
            "labels": session.labels.tolist() if session.labels is not None else None,
            "control": session.control.indices.tolist() if session.control else None,
            "model": _model_to_dict(session.model),
            "layout_history": [{"coords": l.coords.tolist(), "source": l.source}
                               for l in session.layout_history],
            "pending_manipulation": [
                [int(i), [float(xy[0]), float(xy[1])]]
                for i, xy in session.pending_manipulation.moves]
            if session.pending_manipulation else None,
            "audit": session.audit,
        }
        path.write_text(json.dumps(state))
        session.record("snapshot", {"path": str(path)})
        return path

    def restore(self, path) -> Session:
        try:
            state = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise SerializationError(f"cannot read snapshot: {exc}") from None
        if state.get("version") != SNAPSHOT_VERSION:
            raise VersionMismatch(
                f"snapshot version {state.get('version')} != {SNAPSHOT_VERSION}")
        session = Session(
            session_id=state["session_id"],
            dataset_name=state["dataset_name"],
            scenario=state["scenario"],
            init_method=state["init_method"],
            family=state["family"],
            seed=state["seed"],
            config=OptimizerConfig(**state["config"]),
            neighbor_spec=NeighborSpec(**state["neighbor_spec"]),
            X=np.array(state["X"], dtype=float),
            labels=np.array(state["labels"], dtype=int)
            if state["labels"] is not None else None,
            control=ControlPointSet(indices=np.array(state["control"], dtype=int))
            if state["control"] is not None else None,
            model=_model_from_dict(state["model"]),
        )
        session.layout_history = [
            Layout2D(coords=np.array(l["coords"], dtype=float), source=l["source"])
            for l in state["layout_history"]]
        if state["pending_manipulation"]:
            session.pending_manipulation = ManipulationSet(
                [(i, xy) for i, xy in state["pending_manipulation"]])
        session.audit = state["audit"]
        session.last_loss_trace = []
        self.sessions[session.session_id] = session
        return session


def _session_summary(session: Session) -> dict:
    return {
        "session_id": session.session_id,
        "dataset": session.dataset_name,
        "scenario": session.scenario,
        "init": session.init_method,
        "family": session.family,
        "seed": session.seed,
        "steps": len(session.layout_history),
        "control_points": session.control.indices.tolist() if session.control else None,
        "labels": session.labels.tolist() if session.labels is not None else None,
        "layout": session.layout_history[-1].coords.tolist(),
        "loss_trace": [float(v) for v in getattr(session, "last_loss_trace", [])],
        "iterations": session.config.iterations,
    }


def create_app(snapshot_dir="sessions", registry=None,
               static_dir=None) -> FastAPI:
    app = FastAPI(title="simproj", version=__version__)
    store = SessionStore(snapshot_dir, registry)
    app.state.store = store

    @app.exception_handler(SimprojError)
    async def _handle(request: Request, exc: SimprojError):
        status = ERROR_STATUS.get(exc.code, 400)
        return JSONResponse(status_code=status, content={
            "code": exc.code, "message": exc.message, "detail": exc.detail})

    @app.get("/v1/datasets")
    def list_datasets():
        return {"datasets": sorted(store.registry)}

    @app.post("/v1/sessions")
    async def create_session(request: Request):
        body = await request.json()
        config = None
        if any(k in body for k in ("iterations", "learning_rate")):
            from .experiments import DEFAULT_LEARNING_RATES
            family = body.get("family", "kernel")
            config = OptimizerConfig(
                learning_rate=body.get("learning_rate",
                                       DEFAULT_LEARNING_RATES[family]),
                iterations=body.get("iterations", 500),
                seed=body.get("seed", 0))
        spec = NeighborSpec(**body["neighbor_spec"]) if "neighbor_spec" in body else None
        session = store.create_session(
            dataset_name=body["dataset"],
            scenario=body.get("scenario", 1),
            init_method=body.get("init", "pca"),
            family=body.get("family", "kernel"),
            seed=body.get("seed", 0),
            config=config,
            neighbor_spec=spec,
            control_count=body.get("control_points"),
            external_layout_path=body.get("external_layout"),
            unlabeled=body.get("unlabeled", False),
        )
        return _session_summary(session)

    @app.get("/v1/sessions/{session_id}/layout")
    def get_layout(session_id: str, step: int = -1):
        session = store.get(session_id)
        history = session.layout_history
        if step == -1:
            step = len(history) - 1
        if not 0 <= step < len(history):
            raise StepOutOfRange(f"step {step} outside history of {len(history)}")
        return {"step": step, "layout": history[step].coords.tolist(),
                "source": history[step].source}

    @app.post("/v1/sessions/{session_id}/manipulation")
    async def submit_manipulation(session_id: str, request: Request):
        body = await request.json()
        count = store.submit_manipulation(session_id, body.get("moves", []))
        return {"accepted": count}

    @app.post("/v1/sessions/{session_id}/optimize")
    def optimize(session_id: str, sync: bool = True):
        if sync:
            layout, report, trace = store.optimize(session_id)
            return {"layout": layout.coords.tolist(),
                    "metrics": report.as_dict() if report else None,
                    "loss_trace": [float(v) for v in trace]}
        job_id = store.optimize_async(session_id)
        return {"job_id": job_id}

    @app.get("/v1/jobs/{job_id}")
    def job_status(job_id: str):
        if job_id not in store.jobs:
            raise UnknownSession(f"no job {job_id!r}")
        job = store.jobs[job_id]
        return {k: job[k] for k in
                ("job_id", "status", "iteration", "current_loss", "result", "error")}

    @app.get("/v1/sessions/{session_id}/metrics")
    def get_metrics(session_id: str):
        session = store.get(session_id)
        report = evaluate(session.layout_history[-1], session.X, session.labels)
        return report.as_dict()

    @app.get("/v1/sessions/{session_id}/trajectories")
    def trajectories(session_id: str, from_step: int, to_step: int):
        return {"trajectories": store.get_trajectories(session_id, from_step, to_step)}

    @app.post("/v1/sessions/{session_id}/snapshot")
    async def snapshot(session_id: str, request: Request):
        raw = await request.body()
        body = json.loads(raw) if raw else {}
        path = store.snapshot(session_id, body.get("path"))
        return {"path": str(path)}

    @app.post("/v1/restore")
    async def restore(request: Request):
        body = await request.json()
        session = store.restore(body["path"])
        return _session_summary(session)

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app
