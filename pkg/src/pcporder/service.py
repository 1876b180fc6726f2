"""HTTP/JSON service exposing datasets, score matrices, orderings and
interactive sessions.

Work estimated above a configurable threshold (pairs x windows x detectors)
is pushed to a background job with a polling endpoint; everything smaller
answers synchronously. Module errors surface as a stable JSON error object
with a machine-readable code: unknown ids are 404, malformed parameters are
422, and every other domain error is 400.
"""

from __future__ import annotations

import os
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import session as session_mod
from .data import Dataset, dataset_from_text
from .detectors import PropertyId
from .errors import (
    PcpError,
    UnknownDatasetError,
    UnknownSessionError,
)
from .ordering import order_greedy, order_tsp
from .scoring import (
    DEFAULT_PERMUTATIONS,
    ScoringEngine,
    Weights,
    WindowProfile,
    parse_weights,
    result_document,
)
from .windows import WindowSpec, window_count

DEFAULT_PORT = 8790
DEFAULT_MAX_SYNC_WORK = 50_000

_NOT_FOUND_CODES = {"unknown_dataset", "unknown_session", "unknown_job"}


class RequestParameterError(PcpError):
    """Malformed query/body parameter; maps to 422."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class UnknownJobError(PcpError):
    code = "unknown_job"


@dataclass
class _StoredDataset:
    dataset: Dataset
    dropped_rows: int


class _Stores:
    def __init__(self, engine: ScoringEngine, max_sync_work: int):
        self.engine = engine
        self.max_sync_work = max_sync_work
        self.datasets: dict[str, _StoredDataset] = {}
        self.sessions: dict[str, session_mod.Session] = {}
        self.session_datasets: dict[str, str] = {}
        self.session_locks: dict[str, threading.Lock] = {}
        self.jobs: dict[str, dict[str, Any]] = {}
        self.lock = threading.Lock()
        self.executor = ThreadPoolExecutor(max_workers=2)


def _status_for(exc: PcpError) -> int:
    if exc.code in _NOT_FOUND_CODES:
        return 404
    if isinstance(exc, RequestParameterError) or exc.code == "no_active_properties":
        return 422
    return 400


def _parse_weights_param(raw: str) -> Weights:
    try:
        return parse_weights(raw)
    except ValueError as err:
        raise RequestParameterError("invalid_weights", str(err)) from None


def _parse_weights_value(raw: Any) -> Weights:
    """Weights from a request body: either the flat string or an object map."""
    if isinstance(raw, str):
        return _parse_weights_param(raw)
    if isinstance(raw, dict):
        try:
            return Weights.from_mapping(raw)
        except (ValueError, TypeError) as err:
            raise RequestParameterError("invalid_weights", str(err)) from None
    raise RequestParameterError("invalid_weights", "weights must be a string or object")


def _window_spec(window: float, stride: float | None) -> WindowSpec:
    try:
        return WindowSpec(window_fraction=window, stride_fraction=stride)
    except ValueError as err:
        raise RequestParameterError("invalid_window", str(err)) from None


def _check_seed(seed: int) -> int:
    if seed < 0:
        raise RequestParameterError("invalid_seed", f"seed must be >= 0, got {seed}")
    return seed


def _donut_shares(weights: Weights, per_edge) -> dict[str, float]:
    """Normalized share each property contributes to the ordering's score."""
    contributions: dict[PropertyId, float] = {}
    for prop in PropertyId:
        w = weights.values[prop]
        contributions[prop] = w * sum(e.breakdown[prop] for e in per_edge)
    total = sum(contributions.values())
    if total <= 0.0:
        return {p.value: 0.0 for p in PropertyId}
    return {p.value: v / total for p, v in contributions.items()}


def create_app(
    *,
    max_sync_work: int | None = None,
    cache_bytes: int | None = None,
    static_dir: str | None = None,
) -> FastAPI:
    if max_sync_work is None:
        max_sync_work = int(os.environ.get("MAX_SYNC_WORK", DEFAULT_MAX_SYNC_WORK))
    if cache_bytes is None:
        cache_bytes = int(os.environ.get("CACHE_BYTES", 256 * 1024 * 1024))
    engine = ScoringEngine(cache_bytes=cache_bytes)
    stores = _Stores(engine=engine, max_sync_work=max_sync_work)

    app = FastAPI(title="pcporder", version="0.1.0")
    app.state.stores = stores
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[os.environ.get("CORS_ORIGIN", "*")],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(PcpError)
    async def _pcp_error_handler(request: Request, exc: PcpError):
        return JSONResponse(status_code=_status_for(exc), content=exc.to_api_error())

    def _get_dataset(dataset_id: str) -> _StoredDataset:
        stored = stores.datasets.get(dataset_id)
        if stored is None:
            raise UnknownDatasetError(f"no dataset with id {dataset_id!r}")
        return stored

    def _get_session(session_id: str) -> tuple[session_mod.Session, threading.Lock]:
        found = stores.sessions.get(session_id)
        if found is None:
            raise UnknownSessionError(f"no session with id {session_id!r}")
        return found, stores.session_locks[session_id]

    def _estimated_work(dataset: Dataset, spec: WindowSpec) -> int:
        dim = dataset.dim_count
        return dim * (dim - 1) * window_count(spec) * len(PropertyId)

    def _run_job(fn) -> dict:
        job_id = uuid.uuid4().hex
        stores.jobs[job_id] = {"status": "running", "result": None, "error": None}

        def work():
            try:
                stores.jobs[job_id]["result"] = fn()
                stores.jobs[job_id]["status"] = "done"
            except PcpError as err:
                stores.jobs[job_id]["error"] = err.to_api_error()
                stores.jobs[job_id]["status"] = "error"
            except Exception as err:  # pragma: no cover - defensive
                stores.jobs[job_id]["error"] = {
                    "code": "internal_error",
                    "message": str(err),
                    "detail": None,
                }
                stores.jobs[job_id]["status"] = "error"

        stores.executor.submit(work)
        return {"job_id": job_id}

    # -- health / datasets -------------------------------------------------

    @app.get("/health")
    async def health():
        return {"status": "ok"}

    @app.post("/datasets", status_code=201)
    async def upload_dataset(
        request: Request, name: str = "dataset", columns: str | None = None
    ):
        content_type = request.headers.get("content-type", "")
        if content_type.startswith("multipart/form-data"):
            form = await request.form()
            upload = form.get("file")
            if upload is None:
                raise RequestParameterError(
                    "invalid_upload", "multipart upload needs a 'file' field"
                )
            text = (await upload.read()).decode("utf-8")
            if name == "dataset" and getattr(upload, "filename", None):
                name = upload.filename
        else:
            text = (await request.body()).decode("utf-8")
        selected = [c.strip() for c in columns.split(",")] if columns else None
        result = dataset_from_text(text, selected, name=name)
        dataset_id = uuid.uuid4().hex
        stores.datasets[dataset_id] = _StoredDataset(
            dataset=result.dataset, dropped_rows=result.dropped_rows
        )
        return {
            "dataset_id": dataset_id,
            "dims": result.dataset.dims,
            "row_count": result.dataset.row_count,
            "dropped_rows": result.dropped_rows,
        }

    @app.get("/datasets/{dataset_id}/rows")
    async def dataset_rows(dataset_id: str, indices: str | None = None):
        stored = _get_dataset(dataset_id)
        dataset = stored.dataset
        if indices is None:
            wanted = list(range(dataset.row_count))
        else:
            try:
                wanted = [int(tok) for tok in indices.split(",") if tok.strip() != ""]
            except ValueError:
                raise RequestParameterError(
                    "invalid_indices", f"indices must be integers: {indices!r}"
                ) from None
            for idx in wanted:
                if not (0 <= idx < dataset.row_count):
                    raise RequestParameterError(
                        "invalid_indices", f"row index {idx} out of range"
                    )
        return {
            "dims": dataset.dims,
            "indices": wanted,
            "rows": dataset.rows(wanted),
        }

    # -- matrix / profile / order -------------------------------------------

    def _matrix_document(
        stored: _StoredDataset, w: Weights, spec: WindowSpec, seed: int, permutations: int
    ) -> dict:
        matrix = stores.engine.matrix(
            stored.dataset, w, spec, seed=seed, permutations=permutations
        )
        matrix_json = matrix.to_json()
        return {
            "dims": stored.dataset.dims,
            "window_spec": {
                "window_fraction": spec.window_fraction,
                "stride_fraction": spec.stride_fraction,
            },
            "weights": w.to_json(),
            "seed": seed,
            "matrix": {
                "cells": matrix_json["cells"],
                "breakdown": matrix_json["breakdown"],
            },
            "dropped_rows": stored.dropped_rows,
        }

    @app.get("/datasets/{dataset_id}/matrix")
    async def dataset_matrix(
        dataset_id: str,
        weights: str,
        window: float,
        seed: int,
        stride: float | None = None,
        permutations: int = DEFAULT_PERMUTATIONS,
    ):
        stored = _get_dataset(dataset_id)
        w = _parse_weights_param(weights)
        w.require_active()
        spec = _window_spec(window, stride)
        _check_seed(seed)
        if _estimated_work(stored.dataset, spec) > stores.max_sync_work:
            job = _run_job(
                lambda: _matrix_document(stored, w, spec, seed, permutations)
            )
            return JSONResponse(status_code=202, content=job)
        return _matrix_document(stored, w, spec, seed, permutations)

    @app.get("/datasets/{dataset_id}/profile")
    async def dataset_profile(
        dataset_id: str,
        i: int,
        j: int,
        window: float,
        seed: int,
        stride: float | None = None,
        permutations: int = DEFAULT_PERMUTATIONS,
    ):
        stored = _get_dataset(dataset_id)
        spec = _window_spec(window, stride)
        _check_seed(seed)
        profile = stores.engine.profile(
            stored.dataset, (i, j), spec, seed=seed, permutations=permutations
        )
        wins = stores.engine.windows_for_axis(stored.dataset, i, spec)
        payload = profile.to_json()
        payload["member_rows"] = [[int(r) for r in w.member_rows] for w in wins]
        return {
            "dims": stored.dataset.dims,
            "window_spec": {
                "window_fraction": spec.window_fraction,
                "stride_fraction": spec.stride_fraction,
            },
            "seed": seed,
            "profile": payload,
        }

    def _order_document(
        stored: _StoredDataset,
        w: Weights,
        spec: WindowSpec,
        seed: int,
        permutations: int,
        mode: str,
    ) -> dict:
        matrix = stores.engine.matrix(
            stored.dataset, w, spec, seed=seed, permutations=permutations
        )
        result = order_greedy(matrix) if mode == "greedy" else order_tsp(matrix)
        profiles: list[WindowProfile] = [
            stores.engine.profile(
                stored.dataset, (a, b), spec, seed=seed, permutations=permutations
            )
            for a, b in zip(result.order, result.order[1:])
        ]
        doc = _matrix_document(stored, w, spec, seed, permutations)
        doc["ordering"] = result.to_json()
        doc["profiles"] = [p.to_json() for p in profiles]
        doc["donut"] = _donut_shares(w, result.per_edge)
        return doc

    @app.post("/datasets/{dataset_id}/order")
    async def dataset_order(
        dataset_id: str,
        weights: str,
        window: float,
        seed: int,
        stride: float | None = None,
        permutations: int = DEFAULT_PERMUTATIONS,
        mode: str = "tsp",
    ):
        stored = _get_dataset(dataset_id)
        if mode not in ("tsp", "greedy"):
            raise RequestParameterError(
                "invalid_mode", f"mode must be 'tsp' or 'greedy', got {mode!r}"
            )
        w = _parse_weights_param(weights)
        w.require_active()
        spec = _window_spec(window, stride)
        _check_seed(seed)
        if _estimated_work(stored.dataset, spec) > stores.max_sync_work:
            job = _run_job(
                lambda: _order_document(stored, w, spec, seed, permutations, mode)
            )
            return JSONResponse(status_code=202, content=job)
        return _order_document(stored, w, spec, seed, permutations, mode)

    @app.get("/jobs/{job_id}")
    async def job_status(job_id: str):
        job = stores.jobs.get(job_id)
        if job is None:
            raise UnknownJobError(f"no job with id {job_id!r}")
        if job["status"] == "running":
            return {"status": "running"}
        if job["status"] == "error":
            return {"status": "error", "error": job["error"]}
        return {"status": "done", "result": job["result"]}

    # -- sessions ------------------------------------------------------------

    def _session_payload(
        sess: session_mod.Session, matrix, dataset_id: str
    ) -> dict:
        return {
            "session": sess.to_json(dataset_id),
            "matrix": matrix.to_json(),
        }

    @app.post("/sessions", status_code=201)
    async def create_session(body: dict):
        dataset_id = body.get("dataset_id")
        if not isinstance(dataset_id, str):
            raise RequestParameterError("invalid_body", "dataset_id is required")
        stored = _get_dataset(dataset_id)
        if "seed" not in body:
            raise RequestParameterError("invalid_seed", "seed is required")
        try:
            seed = _check_seed(int(body["seed"]))
            window = float(body.get("window", 0.25))
            stride = (
                float(body["stride"])
                if "stride" in body and body["stride"] is not None
                else None
            )
            permutations = int(body.get("permutations", DEFAULT_PERMUTATIONS))
        except (TypeError, ValueError):
            raise RequestParameterError(
                "invalid_body", "seed/window/stride/permutations must be numeric"
            ) from None
        w = _parse_weights_value(body.get("weights", ""))
        w.require_active()
        spec = _window_spec(window, stride)
        sess, matrix = session_mod.start_session(
            stored.dataset, w, spec, seed, permutations=permutations, engine=stores.engine
        )
        with stores.lock:
            stores.sessions[sess.id] = sess
            stores.session_datasets[sess.id] = dataset_id
            stores.session_locks[sess.id] = threading.Lock()
        return _session_payload(sess, matrix, dataset_id)

    @app.post("/sessions/{session_id}/choose")
    async def session_choose(session_id: str, body: dict):
        sess, lock = _get_session(session_id)
        try:
            i = int(body["i"])
            j = int(body["j"])
        except (KeyError, TypeError, ValueError):
            raise RequestParameterError(
                "invalid_indices", "body must carry integer fields i and j"
            ) from None
        with lock:
            _, matrix = session_mod.choose_pair(sess, i, j)
        return _session_payload(sess, matrix, stores.session_datasets.get(sess.id, ""))

    @app.post("/sessions/{session_id}/weights")
    async def session_weights(session_id: str, body: dict):
        sess, lock = _get_session(session_id)
        w = _parse_weights_value(body.get("weights", ""))
        w.require_active()
        with lock:
            _, matrix = session_mod.set_weights(sess, w)
        return _session_payload(sess, matrix, stores.session_datasets.get(sess.id, ""))

    @app.post("/sessions/{session_id}/undo")
    async def session_undo(session_id: str):
        sess, lock = _get_session(session_id)
        with lock:
            session_mod.undo(sess)
            matrix = session_mod.candidate_matrix(sess)
        return _session_payload(sess, matrix, stores.session_datasets.get(sess.id, ""))

    @app.post("/sessions/{session_id}/finalize")
    async def session_finalize(session_id: str):
        sess, lock = _get_session(session_id)
        with lock:
            result, profiles = session_mod.finalize(sess)
        return {
            "session": sess.to_json(stores.session_datasets.get(sess.id, "")),
            "ordering": result.to_json(),
            "profiles": [p.to_json() for p in profiles],
            "donut": _donut_shares(sess.weights, result.per_edge),
        }

    # -- static frontend (if built) -------------------------------------------

    if static_dir is None:
        static_dir = os.environ.get("PCPORDER_STATIC_DIR")
    if static_dir and os.path.isdir(static_dir):
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")

    return app


app = create_app()
