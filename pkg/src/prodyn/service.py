"""HTTP facade over simulate/step/identify for the planner UI.

Stateless JSON endpoints under /v1; the only mutable state is an optional
in-process model store keyed by id (idempotent last-write-wins puts).
Errors carry problem-details-style bodies {code, message, field}: 400 for a
malformed body, 422 for an invariant violation.  Identify and step return
numbers identical to the CLI's for identical inputs.
"""

from __future__ import annotations

import threading

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import files, lti, stepinfo
from .crossval import evaluate_split
from .errors import (AllStartsFailed, ProdynError, SegmentTooShort,
                     SplitOffGrid)
from .fitting import FitOptions
from .series import SampledSeries, normalize

DEFAULT_STEP_PERIOD = 0.05


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, field: str | None = None):
        self.status = status
        self.code = code
        self.message = message
        self.field = field
        super().__init__(message)


class ModelBody(BaseModel):
    num: list[float]
    den: list[float]
    order: int | None = None
    offset_u: float = 0.0
    offset_y: float = 0.0
    period_h: float = 1.0


class ModelRef(BaseModel):
    id: str


class PlanBody(BaseModel):
    t0: float = 0.0
    period_h: float
    goals: list[float]


class SimulateBody(BaseModel):
    model: ModelBody | ModelRef
    plan: PlanBody
    absolute: bool = False


class StepBody(BaseModel):
    model: ModelBody | ModelRef
    amplitude: float
    horizon_h: float
    period_h: float = DEFAULT_STEP_PERIOD


class SeriesBody(BaseModel):
    t_h: list[float]
    u_goal_m: list[float]
    y_depth_m: list[float]


class IdentifyBody(BaseModel):
    series: SeriesBody
    order: int = 1
    split_h: float


def _model_dict_from_body(body: ModelBody) -> dict:
    return {
        "order": body.order if body.order is not None else len(body.den) - 1,
        "num": body.num,
        "den": body.den,
        "offset_u": body.offset_u,
        "offset_y": body.offset_y,
        "period_h": body.period_h,
    }


def create_app(model_store: dict[str, dict] | None = None) -> FastAPI:
    app = FastAPI(title="prodyn service", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
        allow_headers=["*"],
    )
    store: dict[str, dict] = model_store if model_store is not None else {}
    store_lock = threading.Lock()

    @app.exception_handler(ApiError)
    async def _api_error(_req: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message, "field": exc.field},
        )

    @app.exception_handler(RequestValidationError)
    async def _malformed(_req: Request, exc: RequestValidationError):
        errors = exc.errors()
        field = ".".join(str(p) for p in errors[0]["loc"]) if errors else None
        return JSONResponse(
            status_code=400,
            content={"code": "malformed_body",
                     "message": "request body does not match the schema",
                     "field": field},
        )

    def _resolve_model(spec: ModelBody | ModelRef) -> tuple[lti.TransferFunction, float, float, float]:
        if isinstance(spec, ModelRef):
            with store_lock:
                obj = store.get(spec.id)
            if obj is None:
                raise ApiError(422, "unknown_model", f"no stored model '{spec.id}'",
                               "model.id")
            source = obj
        else:
            source = _model_dict_from_body(spec)
        try:
            return files.model_from_dict(source)
        except (ValueError, ProdynError) as exc:
            raise ApiError(422, "invalid_model", str(exc), "model")

    @app.get("/v1/health")
    def health():
        return {"status": "ok"}

    @app.put("/v1/models/{model_id}")
    def put_model(model_id: str, body: ModelBody):
        obj = _model_dict_from_body(body)
        try:
            files.model_from_dict(obj)
        except (ValueError, ProdynError) as exc:
            raise ApiError(422, "invalid_model", str(exc), "model")
        with store_lock:
            store[model_id] = obj
        return {"id": model_id, "stored": True}

    @app.get("/v1/models/{model_id}")
    def get_model(model_id: str):
        with store_lock:
            obj = store.get(model_id)
        if obj is None:
            raise ApiError(422, "unknown_model", f"no stored model '{model_id}'",
                           "model_id")
        return obj

    @app.post("/v1/simulate")
    def simulate(body: SimulateBody):
        tf, offset_u, offset_y, _ = _resolve_model(body.model)
        plan = body.plan
        if plan.period_h <= 0:
            raise ApiError(422, "invalid_plan", "period must be positive",
                           "plan.period_h")
        if len(plan.goals) == 0:
            raise ApiError(422, "invalid_plan", "goals list is empty", "plan.goals")
        if body.absolute:
            goals = np.asarray(plan.goals, dtype=float)
            if np.any(np.diff(goals) < 0):
                raise ApiError(422, "invalid_plan",
                               "absolute goals must be non-decreasing", "plan.goals")
            u_rel = goals - offset_u
            t0 = plan.t0
        else:
            if any(g < 0 for g in plan.goals):
                raise ApiError(422, "invalid_plan",
                               "goal increments must be non-negative", "plan.goals")
            u_rel = np.concatenate(([0.0], np.cumsum(plan.goals)))
            t0 = plan.t0
        response = lti.simulate(tf, u_rel, plan.period_h, t0=t0)
        y = response.values + (offset_y if body.absolute else 0.0)
        out = {
            "t": [float(v) for v in response.times()],
            "y": [float(v) for v in y],
            "step_metrics": None,
        }
        # A constant-increment staircase doubles as a step input; attach the
        # descriptor card the UI shows next to the chart.
        increments = (np.diff(np.asarray(plan.goals, dtype=float))
                      if body.absolute else np.asarray(plan.goals, dtype=float))
        if len(increments) > 0 and np.ptp(increments) <= 1e-12 * max(1.0, abs(increments[0])):
            rate = float(increments[0]) / plan.period_h
            horizon = max(len(u_rel) - 1, 1) * plan.period_h
            metrics, _ = stepinfo.step_metrics(tf, rate, horizon, plan.period_h)
            out["step_metrics"] = metrics.as_dict()
        return out

    @app.post("/v1/step")
    def step(body: StepBody):
        tf, _, _, _ = _resolve_model(body.model)
        if body.period_h <= 0 or body.horizon_h < body.period_h:
            raise ApiError(422, "invalid_horizon",
                           "need horizon_h >= period_h > 0", "horizon_h")
        metrics, response = stepinfo.step_metrics(
            tf, body.amplitude, body.horizon_h, body.period_h)
        return {
            "metrics": metrics.as_dict(),
            "t": [float(v) for v in response.times()],
            "y": [float(v) for v in response.values],
        }

    @app.post("/v1/identify")
    def identify(body: IdentifyBody):
        s = body.series
        if body.order != 1:
            raise ApiError(422, "invalid_order", "only first order is supported",
                           "order")
        n = len(s.t_h)
        if n < 3 or len(s.u_goal_m) != n or len(s.y_depth_m) != n:
            raise ApiError(422, "invalid_series",
                           "series channels must share a length of at least 3",
                           "series")
        t = np.asarray(s.t_h, dtype=float)
        gaps = np.diff(t)
        if len(gaps) == 0 or gaps[0] <= 0 or not np.allclose(gaps, gaps[0],
                                                             rtol=1e-9, atol=1e-12):
            raise ApiError(422, "invalid_series",
                           "time grid must be uniform and increasing", "series.t_h")
        y = np.asarray(s.y_depth_m, dtype=float)
        if float(np.ptp(y)) == 0.0:
            raise ApiError(422, "invalid_series",
                           "output has zero variance", "series.y_depth_m")
        try:
            dataset = SampledSeries(t0=float(t[0]), period=float(gaps[0]),
                                    u=np.asarray(s.u_goal_m, dtype=float), y=y)
        except ValueError as exc:
            raise ApiError(422, "invalid_series", str(exc), "series")
        pair = normalize(dataset)
        try:
            best, est_m, val_m, _ = evaluate_split(pair, body.split_h, FitOptions())
        except SplitOffGrid as exc:
            raise ApiError(422, "invalid_split", str(exc), "split_h")
        except (AllStartsFailed, SegmentTooShort) as exc:
            raise ApiError(422, "estimation_failed", str(exc), "series")
        return {
            "model": files.model_to_dict(best.tf, pair.offset_u, pair.offset_y,
                                         dataset.period),
            "est": files.metrics_to_dict(est_m),
            "val": files.metrics_to_dict(val_m),
        }

    return app


app = create_app()
