"""Plain-text file formats: datasets, raw events, model files, reports.

Everything is CSV or JSON so external plotters and the planner UI consume
the outputs without bindings.  Floats are written with ``repr`` (shortest
round-trip form), which makes every writer byte-deterministic and lets
model files round-trip their digits exactly.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from . import lti
from .crossval import StudyReport
from .metrics import QualityMetrics
from .series import RawEvent, SampledSeries
from .synth import TruthRecord

DATASET_HEADER = "t_h,u_goal_m,y_depth_m"
RAW_EVENTS_HEADER = "t_h,goal_m,depth_m"
TRAJECTORY_HEADER = "t_h,y"
FIGURE2_HEADER = "partition,val_unfit,est_unfit,fpe,loss,mse"


def _fmt(x: float) -> str:
    return repr(float(x))


def dataset_text(series: SampledSeries) -> str:
    """Canonical CSV form of a dataset; also the fingerprint preimage."""
    lines = [DATASET_HEADER]
    t = series.times()
    for k in range(series.n_samples):
        lines.append(f"{_fmt(t[k])},{_fmt(series.u[k])},{_fmt(series.y[k])}")
    return "\n".join(lines) + "\n"


def write_dataset(series: SampledSeries, path) -> None:
    Path(path).write_text(dataset_text(series), encoding="utf-8")


def _parse_csv(text: str, expected_header: str, path) -> list[list[str]]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty file")
    if lines[0].strip() != expected_header:
        raise ValueError(f"{path}: header must be exactly '{expected_header}'")
    return [ln.split(",") for ln in lines[1:]]


def _uniform_period(t: np.ndarray, path) -> float:
    if len(t) < 2:
        raise ValueError(f"{path}: need at least two rows")
    gaps = np.diff(t)
    period = float(gaps[0])
    if period <= 0 or not np.allclose(gaps, period, rtol=1e-9, atol=1e-12):
        raise ValueError(f"{path}: time grid must be uniform and increasing")
    return period


def read_dataset(path) -> SampledSeries:
    """Parse a dataset CSV; the grid must be uniform and the data cumulative."""
    rows = _parse_csv(Path(path).read_text(encoding="utf-8"), DATASET_HEADER, path)
    try:
        data = np.array([[float(c) for c in row] for row in rows])
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc
    if data.ndim != 2 or data.shape[1] != 3:
        raise ValueError(f"{path}: every row needs exactly 3 columns")
    period = _uniform_period(data[:, 0], path)
    return SampledSeries(t0=float(data[0, 0]), period=period,
                         u=data[:, 1], y=data[:, 2])


def read_plan(path) -> tuple[float, float, np.ndarray]:
    """Parse an input plan: dataset format with the output column optional.

    Returns (t0, period, goals in absolute meters).
    """
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty file")
    header = lines[0].strip()
    if header not in (DATASET_HEADER, "t_h,u_goal_m"):
        raise ValueError(
            f"{path}: header must be '{DATASET_HEADER}' or 't_h,u_goal_m'")
    n_cols = len(header.split(","))
    rows = [ln.split(",") for ln in lines[1:]]
    try:
        data = np.array([[float(c) for c in row[:n_cols]] for row in rows])
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc
    if data.ndim != 2 or data.shape[0] < 2:
        raise ValueError(f"{path}: need at least two rows")
    period = _uniform_period(data[:, 0], path)
    return float(data[0, 0]), period, data[:, 1]


def write_raw_events(events: list[RawEvent], path) -> None:
    lines = [RAW_EVENTS_HEADER]
    for ev in events:
        lines.append(f"{_fmt(ev.timestamp)},{_fmt(ev.goal_depth)},{_fmt(ev.actual_depth)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_raw_events(path) -> list[RawEvent]:
    rows = _parse_csv(Path(path).read_text(encoding="utf-8"), RAW_EVENTS_HEADER, path)
    events = []
    for row in rows:
        if len(row) != 3:
            raise ValueError(f"{path}: every row needs exactly 3 columns")
        t, goal, depth = (float(c) for c in row)
        events.append(RawEvent(timestamp=t, goal_depth=goal, actual_depth=depth))
    return events


def write_trajectory(response: lti.Response, path) -> None:
    """Trajectory CSV with header ``t_h,y``."""
    lines = [TRAJECTORY_HEADER]
    t = response.times()
    for k, v in enumerate(response.values):
        lines.append(f"{_fmt(t[k])},{_fmt(v)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def dataset_fingerprint(series: SampledSeries) -> str:
    """Content hash of the canonical CSV form."""
    digest = hashlib.sha256(dataset_text(series).encode("utf-8")).hexdigest()
    return f"sha256:{digest}"


# -- model files --------------------------------------------------------------

def model_to_dict(tf: lti.TransferFunction, offset_u: float = 0.0,
                  offset_y: float = 0.0, period_h: float = 1.0) -> dict:
    return {
        "order": tf.order,
        "num": list(tf.num),
        "den": list(tf.den),
        "offset_u": float(offset_u),
        "offset_y": float(offset_y),
        "period_h": float(period_h),
    }


def model_from_dict(obj: dict) -> tuple[lti.TransferFunction, float, float, float]:
    """Returns (tf, offset_u, offset_y, period_h)."""
    try:
        tf = lti.make_tf(obj["num"], obj["den"])
        offset_u = float(obj.get("offset_u", 0.0))
        offset_y = float(obj.get("offset_y", 0.0))
        period_h = float(obj.get("period_h", 1.0))
        order = int(obj.get("order", tf.order))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed model object: {exc}") from exc
    if order != tf.order:
        raise ValueError(f"declared order {order} != coefficient order {tf.order}")
    return tf, offset_u, offset_y, period_h


def write_model(path, tf: lti.TransferFunction, offset_u: float = 0.0,
                offset_y: float = 0.0, period_h: float = 1.0) -> None:
    obj = model_to_dict(tf, offset_u, offset_y, period_h)
    Path(path).write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


def read_model(path) -> tuple[lti.TransferFunction, float, float, float]:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ValueError(f"{path}: model file must hold a JSON object")
    return model_from_dict(obj)


def write_truth(truth: TruthRecord, path) -> None:
    Path(path).write_text(json.dumps(truth.as_dict(), indent=2) + "\n",
                          encoding="utf-8")


# -- study reports -------------------------------------------------------------

def metrics_to_dict(m: QualityMetrics | None) -> dict | None:
    """None stands in for 'impossible to calculate' (single-sample windows)."""
    if m is None or m.unfitness_percent is None:
        return None
    return {
        "fit_pct": m.fit_percent,
        "unfit_pct": m.unfitness_percent,
        "loss": m.loss,
        "fpe": m.fpe,
        "mse_norm": m.mse_normalized,
        "mse_plain": m.mse_plain,
        "n_samples": m.n_samples,
        "n_params": m.n_params,
    }


def report_to_dict(report: StudyReport) -> dict:
    parts = []
    for out in report.outcomes:
        entry: dict = {
            "partition": out.partition_id,
            "split_h": out.split_hour,
        }
        if out.failed:
            entry["failed"] = True
            entry["reason"] = out.failure_reason
            entry["model"] = None
            entry["est"] = None
            entry["val"] = None
        else:
            entry["failed"] = False
            entry["model"] = {
                "order": out.model.tf.order,
                "num": list(out.model.tf.num),
                "den": list(out.model.tf.den),
                "cost": out.model.cost,
                "iterations": out.model.iterations,
                "converged": out.model.converged,
            }
            entry["est"] = metrics_to_dict(out.estimation)
            entry["val"] = metrics_to_dict(out.validation)
        parts.append(entry)
    return {
        "dataset_fingerprint": report.dataset_fingerprint,
        "config": report.config,
        "partitions": parts,
        "chosen_partition": report.chosen_partition,
        "predictor_partition": report.predictor_partition,
    }


def report_text(report: StudyReport) -> str:
    return json.dumps(report_to_dict(report), indent=2) + "\n"


def write_report(report: StudyReport, path) -> None:
    Path(path).write_text(report_text(report), encoding="utf-8")


def figure_table_text(report: StudyReport) -> str:
    """Flat CSV of the quality comparison, one row per partition.

    ``fpe``, ``loss`` and ``mse`` are the estimation-segment values; an
    empty ``val_unfit`` cell marks an undefined validation metric.
    """
    lines = [FIGURE2_HEADER]
    for out in report.outcomes:
        if out.failed or out.estimation is None:
            lines.append(f"{out.partition_id},,,,,")
            continue
        est = out.estimation
        val_unfit = ""
        if out.validation is not None and out.validation.unfitness_percent is not None:
            val_unfit = _fmt(out.validation.unfitness_percent)
        est_unfit = "" if est.unfitness_percent is None else _fmt(est.unfitness_percent)
        fpe_cell = "" if est.fpe is None else _fmt(est.fpe)
        mse_cell = "" if est.mse_normalized is None else _fmt(est.mse_normalized)
        lines.append(
            f"{out.partition_id},{val_unfit},{est_unfit},{fpe_cell},"
            f"{_fmt(est.loss)},{mse_cell}")
    return "\n".join(lines) + "\n"


def write_figure_table(report: StudyReport, path) -> None:
    Path(path).write_text(figure_table_text(report), encoding="utf-8")
