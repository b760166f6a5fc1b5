"""The partitioned estimate/select/refine/cross-validate study.

The dataset is split at every multiple of the step (20 h by default).  Each
split fits candidates on the prefix by multistart, keeps the best three,
refines them, and crowns the one with the lowest estimation unfitness.
Validation always re-simulates from t = 0 with the full input record so the
model reaches the validation window through its own dynamics, then scores
the validation indices only.

Two roles come out of the study: the *chosen* model (lowest estimation
unfitness overall, in practice the longest window) and the *predictor*
(earliest partition whose validation unfitness clears a threshold), which
demonstrates early-stage prediction.  Partitions are independent and could
be evaluated concurrently; assembly of the report is a deterministic
reduction, and re-running on the same data reproduces it exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import lti
from .errors import AllStartsFailed, SegmentTooShort
from .fitting import CandidateModel, FitOptions, multistart, refine, select_candidates
from .metrics import QualityMetrics, quality_metrics
from .series import NormalizedPair, Partition, partition_grid, split_at

DEFAULT_STEP_HOURS = 20.0
DEFAULT_PREDICTOR_THRESHOLD = 15.0
DEFAULT_SELECT_COUNT = 3


@dataclass(frozen=True)
class PartitionOutcome:
    """Everything the study learned from one split."""

    partition_id: int
    split_hour: float
    k_split: int
    model: CandidateModel | None
    estimation: QualityMetrics | None
    validation: QualityMetrics | None
    failed: bool = False
    failure_reason: str | None = None


@dataclass(frozen=True)
class StudyReport:
    """Per-partition outcomes plus the chosen/predictor calls."""

    outcomes: tuple[PartitionOutcome, ...]
    chosen_partition: int | None
    predictor_partition: int | None
    dataset_fingerprint: str
    step_hours: float
    predictor_threshold: float
    config: dict


def evaluate_split(pair: NormalizedPair, split_hour: float, options: FitOptions,
                   select_count: int = DEFAULT_SELECT_COUNT,
                   ) -> tuple[CandidateModel, QualityMetrics, QualityMetrics | None, Partition]:
    """Fit on the prefix up to split_hour and score both segments.

    Returns (best model, estimation metrics, validation metrics, partition);
    validation metrics are None only when the validation window is empty,
    which the partition rules prevent.
    """
    est_pair, part = split_at(pair, split_hour)
    ranked = multistart(est_pair, options)
    shortlisted = select_candidates(ranked, select_count)
    refined = [refine(c, est_pair, options) for c in shortlisted]
    best = min(refined, key=lambda c: (c.cost, c.tf.den[0]))

    base = pair.base
    y_hat = lti.simulate(best.tf, base.u, base.period).values
    est_idx = np.asarray(part.estimation_indices)
    val_idx = np.asarray(part.validation_indices)
    est_m = quality_metrics(base.y[est_idx], y_hat[est_idx], best.n_params)
    val_m = None
    if len(val_idx) > 0:
        val_m = quality_metrics(base.y[val_idx], y_hat[val_idx], best.n_params)
    return best, est_m, val_m, part


def validate_model(model: CandidateModel, pair: NormalizedPair,
                   partition: Partition) -> QualityMetrics:
    """Score a fitted model on a partition's validation window.

    The simulation starts from rest at t = 0 and runs over the full record,
    so the state entering the window reflects the model's own dynamics.
    """
    base = pair.base
    y_hat = lti.simulate(model.tf, base.u, base.period).values
    idx = np.asarray(partition.validation_indices)
    return quality_metrics(base.y[idx], y_hat[idx], model.n_params)


def _unfit_or_inf(m: QualityMetrics | None) -> float:
    if m is None or m.unfitness_percent is None:
        return float("inf")
    return m.unfitness_percent


def choose_overall(outcomes: list[PartitionOutcome],
                   predictor_threshold: float = DEFAULT_PREDICTOR_THRESHOLD,
                   ) -> tuple[int | None, int | None]:
    """(chosen partition, predictor partition) from the study outcomes.

    Chosen: lowest estimation unfitness, earliest partition on ties.
    Predictor: earliest partition whose validation unfitness is defined and
    below the threshold; None when no partition qualifies.
    """
    chosen = None
    best_unfit = float("inf")
    for out in outcomes:
        if out.failed:
            continue
        unfit = _unfit_or_inf(out.estimation)
        if unfit < best_unfit:
            best_unfit = unfit
            chosen = out.partition_id
    predictor = None
    for out in outcomes:
        if out.failed:
            continue
        if _unfit_or_inf(out.validation) < predictor_threshold:
            predictor = out.partition_id
            break
    return chosen, predictor


def run_protocol(pair: NormalizedPair, options: FitOptions,
                 step: float = DEFAULT_STEP_HOURS,
                 predictor_threshold: float = DEFAULT_PREDICTOR_THRESHOLD,
                 select_count: int = DEFAULT_SELECT_COUNT) -> StudyReport:
    """Run the whole partitioned study and assemble the report.

    A partition whose estimation fails entirely is recorded as a flagged
    outcome instead of aborting the run.
    """
    from .files import dataset_fingerprint
    from .series import denormalize

    base = pair.base
    partitions = partition_grid(base.n_samples, base.period, step)
    outcomes: list[PartitionOutcome] = []
    for i, part in enumerate(partitions, start=1):
        try:
            best, est_m, val_m, part = evaluate_split(
                pair, part.split_hour, options, select_count)
        except (AllStartsFailed, SegmentTooShort) as exc:
            outcomes.append(PartitionOutcome(
                partition_id=i, split_hour=part.split_hour, k_split=part.k_split,
                model=None, estimation=None, validation=None,
                failed=True, failure_reason=str(exc)))
            continue
        outcomes.append(PartitionOutcome(
            partition_id=i, split_hour=part.split_hour, k_split=part.k_split,
            model=best, estimation=est_m, validation=val_m))

    chosen, predictor = choose_overall(outcomes, predictor_threshold)
    return StudyReport(
        outcomes=tuple(outcomes),
        chosen_partition=chosen,
        predictor_partition=predictor,
        dataset_fingerprint=dataset_fingerprint(denormalize(pair)),
        step_hours=step,
        predictor_threshold=predictor_threshold,
        config={
            "fit": options.as_dict(),
            "step_h": step,
            "predictor_threshold_pct": predictor_threshold,
            "select_count": select_count,
        },
    )
