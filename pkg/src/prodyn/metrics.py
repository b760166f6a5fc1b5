"""Model-quality measurements for a (measured, simulated) output pair.

Four measurements travel together through the validation protocol: NRMSE
fit/unfitness percentages, the mean-squared loss V, Akaike's final
prediction error FPE = V (1 + d/N)/(1 - d/N), and the normalized mean
squared error (plain MSE is reported alongside to remove ambiguity).

Undefined values are first-class: the aggregate :func:`quality_metrics`
stores None where a measurement has no value (single-sample or constant
segments), so reports can say "impossible to calculate" instead of dying.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSampleCount, UndefinedMetric


@dataclass(frozen=True)
class QualityMetrics:
    """Measurement bundle for one data segment; None marks undefined entries."""

    fit_percent: float | None
    unfitness_percent: float | None
    loss: float
    fpe: float | None
    mse_normalized: float | None
    mse_plain: float
    n_samples: int
    n_params: int


def _as_pair(y, y_hat) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(y, dtype=float)
    y_hat = np.asarray(y_hat, dtype=float)
    if y.shape != y_hat.shape or y.ndim != 1:
        raise ValueError("y and y_hat must be equal-length 1-d arrays")
    return y, y_hat


def nrmse_fit(y, y_hat) -> float:
    """Percent fit 100 (1 - ||y - y_hat|| / ||y - mean(y)||).

    100 is a perfect reproduction, 0 is no better than the mean.  Raises
    UndefinedMetric for fewer than two samples or a constant reference,
    where the normalization vanishes.
    """
    y, y_hat = _as_pair(y, y_hat)
    if len(y) < 2:
        raise UndefinedMetric("fit needs at least two samples")
    spread = np.linalg.norm(y - y.mean())
    if spread == 0.0:
        raise UndefinedMetric("fit undefined for a constant reference")
    return 100.0 * (1.0 - np.linalg.norm(y - y_hat) / spread)


def unfitness(y, y_hat) -> float:
    """Complement of the fit: 100 - nrmse_fit."""
    return 100.0 - nrmse_fit(y, y_hat)


def loss_fn(y, y_hat) -> float:
    """Mean squared residual V = (1/N) sum (y_k - y_hat_k)^2."""
    y, y_hat = _as_pair(y, y_hat)
    if len(y) < 1:
        raise ValueError("loss needs at least one sample")
    e = y - y_hat
    return float(np.mean(e * e))


def fpe(loss: float, n_params: int, n_samples: int) -> float:
    """Akaike's final prediction error V (1 + d/N)/(1 - d/N).

    Raises DegenerateSampleCount when the sample count does not exceed the
    parameter count.  d = 0 is allowed and returns V itself.
    """
    if loss < 0:
        raise ValueError("loss must be non-negative")
    if n_params < 0:
        raise ValueError("parameter count must be non-negative")
    if n_samples <= n_params:
        raise DegenerateSampleCount(
            f"FPE needs more samples ({n_samples}) than parameters ({n_params})")
    ratio = n_params / n_samples
    return loss * (1.0 + ratio) / (1.0 - ratio)


def mse(y, y_hat) -> tuple[float, float]:
    """(plain, normalized) mean squared error.

    The normalized variant divides the squared residual sum by the squared
    spread about the reference mean and equals ((100 - fit)/100)^2; it is
    undefined (UndefinedMetric) for constant references.
    """
    y, y_hat = _as_pair(y, y_hat)
    if len(y) < 2:
        raise UndefinedMetric("mse needs at least two samples")
    e = y - y_hat
    plain = float(np.mean(e * e))
    denom = float(np.sum((y - y.mean()) ** 2))
    if denom == 0.0:
        raise UndefinedMetric("normalized mse undefined for a constant reference")
    return plain, float(np.sum(e * e) / denom)


def quality_metrics(y, y_hat, n_params: int) -> QualityMetrics:
    """Compute the full bundle, mapping undefined measurements to None."""
    y, y_hat = _as_pair(y, y_hat)
    loss = loss_fn(y, y_hat)
    plain = loss
    try:
        fit = nrmse_fit(y, y_hat)
        unfit = 100.0 - fit
    except UndefinedMetric:
        fit = unfit = None
    try:
        fpe_val = fpe(loss, n_params, len(y))
    except DegenerateSampleCount:
        fpe_val = None
    try:
        _, norm_mse = mse(y, y_hat)
    except UndefinedMetric:
        norm_mse = None
    return QualityMetrics(
        fit_percent=fit,
        unfitness_percent=unfit,
        loss=loss,
        fpe=fpe_val,
        mse_normalized=norm_mse,
        mse_plain=plain,
        n_samples=len(y),
        n_params=n_params,
    )
