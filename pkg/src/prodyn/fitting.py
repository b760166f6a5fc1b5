"""Iterative prediction-error fitting of first-order models.

The cost is the mean squared *simulation* error: the model is driven by the
recorded input alone from zero initial conditions and compared to the
measured output over the whole segment.  Minimization is Levenberg-Marquardt
with finite-difference Jacobians; stability is enforced by optimizing the
pole through an exponential map (a = exp(alpha) > 0), which can be switched
off for unsteady-process studies.

Everything is deterministic: identical data and options reproduce identical
parameters bit for bit.  Multistart fits are independent of each other and
could run concurrently; the ranking afterwards is a pure sort.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import lti
from .errors import AllStartsFailed, SegmentTooShort
from .series import NormalizedPair

_LAMBDA_INIT = 1e-3
_LAMBDA_GROW = 10.0
_LAMBDA_SHRINK = 10.0
_LAMBDA_CEIL = 1e12
_FD_SCALE = 1e-6


@dataclass(frozen=True)
class FitOptions:
    """Estimator knobs; defaults match the documented study configuration."""

    order: int = 1
    max_iterations: int = 200
    rel_tolerance: float = 1e-10
    stability_constraint: bool = True
    tau_grid: tuple[float, ...] = (0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0)

    def __post_init__(self):
        if self.order != 1:
            raise ValueError("only first-order estimation is implemented")
        if not self.tau_grid:
            raise ValueError("multistart grid must be non-empty")
        if self.rel_tolerance <= 0:
            raise ValueError("tolerance must be positive")

    def as_dict(self) -> dict:
        return {
            "order": self.order,
            "max_iterations": self.max_iterations,
            "rel_tolerance": self.rel_tolerance,
            "stability_constraint": self.stability_constraint,
            "tau_grid": list(self.tau_grid),
        }


@dataclass(frozen=True)
class CandidateModel:
    """A fitted model with its estimation cost and bookkeeping."""

    tf: lti.TransferFunction
    cost: float  # V: mean squared simulation error, meters^2
    n_params: int
    iterations: int
    converged: bool


def _segment_arrays(pair: NormalizedPair) -> tuple[np.ndarray, np.ndarray, float]:
    return pair.base.u, pair.base.y, pair.base.period


def sim_error_cost(tf: lti.TransferFunction, pair: NormalizedPair) -> float:
    """V = mean squared error of the zero-IC simulation over the segment."""
    u, y, period = _segment_arrays(pair)
    d = len(tf.num) + len(tf.den) - 1
    if len(y) < d + 1:
        raise SegmentTooShort(f"need at least {d + 1} samples, got {len(y)}")
    y_hat = lti.simulate(tf, u, period).values
    e = y - y_hat
    return float(np.mean(e * e))


def cost_gradient(b: float, a: float, pair: NormalizedPair,
                  step_scale: float = _FD_SCALE) -> np.ndarray:
    """Central finite-difference gradient of V with respect to (b, a)."""
    u, y, period = _segment_arrays(pair)

    def v_of(bb: float, aa: float) -> float:
        y_hat = lti.simulate(lti.first_order(bb, aa), u, period).values
        e = y - y_hat
        return float(np.mean(e * e))

    grad = np.empty(2)
    for i, val in enumerate((b, a)):
        h = step_scale * max(abs(val), 1.0)
        args_hi = (b + h, a) if i == 0 else (b, a + h)
        args_lo = (b - h, a) if i == 0 else (b, a - h)
        grad[i] = (v_of(*args_hi) - v_of(*args_lo)) / (2.0 * h)
    return grad


# The exponential map keeps the constrained pole strictly positive; the
# exponent is clamped so it can neither overflow nor underflow to exactly 0.
_ALPHA_LIMIT = 700.0


def _pack(b: float, a: float, constrained: bool) -> np.ndarray:
    if constrained:
        if a <= 0:
            raise ValueError("stability constraint needs a positive initial pole")
        return np.array([b, math.log(a)])
    return np.array([b, a])


def _unpack(phi: np.ndarray, constrained: bool) -> tuple[float, float]:
    if constrained:
        alpha = min(max(float(phi[1]), -_ALPHA_LIMIT), _ALPHA_LIMIT)
        return float(phi[0]), math.exp(alpha)
    return float(phi[0]), float(phi[1])


def _residuals(phi: np.ndarray, u: np.ndarray, y: np.ndarray, period: float,
               constrained: bool) -> np.ndarray:
    b, a = _unpack(phi, constrained)
    y_hat = lti.simulate(lti.first_order(b, a), u, period).values
    return y - y_hat


def _trial_cost(phi: np.ndarray, u: np.ndarray, y: np.ndarray, period: float,
                constrained: bool) -> tuple[np.ndarray | None, float]:
    """Residuals and cost for a trial point; (None, inf) when it blows up."""
    try:
        r = _residuals(phi, u, y, period, constrained)
    except (OverflowError, ValueError, FloatingPointError):
        return None, float("inf")
    cost = float(np.mean(r * r))
    if not math.isfinite(cost):
        return None, float("inf")
    return r, cost


def _jacobian(phi: np.ndarray, u: np.ndarray, y: np.ndarray, period: float,
              constrained: bool) -> np.ndarray:
    jac = np.empty((len(y), len(phi)))
    for i in range(len(phi)):
        h = _FD_SCALE * max(abs(float(phi[i])), 1.0)
        hi = phi.copy()
        lo = phi.copy()
        hi[i] += h
        lo[i] -= h
        jac[:, i] = (
            _residuals(hi, u, y, period, constrained)
            - _residuals(lo, u, y, period, constrained)
        ) / (2.0 * h)
    return jac


def _levenberg_marquardt(phi: np.ndarray, u: np.ndarray, y: np.ndarray,
                         period: float, constrained: bool,
                         max_iterations: int, rel_tolerance: float,
                         ) -> tuple[np.ndarray, float, int, bool]:
    """Damped Gauss-Newton descent on the simulation residuals.

    Damping starts at 1e-3, grows tenfold on a rejected step and shrinks
    tenfold on an accepted one; a step is accepted only if it lowers the
    cost, so the cost sequence never increases.
    """
    r, cost = _trial_cost(phi, u, y, period, constrained)
    if r is None:
        raise ValueError("initial parameters give a non-finite cost")
    lam = _LAMBDA_INIT
    iterations = 0
    converged = cost == 0.0
    for _ in range(max_iterations):
        if converged:
            break
        iterations += 1
        jac = _jacobian(phi, u, y, period, constrained)
        jtj = jac.T @ jac
        jtr = jac.T @ r
        diag = np.diag(np.maximum(np.diag(jtj), 1e-12))
        accepted = False
        while True:
            try:
                delta = np.linalg.solve(jtj + lam * diag, -jtr)
            except np.linalg.LinAlgError:
                delta = None
            if delta is not None and np.all(np.isfinite(delta)):
                phi_try = phi + delta
                r_try, cost_try = _trial_cost(phi_try, u, y, period, constrained)
                if cost_try < cost:
                    improvement = (cost - cost_try) / max(cost, 1e-300)
                    phi, r, cost = phi_try, r_try, cost_try
                    lam = max(lam / _LAMBDA_SHRINK, 1e-15)
                    accepted = True
                    if improvement < rel_tolerance or cost == 0.0:
                        converged = True
                    break
            lam *= _LAMBDA_GROW
            if lam > _LAMBDA_CEIL:
                break
        if not accepted:
            # No damping level improves the cost: a local minimum.
            converged = True
    return phi, cost, iterations, converged


def fit_first_order(pair: NormalizedPair, options: FitOptions,
                    theta0: tuple[float, float]) -> CandidateModel:
    """Fit b/(s + a) to a normalized segment from the initial guess theta0.

    Returns the local minimizer of the simulation-error cost with a
    convergence flag; a run that exhausts its iteration budget still returns
    the best parameters seen, flagged unconverged.
    """
    u, y, period = _segment_arrays(pair)
    if len(y) < 3:
        raise SegmentTooShort(f"need at least 3 samples, got {len(y)}")
    b0, a0 = theta0
    phi0 = _pack(b0, a0, options.stability_constraint)
    phi, cost, iterations, converged = _levenberg_marquardt(
        phi0, u, y, period, options.stability_constraint,
        options.max_iterations, options.rel_tolerance)
    b, a = _unpack(phi, options.stability_constraint)
    return CandidateModel(
        tf=lti.first_order(b, a),
        cost=cost,
        n_params=2,
        iterations=iterations,
        converged=converged,
    )


def gain_guess(pair: NormalizedPair) -> float:
    """DC-gain estimate from segment endpoints; 1 when no goal was issued.

    Cumulative data makes the endpoint ratio (delta y)/(delta u) a consistent
    gain estimate.
    """
    u, y, _ = _segment_arrays(pair)
    du = float(u[-1] - u[0])
    if du == 0.0:
        return 1.0
    return float(y[-1] - y[0]) / du


def multistart(pair: NormalizedPair, options: FitOptions) -> list[CandidateModel]:
    """One fit per time-constant in the grid, ranked best-first.

    Starts use a0 = 1/tau and b0 = K0 a0 with K0 the endpoint gain guess.
    Ranking is by estimation cost ascending (equivalently estimation
    unfitness) with ties broken by the smaller pole.
    """
    k0 = gain_guess(pair)
    candidates: list[CandidateModel] = []
    failures: list[Exception] = []
    for tau in options.tau_grid:
        a0 = 1.0 / tau
        try:
            cand = fit_first_order(pair, options, (k0 * a0, a0))
        except SegmentTooShort:
            raise
        except (ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
            failures.append(exc)
            continue
        if math.isfinite(cand.cost):
            candidates.append(cand)
        else:
            failures.append(ValueError(f"non-finite cost from tau={tau}"))
    if not candidates:
        raise AllStartsFailed(f"all {len(options.tau_grid)} starts failed: {failures}")
    candidates.sort(key=lambda c: (c.cost, c.tf.den[0]))
    return candidates


def select_candidates(ranked: list[CandidateModel], count: int = 3) -> list[CandidateModel]:
    """Keep the best few models for refinement (three, per the study design)."""
    if not ranked:
        raise ValueError("no candidates to select from")
    return ranked[: max(1, min(count, len(ranked)))]


def refine(candidate: CandidateModel, pair: NormalizedPair,
           options: FitOptions) -> CandidateModel:
    """Re-polish a candidate: tolerance tightened 100x, budget doubled.

    Never returns a model with a higher cost than the input.
    """
    b, a = lti.first_order_params(candidate.tf)
    tight = FitOptions(
        order=options.order,
        max_iterations=options.max_iterations * 2,
        rel_tolerance=options.rel_tolerance / 100.0,
        stability_constraint=options.stability_constraint,
        tau_grid=options.tau_grid,
    )
    if tight.stability_constraint and a <= 0:
        return candidate
    refined = fit_first_order(pair, tight, (b, a))
    return refined if refined.cost <= candidate.cost else candidate
