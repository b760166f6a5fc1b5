"""Continuous-time transfer functions and their exact sampled simulation.

Models are strictly proper rationals G(s) = num(s)/den(s) with a monic
denominator, stored as coefficient lists in ascending powers of s.  The
first-order workhorse is G(s) = b/(s + a), carried as num=[b], den=[a, 1].

Simulation holds the input constant over each sample interval (zero-order
hold), which is exact at the grid points: no integration error, fully
deterministic, and safe to run in parallel since everything here is a pure
function over immutable values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.signal import lfilter

from .errors import ImproperModel, PoleAtOrigin, ZeroDenominator


@dataclass(frozen=True)
class TransferFunction:
    """G(s) = num(s)/den(s), ascending coefficients, monic denominator."""

    num: tuple[float, ...]
    den: tuple[float, ...]

    @property
    def order(self) -> int:
        return len(self.den) - 1

    def describe(self) -> str:
        """Human-readable form, e.g. ``0.6646 / (s + 0.6687)``."""
        return f"({_poly_str(self.num)}) / ({_poly_str(self.den)})"


def _poly_str(coeffs: tuple[float, ...]) -> str:
    terms = []
    for k in reversed(range(len(coeffs))):
        c = coeffs[k]
        if c == 0 and len(coeffs) > 1:
            continue
        if k == 0:
            terms.append(f"{c:g}")
        elif k == 1:
            terms.append("s" if c == 1 else f"{c:g} s")
        else:
            terms.append(f"s^{k}" if c == 1 else f"{c:g} s^{k}")
    return " + ".join(terms) if terms else "0"


@dataclass(frozen=True)
class DiscreteRecursion:
    """Exact zero-order-hold realization of a model on a fixed sample period.

    First-order models use the scalar closed form (a_d, b_d); higher orders
    carry the discretized state-space matrices in controllable canonical form.
    """

    period: float
    order: int
    a_d: float | None = None
    b_d: float | None = None
    ad_matrix: np.ndarray | None = None
    bd_matrix: np.ndarray | None = None
    c_row: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class Response:
    """A sampled output trajectory with its grid and provenance."""

    t0: float
    period: float
    values: np.ndarray
    input_label: str = ""

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if len(values) < 1:
            raise ValueError("response must hold at least one sample")
        if not np.all(np.isfinite(values)):
            raise ValueError("response values must be finite")
        values.flags.writeable = False

    def times(self) -> np.ndarray:
        return self.t0 + self.period * np.arange(len(self.values))


def make_tf(num, den) -> TransferFunction:
    """Build a strictly proper transfer function with a monic denominator.

    Coefficients are ascending powers of s; trailing zero coefficients are
    trimmed before the degree check.  Raises ZeroDenominator when the
    denominator (or its leading coefficient) vanishes and ImproperModel when
    the numerator degree is not strictly smaller.
    """
    num = [float(c) for c in num]
    den = [float(c) for c in den]
    while len(num) > 1 and num[-1] == 0.0:
        num.pop()
    while len(den) > 1 and den[-1] == 0.0:
        den.pop()
    if not den or all(c == 0.0 for c in den):
        raise ZeroDenominator("denominator is zero")
    if len(den) < 2:
        raise ImproperModel("denominator degree must be at least 1")
    lead = den[-1]
    if lead == 0.0:
        raise ZeroDenominator("zero leading denominator coefficient")
    if len(num) >= len(den):
        raise ImproperModel("numerator degree must be below denominator degree")
    num = [c / lead for c in num]
    den = [c / lead for c in den]
    den[-1] = 1.0
    return TransferFunction(num=tuple(num), den=tuple(den))


def first_order(b: float, a: float) -> TransferFunction:
    """Shorthand for b/(s + a)."""
    return make_tf([b], [a, 1.0])


def first_order_params(tf: TransferFunction) -> tuple[float, float]:
    """Extract (b, a) from a first-order model."""
    if tf.order != 1:
        raise ValueError("model is not first order")
    return tf.num[0], tf.den[0]


def dc_gain(tf: TransferFunction) -> float:
    """Steady output per unit constant input: num(0)/den(0)."""
    if tf.den[0] == 0.0:
        raise PoleAtOrigin("dc gain undefined with a pole at s = 0")
    return tf.num[0] / tf.den[0]


def poles(tf: TransferFunction) -> list[complex]:
    """Denominator roots; the first-order case is exact, no root-finder."""
    if tf.order == 1:
        return [complex(-tf.den[0], 0.0)]
    return [complex(r) for r in np.roots(tf.den[::-1])]


def is_stable(tf: TransferFunction) -> bool:
    """True when every pole has a strictly negative real part."""
    return all(p.real < 0 for p in poles(tf))


def time_constant(tf: TransferFunction) -> float:
    """1/a for a stable first-order model."""
    b, a = first_order_params(tf)
    if a <= 0:
        raise ValueError("time constant defined for stable first order only")
    return 1.0 / a


def discretize_zoh(tf: TransferFunction, period: float) -> DiscreteRecursion:
    """Exact zero-order-hold discretization for the given sample period.

    First order: a_d = exp(-a T), b_d = (b/a)(1 - a_d), degenerating to
    b_d = b T when the pole sits at the origin.  Higher orders go through
    the matrix exponential of the augmented [[A, B], [0, 0]] system in
    controllable canonical form.
    """
    if period <= 0:
        raise ValueError("period must be positive")
    n = tf.order
    if n == 1:
        b, a = tf.num[0], tf.den[0]
        a_d = math.exp(-a * period)
        if a == 0.0:
            b_d = b * period
        else:
            # -expm1(-aT)/a stays accurate as a -> 0 (integrator limit b*T)
            b_d = -b * math.expm1(-a * period) / a
        return DiscreteRecursion(period=period, order=1, a_d=a_d, b_d=b_d)

    a_mat = np.zeros((n, n))
    a_mat[:-1, 1:] = np.eye(n - 1)
    a_mat[-1, :] = [-c for c in tf.den[:-1]]
    b_col = np.zeros((n, 1))
    b_col[-1, 0] = 1.0
    c_row = np.zeros(n)
    c_row[: len(tf.num)] = tf.num

    aug = np.zeros((n + 1, n + 1))
    aug[:n, :n] = a_mat
    aug[:n, n:] = b_col
    m = expm(aug * period)
    return DiscreteRecursion(
        period=period,
        order=n,
        ad_matrix=m[:n, :n],
        bd_matrix=m[:n, n:],
        c_row=c_row,
    )


def run_recursion(rec: DiscreteRecursion, u: np.ndarray) -> np.ndarray:
    """Drive the discrete recursion from rest: y[0] = 0, y[k] from u[0..k-1]."""
    u = np.asarray(u, dtype=float)
    if rec.order == 1:
        # y[k+1] = a_d y[k] + b_d u[k]  <=>  one-sample-delayed IIR filter
        return lfilter([0.0, rec.b_d], [1.0, -rec.a_d], u)
    n = rec.order
    x = np.zeros(n)
    y = np.empty(len(u))
    for k in range(len(u)):
        y[k] = rec.c_row @ x
        x = rec.ad_matrix @ x + rec.bd_matrix[:, 0] * u[k]
    return y


def simulate(tf: TransferFunction, u, period: float, t0: float = 0.0,
             input_label: str = "") -> Response:
    """Simulate the model from rest against a sampled input record.

    Assumes zero initial conditions (use normalized data); the output at
    sample k depends on u[0..k-1] only, so y[0] is always 0.
    """
    u = np.asarray(u, dtype=float)
    if len(u) < 1:
        raise ValueError("input record is empty")
    rec = discretize_zoh(tf, period)
    y = run_recursion(rec, u)
    return Response(t0=t0, period=period, values=y, input_label=input_label)


def step_response(tf: TransferFunction, amplitude: float, horizon: float,
                  period: float) -> Response:
    """Response to a constant input of the given amplitude from t = 0."""
    if horizon < period:
        raise ValueError("horizon must cover at least one period")
    n = int(math.floor(horizon / period + 1e-9)) + 1
    u = np.full(n, float(amplitude))
    return simulate(tf, u, period, input_label=f"step {amplitude:g}")


def step_response_analytic(tf: TransferFunction, amplitude: float, times) -> np.ndarray:
    """Closed-form first-order step response A (b/a)(1 - exp(-a t)).

    Verification aid: the ZOH recursion must match this at every grid point.
    """
    b, a = first_order_params(tf)
    t = np.asarray(times, dtype=float)
    if a == 0.0:
        return amplitude * b * t
    return amplitude * (b / a) * (1.0 - np.exp(-a * t))
