"""Transient and steady-state descriptors of sampled responses.

A stable response is *steady* once it enters and stays inside a band of
two percent (by default) around its final value; the time of that entry is
the settling time.  A response still approaching the band is *transient*,
and one that leaves the band again, or has no trend toward a final value,
is *unsteady*.  Band membership is judged at the samples; the reported
settling time interpolates the band crossing between samples.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import lti
from .errors import NeverSettles, NotStable, PoleAtOrigin

StateClass = Literal["transient", "steady", "unsteady"]

DEFAULT_THRESHOLD = 0.02


@dataclass(frozen=True)
class StepMetrics:
    """Descriptors of one step response; None marks undefined entries."""

    dc_gain: float | None
    time_constant: float | None  # hours, first-order only
    settling_time: float | None  # hours
    peak_value: float
    peak_time: float
    steady_state: float | None
    state: StateClass

    def as_dict(self) -> dict:
        return {
            "dc_gain": self.dc_gain,
            "time_constant_h": self.time_constant,
            "settling_time_h": self.settling_time,
            "peak_value_m": self.peak_value,
            "peak_time_h": self.peak_time,
            "steady_state_m": self.steady_state,
            "state": self.state,
        }


def settling_time(response: lti.Response, final_value: float,
                  threshold: float = DEFAULT_THRESHOLD) -> float:
    """First time after which the response stays within the band forever.

    The band is ``threshold * |final_value|`` around the final value; the
    crossing instant is linearly interpolated between the last out-of-band
    sample and the first sample of the in-band tail.  Raises NeverSettles
    when the response is outside the band at the end of the horizon.
    """
    if final_value == 0.0:
        raise ValueError("settling undefined for a zero final value")
    y = response.values
    band = threshold * abs(final_value)
    dist = np.abs(y - final_value)
    inside = dist <= band
    if not inside[-1]:
        raise NeverSettles("response ends outside the settling band")
    outside = np.flatnonzero(~inside)
    if len(outside) == 0:
        return 0.0
    i_out = int(outside[-1])
    d0, d1 = dist[i_out], dist[i_out + 1]
    frac = (d0 - band) / (d0 - d1) if d0 > d1 else 1.0
    return float(response.t0 + response.period * (i_out + frac))


def peak(response: lti.Response) -> tuple[float, float]:
    """(value, time) of the largest-magnitude sample, first attainment.

    A sample within 1e-9 of the supremum counts as attaining it.
    """
    y = response.values
    y_abs = np.abs(y)
    top = float(y_abs.max())
    first = int(np.flatnonzero(y_abs >= top - 1e-9)[0])
    return float(y[first]), float(response.t0 + response.period * first)


def steady_state_value(tf: lti.TransferFunction, amplitude: float) -> float:
    """Asymptotic output for a constant input: amplitude times the dc gain."""
    if not lti.is_stable(tf):
        raise NotStable("no steady state for an unstable model")
    return amplitude * lti.dc_gain(tf)


def classify_state(response: lti.Response, final_value: float,
                   threshold: float = DEFAULT_THRESHOLD) -> StateClass:
    """Three-way state call over the response's own horizon.

    steady: entered the band and never left it; transient: not in the band
    yet but monotonically approaching the final value; unsteady: left the
    band after entering, or shows no approach.
    """
    y = response.values
    band = threshold * abs(final_value)
    dist = np.abs(y - final_value)
    inside = dist <= band
    if inside.any():
        first = int(np.argmax(inside))
        return "steady" if bool(inside[first:].all()) else "unsteady"
    slack = 1e-12 * max(1.0, abs(final_value))
    approaching = bool(np.all(np.diff(dist) <= slack))
    return "transient" if approaching else "unsteady"


def time_to_level(response: lti.Response, level: float) -> float | None:
    """First instant the response reaches the level, linearly interpolated.

    None when the level is never reached within the horizon.
    """
    y = response.values
    hit = np.flatnonzero(y >= level)
    if len(hit) == 0:
        return None
    k = int(hit[0])
    if k == 0:
        return float(response.t0)
    y0, y1 = y[k - 1], y[k]
    frac = (level - y0) / (y1 - y0) if y1 > y0 else 1.0
    return float(response.t0 + response.period * (k - 1 + frac))


def step_metrics(tf: lti.TransferFunction, amplitude: float, horizon: float,
                 period: float, threshold: float = DEFAULT_THRESHOLD,
                 ) -> tuple[StepMetrics, lti.Response]:
    """Full descriptor bundle plus the trajectory it was measured on."""
    response = lti.step_response(tf, amplitude, horizon, period)
    try:
        gain = lti.dc_gain(tf)
    except PoleAtOrigin:
        gain = None
    tau = None
    if tf.order == 1 and tf.den[0] > 0:
        tau = lti.time_constant(tf)
    peak_value, peak_time = peak(response)

    stable = lti.is_stable(tf)
    if amplitude == 0.0:
        # Zero input from rest: identically zero output, settled from t0.
        return StepMetrics(
            dc_gain=gain, time_constant=tau, settling_time=0.0,
            peak_value=peak_value, peak_time=peak_time,
            steady_state=0.0, state="steady",
        ), response
    if not stable:
        return StepMetrics(
            dc_gain=gain, time_constant=tau, settling_time=None,
            peak_value=peak_value, peak_time=peak_time,
            steady_state=None, state="unsteady",
        ), response

    final = steady_state_value(tf, amplitude)
    try:
        t_s = settling_time(response, final, threshold)
    except NeverSettles:
        t_s = None
    state = classify_state(response, final, threshold)
    return StepMetrics(
        dc_gain=gain, time_constant=tau, settling_time=t_s,
        peak_value=peak_value, peak_time=peak_time,
        steady_state=final, state=state,
    ), response
