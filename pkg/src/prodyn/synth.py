"""Synthetic cumulative datasets from known models, for oracle testing.

Real well data is proprietary, so regression and recovery tests run against
series generated here: a goal staircase drives a known model, seeded noise
is layered on, and a cumulative-max pass restores monotonicity.  The truth
record carries everything needed to assert recovery or regenerate the file.

The noise stream is a fully specified, portable PRNG (splitmix64 producing
53-bit uniforms, turned into Gaussians by the Box-Muller transform) so the
identifier written into the truth record pins byte-identical streams in any
implementation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import lti
from .series import SampledSeries

RNG_ALGORITHM = "splitmix64-boxmuller-v1"

_MASK64 = (1 << 64) - 1


class SeededStream:
    """splitmix64 core with Box-Muller Gaussian output; one stream per seed."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform on [0, 1) with 53-bit resolution."""
        return (self.next_u64() >> 11) * 2.0**-53

    def gaussian_pair(self) -> tuple[float, float]:
        u1 = 1.0 - self.uniform()  # (0, 1]: keeps the log finite
        u2 = self.uniform()
        r = np.sqrt(-2.0 * np.log(u1))
        return r * np.cos(2.0 * np.pi * u2), r * np.sin(2.0 * np.pi * u2)

    def gaussians(self, n: int) -> np.ndarray:
        out = np.empty(n)
        for i in range(0, n - 1, 2):
            out[i], out[i + 1] = self.gaussian_pair()
        if n % 2:
            out[-1] = self.gaussian_pair()[0]
        return out

    def uniforms(self, n: int) -> np.ndarray:
        return np.array([self.uniform() for _ in range(n)])


def steady_increments(n_steps: int, rate: float) -> tuple[float, ...]:
    """A constant-rate goal plan: the same increment every hour."""
    return (float(rate),) * n_steps


def jittered_increments(n_steps: int, mean_rate: float, seed: int) -> tuple[float, ...]:
    """Per-hour increments uniform on [0, 2*mean): staircase with variety.

    Every hour gets some excitation, so any estimation window identifies the
    model; the long-run rate averages to ``mean_rate``.
    """
    stream = SeededStream(seed)
    return tuple(2.0 * mean_rate * stream.uniform() for _ in range(n_steps))


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for one synthetic dataset; reproducible for a given seed."""

    tf: lti.TransferFunction
    increments: tuple[float, ...]
    noise_fraction: float = 0.0  # sigma as a fraction of the clean output range
    seed: int = 0
    period: float = 1.0
    base_u: float = 0.0
    base_y: float = 0.0

    def __post_init__(self):
        if self.noise_fraction < 0:
            raise ValueError("noise fraction must be non-negative")
        if len(self.increments) < 2:
            raise ValueError("need at least two increments")
        if any(i < 0 for i in self.increments):
            raise ValueError("goal increments must be non-negative")


@dataclass(frozen=True)
class TruthRecord:
    """What actually generated a dataset, for oracle assertions."""

    tf: lti.TransferFunction
    spec: SynthSpec
    noise_sigma: float

    def as_dict(self) -> dict:
        return {
            "rng": RNG_ALGORITHM,
            "seed": self.spec.seed,
            "noise_fraction": self.spec.noise_fraction,
            "noise_sigma_m": self.noise_sigma,
            "period_h": self.spec.period,
            "n_samples": len(self.spec.increments) + 1,
            "base_u_m": self.spec.base_u,
            "base_y_m": self.spec.base_y,
            "generator": {"num": list(self.tf.num), "den": list(self.tf.den)},
            "increments_m": list(self.spec.increments),
        }


def _clean_output(spec: SynthSpec, gain_shift: tuple[float, float] | None) -> np.ndarray:
    u_rel = np.concatenate(([0.0], np.cumsum(spec.increments)))
    if gain_shift is None:
        return lti.simulate(spec.tf, u_rel, spec.period).values, u_rel
    # Piecewise gain: the input matrix scales after the shift hour while the
    # state carries over, mimicking a productivity regime change.
    shift_hour, factor = gain_shift
    rec = lti.discretize_zoh(spec.tf, spec.period)
    if rec.order != 1:
        raise ValueError("gain shift supported for first-order generators only")
    y = np.empty(len(u_rel))
    y[0] = 0.0
    for k in range(len(u_rel) - 1):
        t_k = k * spec.period
        b_d = rec.b_d * (factor if t_k >= shift_hour else 1.0)
        y[k + 1] = rec.a_d * y[k] + b_d * u_rel[k]
    return y, u_rel


def generate(spec: SynthSpec,
             gain_shift: tuple[float, float] | None = None,
             ) -> tuple[SampledSeries, TruthRecord]:
    """Produce (dataset, truth) from the recipe.

    The clean output is the exact model response to the cumulative goal
    staircase; Gaussian noise scaled to ``noise_fraction`` of the clean range
    is added, and a cumulative-max pass restores the non-decreasing shape
    (a no-op when the noise is zero).  An optional ``(hour, factor)`` gain
    shift rescales the model gain from that hour on, state kept continuous.
    """
    y_clean, u_rel = _clean_output(spec, gain_shift)
    n = len(u_rel)
    sigma = 0.0
    y_rel = y_clean
    if spec.noise_fraction > 0.0:
        sigma = spec.noise_fraction * float(y_clean.max() - y_clean.min())
        noise = SeededStream(spec.seed).gaussians(n)
        y_rel = np.maximum.accumulate(y_clean + sigma * noise)
    dataset = SampledSeries(
        t0=0.0,
        period=spec.period,
        u=spec.base_u + u_rel,
        y=spec.base_y + y_rel,
    )
    return dataset, TruthRecord(tf=spec.tf, spec=spec, noise_sigma=sigma)


# Committed regression fixture: shaped like the published drilling campaign
# (181 hourly samples, ~395 m of cumulative progress) with the generator
# 0.6646/(s + 0.6687).  The mean rate and noise fraction were calibrated by
# bisection so the fixture's protocol run lands at 93% estimation fit for
# the chosen model and the total rise stays near 395 m; see tests/data/ for
# the frozen files.
FIXTURE_SEED = 42
FIXTURE_PLAN_SEED = 7
FIXTURE_SAMPLES = 181
FIXTURE_MEAN_RATE = 2.1229
FIXTURE_NOISE_FRACTION = 0.0346
FIXTURE_BASE_DEPTH = 3305.0


def fixture_spec() -> SynthSpec:
    """Recipe of the committed campaign-shaped fixture."""
    return SynthSpec(
        tf=lti.first_order(0.6646, 0.6687),
        increments=jittered_increments(
            FIXTURE_SAMPLES - 1, FIXTURE_MEAN_RATE, FIXTURE_PLAN_SEED),
        noise_fraction=FIXTURE_NOISE_FRACTION,
        seed=FIXTURE_SEED,
        period=1.0,
        base_u=FIXTURE_BASE_DEPTH,
        base_y=FIXTURE_BASE_DEPTH,
    )


def campaign_fixture() -> tuple[SampledSeries, TruthRecord]:
    """The committed regression fixture: ~395 m rise over 181 hourly samples."""
    return generate(fixture_spec())
