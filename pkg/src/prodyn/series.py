"""Sampled cumulative input/output series: ingestion, normalization, partitioning.

The raw material is a log of operational-report events (goal depth and actual
depth over time).  Everything downstream works on a uniform hourly grid of
cumulative values, shifted so both channels start at zero, and split into
estimation/validation partitions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyInput, NonMonotoneDepth, SplitOffGrid, StepTooLarge

_GRID_RTOL = 1e-9


@dataclass(frozen=True)
class RawEvent:
    """One operational-report observation: where the goal and the bit are."""

    timestamp: float  # hours
    goal_depth: float  # meters, cumulative
    actual_depth: float  # meters, cumulative


@dataclass(frozen=True, eq=False)
class SampledSeries:
    """Uniformly sampled cumulative goal/depth pair.

    Invariants: ``len(u) == len(y) >= 2``, both channels non-decreasing,
    all values finite, ``period > 0``.
    """

    t0: float
    period: float
    u: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "y", y)
        if self.period <= 0:
            raise ValueError("sample period must be positive")
        if u.ndim != 1 or y.ndim != 1 or len(u) != len(y):
            raise ValueError("u and y must be 1-d and equally long")
        if len(u) < 2:
            raise ValueError("need at least two samples")
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(y))):
            raise ValueError("samples must be finite")
        if np.any(np.diff(u) < 0) or np.any(np.diff(y) < 0):
            raise ValueError("cumulative channels must be non-decreasing")
        u.flags.writeable = False
        y.flags.writeable = False

    @property
    def n_samples(self) -> int:
        return len(self.u)

    @property
    def duration(self) -> float:
        """Time span from the first to the last sample, in hours."""
        return (self.n_samples - 1) * self.period

    def times(self) -> np.ndarray:
        return self.t0 + self.period * np.arange(self.n_samples)


@dataclass(frozen=True, eq=False)
class NormalizedPair:
    """A series shifted so u[0] == y[0] == 0, plus the removed offsets.

    Zero initial values make the zero-initial-condition assumption of the
    continuous-time model hold for cumulative data.  The pre-shift series is
    kept so denormalization is bit-exact rather than re-rounded.
    """

    base: SampledSeries
    offset_u: float
    offset_y: float
    source: SampledSeries | None = None

    def __post_init__(self):
        if self.base.u[0] != 0.0 or self.base.y[0] != 0.0:
            raise ValueError("normalized series must start at zero")


@dataclass(frozen=True)
class Partition:
    """An estimation/validation split of an N-sample series.

    Estimation covers indices ``[0, k_split]``, validation ``(k_split, N-1]``.
    For a split falling on the final sample, ``k_split`` is capped at ``N-2``
    so the last sample is retained for validation (the single-sample case).
    """

    split_hour: float
    k_split: int
    n_samples: int = field(repr=False)

    def __post_init__(self):
        if not 0 < self.k_split <= self.n_samples - 2:
            raise ValueError("split must leave both segments non-empty")

    @property
    def estimation_indices(self) -> range:
        return range(0, self.k_split + 1)

    @property
    def validation_indices(self) -> range:
        return range(self.k_split + 1, self.n_samples)


def ingest_events(events: list[RawEvent], period: float) -> SampledSeries:
    """Resample raw events to a uniform grid by last-observation-carried-forward.

    The grid starts at the floor of the first timestamp and extends in steps
    of ``period`` up to the last event's timestamp; each grid point takes the
    most recent observation at or before it.  LOCF is used because it never
    overshoots a cumulative quantity.

    Raises EmptyInput for no events and NonMonotoneDepth when a raw depth
    or goal decreases.
    """
    if not events:
        raise EmptyInput("no events to resample")
    if period <= 0:
        raise ValueError("period must be positive")
    for i in range(1, len(events)):
        if events[i].timestamp < events[i - 1].timestamp:
            raise ValueError(f"timestamps decrease at index {i}")
        if (events[i].goal_depth < events[i - 1].goal_depth
                or events[i].actual_depth < events[i - 1].actual_depth):
            raise NonMonotoneDepth(i)
    for i, ev in enumerate(events):
        if not (math.isfinite(ev.goal_depth) and math.isfinite(ev.actual_depth)):
            raise ValueError(f"non-finite depth at index {i}")
        if ev.goal_depth < 0 or ev.actual_depth < 0:
            raise ValueError(f"negative depth at index {i}")

    t_first = events[0].timestamp
    t_last = events[-1].timestamp
    t0 = math.floor(t_first)
    # Largest k with t0 + k*period <= t_last, with a relative tolerance so
    # integer-hour event grids are kept verbatim.
    n = int(math.floor((t_last - t0) / period + _GRID_RTOL)) + 1
    if n < 2:
        n = 2  # degenerate span still yields a minimal two-sample grid

    stamps = np.array([ev.timestamp for ev in events])
    u_raw = np.array([ev.goal_depth for ev in events])
    y_raw = np.array([ev.actual_depth for ev in events])
    grid = t0 + period * np.arange(n)
    # Index of the last event at or before each grid point; grid points
    # before the first event fall back to the first observation.
    idx = np.searchsorted(stamps, grid * (1 + _GRID_RTOL), side="right") - 1
    idx = np.clip(idx, 0, len(events) - 1)
    return SampledSeries(t0=float(t0), period=period, u=u_raw[idx], y=y_raw[idx])


def normalize(series: SampledSeries) -> NormalizedPair:
    """Shift both channels so they start at exactly zero."""
    off_u = float(series.u[0])
    off_y = float(series.y[0])
    base = SampledSeries(
        t0=series.t0,
        period=series.period,
        u=series.u - off_u,
        y=series.y - off_y,
    )
    return NormalizedPair(base=base, offset_u=off_u, offset_y=off_y, source=series)


def denormalize(pair: NormalizedPair) -> SampledSeries:
    """Inverse of :func:`normalize`; restores the original absolute values.

    Pairs produced by :func:`normalize` hand back their source unchanged;
    hand-built pairs are reconstructed by re-applying the offsets.
    """
    if pair.source is not None:
        return pair.source
    return SampledSeries(
        t0=pair.base.t0,
        period=pair.base.period,
        u=pair.base.u + pair.offset_u,
        y=pair.base.y + pair.offset_y,
    )


def partition_grid(n_samples: int, period: float, step: float) -> list[Partition]:
    """Enumerate splits at every multiple of ``step`` within the data span.

    Splits run ``step, 2*step, ...`` up to and including the final sample
    time ``(n_samples-1)*period``; at that boundary the split is clamped so
    exactly one sample remains for validation.

    Raises StepTooLarge when not even the first multiple fits.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    duration = (n_samples - 1) * period
    n_splits = int(math.floor(duration / step + _GRID_RTOL))
    parts = []
    seen: set[int] = set()
    for m in range(1, n_splits + 1):
        split_hour = m * step
        k = int(round(split_hour / period))
        k = min(k, n_samples - 2)  # boundary split keeps the last sample out
        if k < 1 or k in seen:
            continue  # too early to estimate, or same grid point again
        seen.add(k)
        parts.append(Partition(split_hour=split_hour, k_split=k, n_samples=n_samples))
    if not parts:
        raise StepTooLarge(f"no valid split for step {step} h in {duration} h of data")
    return parts


def split_at(pair: NormalizedPair, split_hour: float) -> tuple[NormalizedPair, Partition]:
    """Cut a normalized pair at a grid hour into (estimation view, partition).

    The estimation view shares the parent's offsets.  Raises SplitOffGrid
    when the hour is not a sample instant.
    """
    base = pair.base
    rel = (split_hour - base.t0) / base.period
    k = int(round(rel))
    if abs(rel - k) > _GRID_RTOL * max(1.0, abs(rel)) + _GRID_RTOL:
        raise SplitOffGrid(f"{split_hour} h is not on the {base.period} h grid")
    if not 0 < k <= base.n_samples - 1:
        raise SplitOffGrid(f"{split_hour} h outside the data span")
    k = min(k, base.n_samples - 2)
    part = Partition(split_hour=split_hour, k_split=k, n_samples=base.n_samples)
    est = NormalizedPair(
        base=SampledSeries(
            t0=base.t0,
            period=base.period,
            u=base.u[: k + 1],
            y=base.y[: k + 1],
        ),
        offset_u=pair.offset_u,
        offset_y=pair.offset_y,
    )
    return est, part
