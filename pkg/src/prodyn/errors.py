"""Exception types shared across the toolkit."""

from __future__ import annotations


class ProdynError(Exception):
    """Base class for all toolkit errors."""


class EmptyInput(ProdynError):
    """Raised when an operation receives no data to work on."""


class NonMonotoneDepth(ProdynError):
    """A cumulative depth value decreased; physically impossible.

    Carries the index of the offending observation.
    """

    def __init__(self, index: int, message: str | None = None):
        self.index = index
        super().__init__(message or f"depth decreases at index {index}")


class StepTooLarge(ProdynError):
    """Partition step exceeds the span of the data; no split fits."""


class SplitOffGrid(ProdynError):
    """Requested split hour does not coincide with a sample instant."""


class ImproperModel(ProdynError):
    """Numerator degree is not strictly below denominator degree."""


class ZeroDenominator(ProdynError):
    """Denominator is zero or has a zero leading coefficient."""


class PoleAtOrigin(ProdynError):
    """Operation undefined for a pole at s = 0."""


class NotStable(ProdynError):
    """Operation requires a stable model."""


class SegmentTooShort(ProdynError):
    """Data segment has too few samples for the requested fit."""


class AllStartsFailed(ProdynError):
    """Every multistart initialization failed to produce a candidate."""


class UndefinedMetric(ProdynError):
    """Metric has no defined value for the given data (e.g. constant output)."""


class DegenerateSampleCount(UndefinedMetric):
    """FPE undefined: sample count does not exceed parameter count."""


class NeverSettles(ProdynError):
    """Response does not enter and stay inside the settling band."""
