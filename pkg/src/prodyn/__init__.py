"""prodyn: continuous-time models of repetitive production processes.

Identify transfer functions from sampled cumulative input/output records,
validate them with a partitioned cross-validation study, and analyze or
simulate their transient and steady-state behavior.
"""

from .errors import ProdynError
from .fitting import CandidateModel, FitOptions, fit_first_order, multistart
from .lti import TransferFunction, dc_gain, first_order, make_tf, simulate, step_response
from .metrics import QualityMetrics, quality_metrics
from .series import (NormalizedPair, Partition, RawEvent, SampledSeries,
                     ingest_events, normalize, partition_grid, split_at)
from .stepinfo import StepMetrics, step_metrics
from .crossval import StudyReport, run_protocol

__version__ = "0.1.0"

__all__ = [
    "CandidateModel",
    "FitOptions",
    "NormalizedPair",
    "Partition",
    "ProdynError",
    "QualityMetrics",
    "RawEvent",
    "SampledSeries",
    "StepMetrics",
    "StudyReport",
    "TransferFunction",
    "dc_gain",
    "first_order",
    "fit_first_order",
    "ingest_events",
    "make_tf",
    "multistart",
    "normalize",
    "partition_grid",
    "quality_metrics",
    "run_protocol",
    "simulate",
    "split_at",
    "step_metrics",
    "step_response",
    "__version__",
]
