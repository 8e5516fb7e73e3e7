"""Exception types shared across the pipeline.

Plain I/O failures are raised as the built-in ``OSError``; everything
domain-specific derives from :class:`FlowarError` so callers can catch
pipeline errors in one clause.
"""

from __future__ import annotations


class FlowarError(Exception):
    """Base class for all domain errors."""


class MissingFile(FlowarError, FileNotFoundError):
    """A required dataset file does not exist."""


class MalformedRow(FlowarError, ValueError):
    """A data file row (or document) could not be parsed."""

    def __init__(self, source: str, row: int, reason: str):
        super().__init__(f"{source}, row {row}: {reason}")
        self.source = source
        self.row = row
        self.reason = reason


class InvariantViolation(FlowarError, ValueError):
    """A dataset violates a structural invariant.

    Carries the full validation report in ``report``.
    """

    def __init__(self, report):
        lines = "; ".join(v.message for v in report.violations[:5])
        more = len(report.violations) - 5
        if more > 0:
            lines += f" (+{more} more)"
        super().__init__(lines)
        self.report = report


class EmptyFile(FlowarError, ValueError):
    """An input file contains no rows at all."""


class NoValidRows(FlowarError, ValueError):
    """Every row of an input file was rejected."""


class UnknownSensorInScope(FlowarError, KeyError):
    """A cleaning rule references a sensor that is not in the catalog."""


class UnknownSensorInMask(FlowarError, KeyError):
    """A feature mask references a sensor that is not in the catalog."""


class EmptyInstances(FlowarError, ValueError):
    """An instance list that must be non-empty is empty."""


class EmptyCounts(FlowarError, ValueError):
    """A class-count map with zero total."""


class EmptyTrainingSet(FlowarError, ValueError):
    """fit() called with no instances."""


class InconsistentFeatureLength(FlowarError, ValueError):
    """Training instances disagree on feature-vector length."""


class FeatureLengthMismatch(FlowarError, ValueError):
    """A feature vector does not match the model's expected length."""


class NoEvents(FlowarError, ValueError):
    """Segmentation requires at least one sensor event."""


class LengthMismatch(FlowarError, ValueError):
    """Paired sequences have different lengths."""


class EmptyInput(FlowarError, ValueError):
    """An input sequence that must be non-empty is empty."""


class EmptySegments(FlowarError, ValueError):
    """Timeline construction requires at least one segment."""


class SpanMismatch(FlowarError, ValueError):
    """Ground truth and predicted timeline do not share a time base."""


class InsufficientDays(FlowarError, ValueError):
    """Cross-validation needs at least two instance-bearing days."""


class DatasetNotFound(FlowarError, KeyError):
    """No dataset with the requested id in the data root."""


class RunNotFound(FlowarError, KeyError):
    """No run with the requested id in the runs root."""


class CorruptRunFile(FlowarError, ValueError):
    """A persisted run file failed to parse."""


class IncomparableRuns(FlowarError, ValueError):
    """compare_runs() called on runs over different datasets."""
