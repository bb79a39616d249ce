"""Exception types shared across the package."""

from __future__ import annotations


class QuasigenError(Exception):
    """Base class for all package errors."""


class NonMonotoneQuotients(QuasigenError):
    pass


class SupAtTableEdge(QuasigenError):
    """The maximizing index sits at the end of the stored table."""


class RSequenceInvalid(QuasigenError):
    pass


class BandExceedsGrid(QuasigenError):
    pass


class BandOverflow(QuasigenError):
    pass


class GridMismatch(QuasigenError):
    pass


class OrderTooHigh(QuasigenError):
    pass


class EmptyRegion(QuasigenError):
    pass


class GeometryInfeasible(QuasigenError):
    pass


class FitFailed(QuasigenError):
    pass


class TruncationDominates(QuasigenError):
    """The seminorm maximum is attained at the truncation order."""


class InsufficientRange(QuasigenError):
    pass


class TailBoundViolated(QuasigenError):
    pass


class DegenerateGeometry(QuasigenError):
    pass


class SeminormInfinite(QuasigenError):
    pass


class SupportOutsideGrid(QuasigenError):
    pass


class ResolutionTooFine(QuasigenError):
    pass


class CutoffGeometry(QuasigenError):
    pass


class CertificateMissing(QuasigenError):
    pass
