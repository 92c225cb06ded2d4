"""Exception types shared across the toolkit.

Every error raised on bad input or a failed numeric contract derives from
ToolkitError so callers can catch the whole family; the CLI maps them to
exit codes (usage/validation errors -> 2, I/O -> 3).
"""

from __future__ import annotations


class ToolkitError(ValueError):
    """Base class for all toolkit errors."""


class DimensionError(ToolkitError):
    """Matrix or vector shape is wrong (non-square, mismatched sizes, empty)."""


class NumericError(ToolkitError):
    """Non-finite entries, or an input outside a numeric tolerance contract."""


class InputError(ToolkitError):
    """Malformed value: bad permutation images, bad group spec, bad file body."""


class IllConditionedMetricError(ToolkitError):
    """The metric matrix of a generalized eigenproblem is singular at tolerance."""


class UndefinedResidualError(ToolkitError):
    """A normalized residual is requested for a zero matrix."""


class StructuralMismatchError(ToolkitError):
    """A predicted column's Rayleigh quotient falls in a spectral gap."""


class DegeneracyMismatchError(ToolkitError):
    """Cluster cardinalities of prediction and spectrum disagree."""


class NotMultiplicityFreeError(ToolkitError):
    """The probed action has a non-commutative commutant."""


class DegenerateSampleError(ToolkitError):
    """Sampled covariances kept producing accidental eigenvalue merges."""


class UnsupportedGroupError(ToolkitError):
    """The requested construction only covers a fixed catalog of actions."""


class BasisError(ToolkitError):
    """A candidate basis is empty, mismatched in shape, or numerically dependent."""


class SearchExhausted(Exception):
    """Signal: deflation has consumed the whole search space (not an error)."""
