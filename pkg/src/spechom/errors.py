"""Exception hierarchy shared across the package.

Every error carries a short machine-readable ``category`` string so that
callers (the command line driver in particular) can map failures onto
stable exit codes without parsing messages.
"""

from __future__ import annotations


class SpechomError(Exception):
    """Base class for all package-specific failures."""

    category = "internal"


class ConfigError(SpechomError):
    """Malformed, incomplete, or contradictory experiment configuration."""

    category = "invalid-config"


class InvalidCutoffError(SpechomError):
    """Requested coarse cutoff outside the representable band."""

    category = "invalid-cutoff"


class DimensionMismatchError(SpechomError):
    """Operands built for different grids or with incompatible shapes."""

    category = "dimension-mismatch"


class DegenerateCoefficientError(SpechomError):
    """A coefficient field that must be positive has lost positivity."""

    category = "degenerate-coefficient"


class IllConditionedError(SpechomError):
    """A linear system too close to singular to solve reliably."""

    category = "ill-conditioned"


class UndefinedRatioError(SpechomError):
    """A normalized quantity whose denominator is zero."""

    category = "undefined-ratio"


class BlockSizeLimitError(SpechomError):
    """A dense block larger than the configured memory guard allows."""

    category = "memory-guard"
