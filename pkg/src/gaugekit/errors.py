"""Exception types raised across gaugekit."""


class GaugeKitError(Exception):
    """Base class for all library errors."""


class NumericDomainError(GaugeKitError, ValueError):
    """Non-finite input, singular matrix or degenerate metric."""


class BranchError(GaugeKitError, ValueError):
    """Group element outside the principal branch of the logarithm."""


class DomainError(GaugeKitError, ValueError):
    """Point outside a chart domain or too close to its boundary."""


class PreconditionError(GaugeKitError, ValueError):
    """Input violates a documented precondition."""


class CoverError(GaugeKitError):
    """Cocycle or cover data is inconsistent on a declared overlap."""


class CatalogError(GaugeKitError, KeyError):
    """Unknown catalog name (metric, connection, loop or scenario task)."""
