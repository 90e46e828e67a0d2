"""Exception types shared across the package."""


class SetInfoError(Exception):
    """Base class for all package-specific failures."""


class DimensionError(SetInfoError):
    """Operands have incompatible dimensions."""


class UnboundedSupportError(SetInfoError):
    """A subgradient or witness was requested where the support is +inf."""


class SubgradientError(SetInfoError):
    """The argument lies outside the domain where a subgradient selection exists."""


class DominationError(SetInfoError):
    """A reference measure fails to dominate the experiment."""


class ConsistencyError(SetInfoError):
    """Two routes that must agree disagreed beyond tolerance."""


class SchemaError(SetInfoError):
    """A JSON payload does not match the published schema."""
