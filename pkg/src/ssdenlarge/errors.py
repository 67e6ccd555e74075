"""Exception hierarchy used across the package."""


class SsdError(Exception):
    """Base class for all package errors."""


class InputError(SsdError, ValueError):
    """Malformed input: wrong dimensions, asymmetric Gram matrix, empty set."""


class SolverError(SsdError, RuntimeError):
    """The LP solver hit its pivot cap or lost numerical consistency."""


class UnsupportedVariantError(SsdError, NotImplementedError):
    """The requested operation has no exact implementation for this variant."""


class ContractError(SsdError):
    """A precondition on mathematical content failed (e.g. h is not in H(A))."""


class ConfigError(SsdError):
    """Harness configuration could not be resolved."""
