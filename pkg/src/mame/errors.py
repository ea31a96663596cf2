"""Exception hierarchy shared across the package."""


class MameError(Exception):
    """Base class for all package errors."""


class ParseError(MameError):
    """Malformed input file (CSV dataset, side-info edge list)."""


class OracleError(MameError):
    """Black-box oracle returned unusable output."""


class OracleTransportError(OracleError):
    """Remote oracle could not be reached or answered out of protocol."""


class ConvergenceError(MameError):
    """An iterative solver hit its hard iteration cap."""
