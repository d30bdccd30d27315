"""Exception taxonomy shared across the package.

Two broad families matter for scripting: configuration problems (bad
parameter values, infeasible setups) and data problems (malformed or
degenerate inputs).  The CLI maps them to exit codes 2 and 3.
"""


class ImixError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(ImixError):
    """A parameter or configuration value is invalid or infeasible."""


class DataError(ImixError):
    """Input data is malformed, out of range, or otherwise unusable."""


class DimensionError(DataError):
    """Grid shapes or class counts do not line up."""


class DegenerateInputError(DataError):
    """Input is technically well-formed but empty or trivial."""
