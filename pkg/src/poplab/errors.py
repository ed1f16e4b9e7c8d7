"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: validation/config/parse errors exit 2,
numeric and other runtime failures exit 3, I/O failures exit 4.
"""


class PoplabError(Exception):
    """Base class for all package errors."""


class ValidationError(PoplabError):
    """Invalid argument, parameter, or data contract violation."""


class ConfigError(ValidationError):
    """Scenario configuration is malformed or contains unknown keys."""


class ParseError(ValidationError):
    """A data file could not be parsed. Carries the offending row number."""

    def __init__(self, message, row=None, path=None):
        self.row = row
        self.path = path
        loc = ""
        if path is not None:
            loc += f" in {path}"
        if row is not None:
            loc += f" at row {row}"
        super().__init__(message + loc)


class CapabilityError(PoplabError):
    """Requested classifier/cost pairing has no closed-form responder."""


class SamplingError(PoplabError):
    """Rejection sampling exhausted its attempt budget."""


class ContractError(PoplabError):
    """A caller-supplied callable violated its contract."""


class NumericError(PoplabError):
    """Non-finite values or numerical breakdown during optimization."""
