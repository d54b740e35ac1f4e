"""Exception types shared across the library."""


class NetdemixError(Exception):
    """Base class for all library errors."""


class InvalidSpecError(NetdemixError, ValueError):
    """A generator or model spec fails its own invariants."""


class InvalidArgumentError(NetdemixError, ValueError):
    """An operation was called with arguments outside its contract."""


class DimensionError(NetdemixError, ValueError):
    """Array shapes are inconsistent with the operation's contract."""


class DomainError(NetdemixError, ValueError):
    """A numeric argument is outside the operation's domain (e.g. sigma <= 0)."""


class DegenerateProjectionError(NetdemixError, ValueError):
    """A pooling projection vector has zero norm."""


class MissingGradientError(NetdemixError, RuntimeError):
    """An optimizer step was requested before gradients were populated."""


class CapabilityError(NetdemixError, RuntimeError):
    """A model was asked to handle inputs it structurally cannot (e.g. an
    MLP built for one graph size applied to another)."""


class ConfigError(NetdemixError, ValueError):
    """A config document contains unknown keys or inconsistent values."""


class ParseError(NetdemixError, ValueError):
    """A record stream or file could not be parsed.

    ``line`` is the 1-based line number of the offending record when known.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class IngestionError(NetdemixError, ValueError):
    """Contact records are individually well-formed but mutually inconsistent."""
