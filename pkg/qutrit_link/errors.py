"""Exception hierarchy shared by the simulation modules and the CLI."""


class LinkError(Exception):
    """Base class for every error raised by qutrit_link."""


class ParameterError(LinkError, ValueError):
    pass


class ConfigError(LinkError):
    def __init__(self, message: str, *, key: str | None = None, line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.key = key
        self.line = line
        self.column = column


class WavepacketError(LinkError):
    pass


class SolverError(LinkError):
    pass


class OracleIntegrationError(LinkError):
    pass


class ConfigurationMismatchError(LinkError):
    pass


class DetectionError(LinkError, ValueError):
    pass


class ClosedFormUnavailableError(LinkError):
    pass


class NormalizationError(LinkError, ValueError):
    pass


class ExportError(LinkError):
    pass


__all__ = [
    "LinkError",
    "ParameterError",
    "ConfigError",
    "WavepacketError",
    "SolverError",
    "OracleIntegrationError",
    "ConfigurationMismatchError",
    "DetectionError",
    "ClosedFormUnavailableError",
    "NormalizationError",
    "ExportError",
]
