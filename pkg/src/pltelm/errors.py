"""Exception hierarchy shared by every module.

Each class carries an ``exit_code`` so the CLI can map failures to the
documented process status without a lookup table.
"""


class PltError(Exception):
    exit_code = 1


class ConfigError(PltError):
    exit_code = 2


class ScheduleError(ConfigError):
    pass


class SplitError(ConfigError):
    pass


class DataError(PltError):
    exit_code = 3


class DimensionError(DataError):
    pass


class EmptyChunkError(DataError):
    pass


class EmptyDatasetError(DataError):
    pass


class ParseError(DataError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UnknownClassError(DataError):
    pass


class DuplicateClassError(UnknownClassError):
    pass


class InsufficientDataError(DataError):
    pass


class NumericalError(PltError):
    exit_code = 4


class SingularError(NumericalError):
    pass


class NonFiniteError(NumericalError):
    pass
