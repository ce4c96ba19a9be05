"""Exception types shared across the package.

The CLI maps these onto process exit codes: ConfigError -> 2,
SchemaError / IntegrityError -> 3, NumericalFailure -> 4.
"""


class MtqoError(Exception):
    pass


class ConfigError(MtqoError, ValueError):
    """Invalid argument or configuration value."""


class SchemaError(MtqoError):
    """A persisted file is malformed (bad JSON, missing or mistyped keys)."""


class IntegrityError(MtqoError):
    """A persisted file parses but violates an internal consistency rule."""


class NumericalFailure(MtqoError):
    """A cost or gradient evaluation produced a non-finite value."""

    def __init__(self, message, theta=None, iteration=None):
        super().__init__(message)
        self.theta = theta
        self.iteration = iteration
