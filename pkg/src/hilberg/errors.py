"""Exception types shared across the package.

The CLI maps :class:`ParameterError` to exit code 2 and
:class:`ResourceError` to exit code 3.
"""


class ParameterError(ValueError):
    """An argument lies outside the domain of an operation."""


class ResourceError(RuntimeError):
    """The request is valid but too large to evaluate as asked."""


class ImpossibleEventError(ParameterError):
    """A symbol sequence has probability zero under the process."""
