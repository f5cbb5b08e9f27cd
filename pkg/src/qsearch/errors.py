"""Exception taxonomy shared across the package.

All errors raised by qsearch derive from :class:`QSearchError`, so callers
can catch one base class at the CLI / service boundary. The subclasses map
onto distinct failure kinds rather than modules:

* bad parameters or limits            -> ConfigurationError
* data that violates an invariant     -> ValidationError
* a file that cannot be parsed        -> FormatError
* a reference to something missing    -> UnknownEntityError
* an operation in the wrong lifecycle -> StateError
"""

from __future__ import annotations


class QSearchError(Exception):
    """Base class for all qsearch errors."""


class ConfigurationError(QSearchError, ValueError):
    """A parameter is out of range or a configuration is self-inconsistent."""


class ValidationError(QSearchError, ValueError):
    """Input data violates a structural invariant."""


class FormatError(QSearchError, ValueError):
    """A file or payload could not be parsed; message carries field context."""


class UnknownEntityError(QSearchError, KeyError):
    """Lookup of an identity, question, facet, or session that does not exist."""

    def __str__(self) -> str:  # KeyError would repr() the message
        return self.args[0] if self.args else ""


class StateError(QSearchError, RuntimeError):
    """Operation not legal in the current state (e.g. answering a finished session)."""
