"""Exception hierarchy shared by all qtmlab modules."""


class QTMError(Exception):
    """Base class for every error raised by qtmlab."""


class ProtocolViolation(QTMError):
    """A configuration or (state, symbol) pair lies outside every transition domain."""


class CompletenessError(QTMError):
    """A machine lacks a main transition row for some (state, symbol) pair."""


class StructureError(QTMError):
    """A machine definition breaks a structural invariant (states, signatures)."""


class ValidationError(QTMError):
    """A machine failed the numerical unitarity check.

    The offending report is attached as ``report``.
    """

    def __init__(self, message, report):
        super().__init__(message)
        self.report = report


class InputError(QTMError, ValueError):
    """Bad user-supplied data: non-unit norms, duplicate terms, zero vectors."""


class ParseError(QTMError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        parts = []
        if line is not None:
            parts.append(f"line {line}")
        if column is not None:
            parts.append(f"column {column}")
        where = ", ".join(parts) + ": " if parts else ""
        super().__init__(where + message)
        self.message = message


class ResourceError(QTMError):
    """An exploration would exceed its configured branch cap."""
