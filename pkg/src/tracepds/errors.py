"""Exception hierarchy shared by the library and the command line."""


class TracePdsError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 3


class InputError(TracePdsError, ValueError):
    """Malformed input: unknown letters, parse errors, mismatched operands."""

    exit_code = 2

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class PreconditionError(TracePdsError):
    """An operation was called on a value that lacks a required property."""

    exit_code = 2

    def __init__(self, message, flag=None, witness=None):
        super().__init__(message)
        self.flag = flag
        self.witness = witness


class DiagnosticFailure(TracePdsError):
    """A construction gave up (cap exhausted, fixpoint did not settle).

    Never raised in place of a wrong answer; the caller gets no result.
    """

    exit_code = 3
