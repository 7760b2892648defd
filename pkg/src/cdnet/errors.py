"""Exception types shared across the package."""


class CdnError(Exception):
    """Base class for all cdnet errors."""


class DuplicateName(CdnError):
    pass


class UnknownVariable(CdnError):
    pass


class ArityMismatch(CdnError):
    pass


class DomainError(CdnError):
    pass


class UnsupportedReduction(CdnError):
    pass


class NotATree(CdnError):
    pass


class EmptyGraph(CdnError):
    pass


class ScheduleError(CdnError):
    pass


class DegreeTooLarge(CdnError):
    pass


class ZeroEvidenceDensity(CdnError):
    pass


class InvalidQuery(CdnError):
    pass


class SubsetTooLarge(CdnError):
    pass


class ParseError(CdnError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        loc = "" if line is None else f" (line {line}" + ("" if column is None else f", col {column}") + ")"
        super().__init__(message + loc)


class InvalidMatch(CdnError):
    pass


class UnknownPlayer(CdnError):
    pass


class TeamTooLarge(CdnError):
    pass


class InvalidParams(CdnError):
    pass


class InsufficientData(CdnError):
    pass
