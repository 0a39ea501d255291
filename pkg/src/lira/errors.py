"""Exception hierarchy shared by every lira module."""


class LiraError(Exception):
    pass


class LiraSyntaxError(LiraError, ValueError):
    """Malformed expression or workspace text.

    ``line`` and ``col`` are 1-based when known.
    """

    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        loc = ""
        if line is not None:
            loc = f"line {line}"
            if col is not None:
                loc += f", col {col}"
            loc += ": "
        elif col is not None:
            loc = f"col {col}: "
        super().__init__(loc + message)
        self.message = message


class DomainError(LiraError, ValueError):
    pass


class RingMismatch(LiraError, ValueError):
    pass


class AlgebraMismatch(LiraError, ValueError):
    pass


class RankMismatch(LiraError, ValueError):
    pass


class DimensionMismatch(LiraError, ValueError):
    pass


class NotACocycle(LiraError):
    def __init__(self, message, triple=None, value=None):
        super().__init__(message)
        self.triple = triple
        self.value = value


class NotFlat(LiraError):
    pass


class NotFieldCase(LiraError):
    pass


class WrongCurvatureType(LiraError):
    pass


class SignMismatch(LiraError):
    pass


class ZeroElement(LiraError, ValueError):
    pass


class NotIdempotent(LiraError, ValueError):
    pass


class ValidationError(LiraError):
    def __init__(self, entity, reason, line=None):
        self.entity = entity
        self.reason = reason
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{entity}{where}: {reason}")
