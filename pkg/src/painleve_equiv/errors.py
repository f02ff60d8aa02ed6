"""Exception hierarchy.

Every exception that can end up as a verdict carries a ``reason`` string; the
classifier copies it verbatim into ``Verdict.failure_reason`` and the CLI into
the ``reason`` field of its JSON records.
"""


class PainleveError(Exception):
    reason = "Error"


class ParseError(PainleveError):
    """Syntax error in an expression string; ``position`` is a 0-based offset."""

    reason = "ParseError"

    def __init__(self, message, position=None, text=None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


class UndeclaredIdentifier(ParseError):
    reason = "UndeclaredIdentifier"

    def __init__(self, name, position=None, text=None):
        self.name = name
        super().__init__(f"undeclared identifier {name!r}", position, text)


class DivisionByZero(PainleveError):
    """A denominator vanished identically.

    Raised by plain arithmetic, by substitution, and while solving normalization
    equations. The classifier treats it as a legitimate "not equivalent" verdict.
    """

    reason = "DivisionByZero"


class NonInvertible(PainleveError):
    """The element is a zero divisor of a (reducible) radical tower."""

    reason = "NonInvertible"


class DegenerateMap(PainleveError):
    reason = "DegenerateMap"


class BranchViolation(PainleveError):
    reason = "BranchViolation"


class NonTriangular(PainleveError):
    reason = "NonTriangular"


class ResidualFrameVariable(PainleveError, AssertionError):
    reason = "ResidualFrameVariable"


class UnsupportedConstraintSystem(PainleveError):
    reason = "UnsupportedConstraintSystem"

    def __init__(self, message, system=None):
        self.system = system
        super().__init__(message)


class MissingDerivations(PainleveError):
    reason = "MissingDerivations"


class DerivationTableError(PainleveError):
    reason = "DerivationTableError"


class UnknownDerivation(PainleveError):
    reason = "UnknownDerivation"
