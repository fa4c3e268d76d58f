"""Exception hierarchy.

Every error carries a short ``reason`` tag used by the CLI as the
machine-parsable prefix of its one-line error message.
"""


class QuiverDTError(Exception):
    reason = "error"


class DimensionMismatch(QuiverDTError, ValueError):
    reason = "dimension"


class ParseError(QuiverDTError, ValueError):
    reason = "parse"

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class NotStabilityParameter(QuiverDTError, ValueError):
    """theta(gamma) != 0."""

    reason = "not-stability"


class GenericityError(QuiverDTError, ValueError):
    """theta lies on a wall."""

    reason = "genericity"

    def __init__(self, message, normal=None):
        super().__init__(message)
        self.normal = normal


class NotAcyclic(QuiverDTError, ValueError):
    reason = "not-acyclic"


class MissingEntry(QuiverDTError, KeyError):
    reason = "missing-entry"

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class IntegralityError(QuiverDTError, ArithmeticError):
    """A DT invariant that must be an integer came out fractional."""

    reason = "integrality"


class DegenerateFlow(QuiverDTError, ArithmeticError):
    """Zero denominator or zero splitting time; retry with a new perturbation."""

    reason = "degenerate"


class PerturbationMismatch(QuiverDTError, ArithmeticError):
    """Different perturbation seeds gave different coefficients."""

    reason = "perturbation"


class InvalidTropicalType(QuiverDTError, ValueError):
    reason = "tropical-type"


class OracleError(QuiverDTError, ValueError):
    reason = "oracle"
