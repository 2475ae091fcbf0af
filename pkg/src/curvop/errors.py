"""Exception hierarchy shared by all curvop modules."""


class CurvopError(Exception):
    """Base class for every error raised by curvop."""


# jets
class DivisionByZeroJet(CurvopError, ZeroDivisionError):
    pass


class DomainErrorJet(CurvopError, ValueError):
    pass


class JetOrderError(CurvopError, ValueError):
    """A derivative was requested beyond the truncation order a jet still carries."""


# surface DSL
class SurfaceSyntaxError(CurvopError, SyntaxError):
    """Malformed surface source.

    Carries the 1-based ``line``/``column`` of the offending token and the set
    of tokens that would have been accepted there.
    """

    def __init__(self, message, line, column, expected=(), source=None):
        self.line = line
        self.column = column
        self.expected = tuple(sorted(set(expected)))
        self.source = source
        detail = message
        if self.expected:
            detail += " (expected one of: " + ", ".join(self.expected) + ")"
        super().__init__(f"line {line}, column {column}: {detail}")
        self.detail = detail

    def caret(self):
        """Return the offending source line with a caret under the column."""
        if self.source is None:
            return ""
        lines = self.source.splitlines() or [""]
        text = lines[self.line - 1] if 0 < self.line <= len(lines) else ""
        return text + "\n" + " " * (self.column - 1) + "^"


class UnknownIdentifier(CurvopError, NameError):
    pass


class BadDomain(CurvopError, ValueError):
    pass


class UnknownParameter(CurvopError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class UnknownSurface(CurvopError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


# geometry
class DegenerateMetric(CurvopError, ValueError):
    """det g is (numerically) zero; ``points`` lists the offending (u, v)."""

    def __init__(self, message, points=()):
        super().__init__(message)
        self.points = list(points)


class InvalidOffset(CurvopError, ValueError):
    pass


class SingularJacobian(CurvopError, ValueError):
    pass


# operators
class DegreeOverflow(CurvopError, ValueError):
    pass


class NonOrthogonalChart(CurvopError, ValueError):
    pass


class ShapeMismatch(CurvopError, ValueError):
    pass


# oracle / spectral
class OutOfDomain(CurvopError, ValueError):
    pass


class NotAxisymmetric(CurvopError, ValueError):
    pass


class UnsupportedChart(CurvopError, ValueError):
    pass


class ConvergenceFailure(CurvopError, RuntimeError):
    pass
