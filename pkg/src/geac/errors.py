"""Exception hierarchy shared by every module of the package."""


class GeacError(Exception):
    """Base class for all package errors."""


class ModelError(GeacError, ValueError):
    """Oscillator coefficients violate a model invariant."""


class ConstantTermError(ModelError):
    """Restoring polynomial is not centred on its stable equilibrium."""


class NoSepError(ModelError):
    """SMIB parameters admit no stable equilibrium (Pm >= Pmax)."""


class RootFindingFailure(GeacError):
    pass


class DegenerateEquilibrium(GeacError):
    """Equilibrium slope is within tolerance of zero (saddle-node boundary)."""


class NumericalError(GeacError):
    """Base for failures of the numerical machinery (CLI exit code 3)."""


class StepSizeUnderflow(NumericalError):
    pass


class InvalidOptions(GeacError, ValueError):
    pass


class OutOfSpan(GeacError, ValueError):
    pass


class UnresolvedSwing(GeacError):
    """Swing has no closing event (integration stopped mid-swing)."""


class ZeroAccArea(GeacError):
    pass


class NonMonotoneTime(GeacError, ValueError):
    pass


class ModelMissing(GeacError):
    pass


class DomainError(GeacError, ValueError):
    pass


class NoCriticalAngle(GeacError):
    pass


class SameVerdictAtEndpoints(GeacError):
    pass


class ParseError(GeacError):
    """Scenario or report file is not parseable; carries line diagnostics."""

    def __init__(self, message, path=None, line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
                if column is not None:
                    where += f":{column}"
            where += ": "
        super().__init__(where + message)


class ScenarioValidationError(GeacError, ValueError):
    """Scenario content parses but violates the schema or a model invariant."""


class IoError(GeacError, OSError):
    """Report or plot file could not be written."""
