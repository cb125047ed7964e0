"""Exception and warning types raised by the toolkit.

``DataError`` subclasses describe bad or malformed inputs (CLI exit code 2);
``ComputationError`` subclasses describe analyses that ran but could not
produce a trustworthy answer (CLI exit code 3).
"""


class KitwpaError(Exception):
    """Base class for every toolkit error."""


class DataError(KitwpaError, ValueError):
    """Input data or configuration is invalid."""


class ComputationError(KitwpaError, RuntimeError):
    """A numerical procedure failed or its preconditions do not hold."""


# film
class NoPlateau(ComputationError):
    pass


class NoCrossing(ComputationError):
    pass


class NonPositiveTc(DataError):
    pass


class NegativeResult(ComputationError):
    pass


class IncomparableMethods(ComputationError):
    pass


# resonator
class NoResonance(ComputationError):
    pass


class FitDiverged(ComputationError):
    pass


class NonPositiveBeta(DataError):
    pass


class NonlinearityUndetectable(ComputationError):
    pass


class NegativeLk(ComputationError):
    pass


class NonPositiveIStar(DataError):
    pass


# tline
class EmptyGrid(DataError):
    pass


class OutOfRange(DataError):
    """Frequency grid reaches beyond the validity range of the lumped model."""


class DesignInfeasible(ComputationError):
    pass


# mixing
class SingularChi(DataError):
    pass


class FrequencyInStopband(ComputationError):
    pass


StopbandTone = FrequencyInStopband


class NoStopbandInBand(ComputationError):
    pass


class StepFailure(ComputationError):
    pass


class BudgetExceeded(ComputationError):
    pass


class NotSteady(ComputationError):
    pass


class KitwpaWarning(UserWarning):
    """Base class for recoverable conditions reported alongside a result."""


class NonMonotonicBracket(KitwpaWarning):
    pass


class NoSignChange(KitwpaWarning):
    pass


class NonMonotonicShift(KitwpaWarning):
    pass
