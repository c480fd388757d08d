"""Exception hierarchy shared by every module of the package."""


class IsingTauError(Exception):
    """Base class for all errors raised by :mod:`ising_tau`."""


class InvalidInput(IsingTauError, ValueError):
    """Arguments violate a documented precondition."""


class NonPositiveArgument(InvalidInput):
    pass


class UnsupportedOrder(InvalidInput):
    pass


class ZeroArgument(InvalidInput):
    pass


class GammaPole(InvalidInput):
    pass


class SampleMismatch(InvalidInput):
    pass


class AtPuncture(InvalidInput):
    pass


class DegenerateConfiguration(InvalidInput):
    pass


class NotAntisymmetric(InvalidInput):
    pass


class OddDimension(InvalidInput):
    pass


class SeedTooSmall(InvalidInput):
    pass


class OutOfRange(InvalidInput):
    pass


class RegimeViolation(InvalidInput):
    pass


class ShapeMismatch(InvalidInput):
    pass


class Collision(InvalidInput):
    pass


class NumericalFailure(IsingTauError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance."""


class IllConditioned(NumericalFailure):
    pass


class QuadratureFailure(NumericalFailure):
    pass


class NoConvergence(NumericalFailure):
    pass


class SingularMatrix(NumericalFailure):
    pass


class InvariantViolation(NumericalFailure):
    """A structural identity of the coefficient matrices failed.

    ``name`` identifies the invariant and ``deviation`` is the measured
    violation.
    """

    def __init__(self, name, deviation, message=None):
        self.name = name
        self.deviation = float(deviation)
        super().__init__(message or f"invariant {name!r} violated by {deviation:.3e}")


class StepFailure(NumericalFailure):
    def __init__(self, message, location=None):
        self.location = location
        super().__init__(message)


class BlowUp(NumericalFailure):
    def __init__(self, message, location=None):
        self.location = location
        super().__init__(message)


class TailNotConverged(NumericalFailure):
    pass
