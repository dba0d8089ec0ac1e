"""Exception hierarchy shared by all modules."""


class NoebelingError(Exception):
    """Base class for every error raised by this package."""


class InvalidGenerator(NoebelingError):
    pass


class InvalidVertex(NoebelingError):
    pass


class InvalidSimplex(NoebelingError):
    pass


class InvalidParameter(NoebelingError):
    pass


class InvalidStage(NoebelingError):
    pass


class BudgetExceeded(NoebelingError):
    def __init__(self, estimate, budget):
        super().__init__(f"estimated {estimate} simplices exceeds budget {budget}")
        self.estimate = estimate
        self.budget = budget


class NotQuasiSimplicial(NoebelingError):
    def __init__(self, simplex, message=None):
        super().__init__(message or f"image of {sorted(map(str, simplex))} is not a chain")
        self.simplex = simplex


class RefinementFailure(NoebelingError):
    pass


class PreconditionFailed(NoebelingError):
    def __init__(self, index, message=None):
        super().__init__(message or f"precondition fails at step {index}")
        self.index = index


class InsufficientCopies(NoebelingError):
    pass


class NotCommuting(NoebelingError):
    pass


class DimensionTooHigh(NoebelingError):
    pass


class FiberMismatch(NoebelingError):
    pass


class CarrierViolation(NoebelingError):
    pass


class MultiplicityTooHigh(NoebelingError):
    pass


class SubdivisionBudgetExceeded(NoebelingError):
    pass


class DigestMismatch(NoebelingError):
    pass


class UnsupportedDimension(NoebelingError):
    pass
