"""Exception hierarchy shared by every trifid module."""


class TrifidError(ValueError):
    """Base class for all domain errors raised by trifid."""


# numeric core
class NotHermitian(TrifidError):
    pass


class NoConvergence(TrifidError, ArithmeticError):
    pass


class NotPSD(TrifidError):
    pass


class DimensionMismatch(TrifidError):
    pass


SizeMismatch = DimensionMismatch


class NotUnitary(TrifidError):
    pass


# states
class InvalidState(TrifidError):
    """A measure, vector or matrix failed its validation checks."""


class OutsideBall(InvalidState):
    pass


class WrongDimension(TrifidError):
    pass


class OutOfRange(TrifidError):
    pass


# triples
class NotAdmissible(TrifidError):
    pass


class OrderViolation(TrifidError):
    pass


# phase
class ZeroFidelity(TrifidError):
    def __init__(self, message, triple=None):
        super().__init__(message)
        self.triple = triple


class AntipodalPair(TrifidError):
    pass


class DegenerateSpectrum(TrifidError):
    pass


class RankDeficient(TrifidError):
    pass


class OptimizerFailed(TrifidError):
    pass


# reconstruction
class GenericityViolation(TrifidError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class InconsistentData(TrifidError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index
