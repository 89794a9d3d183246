class FtnmError(Exception):
    """Base class for errors raised by ftnm operations"""


class MalformedOperatorError(FtnmError, ValueError):
    """Operator is empty, non-square, too large or has the wrong shape"""


class DomainError(FtnmError, ValueError):
    """Argument lies outside the range where a formula is claimed"""


class NoConvergenceError(FtnmError):
    """Recursion does not reach the requested target"""


class ScheduleError(FtnmError, ValueError):
    """Faulty location has no phase assigned"""


class SamplingError(FtnmError):
    """Rejection sampler gave up"""
