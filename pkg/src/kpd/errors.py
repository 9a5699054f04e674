"""Exception taxonomy shared by all kpd modules.

Mathematical failures are never silently converted into PASS/positive
verdicts: anything that prevents a trustworthy answer raises one of the
diagnostic errors below instead.
"""


class KpdError(Exception):
    """Base class for all kpd-specific errors."""


class DomainError(KpdError, ValueError):
    """An input lies outside the mathematical domain of an operation
    (non-finite values, non-positive parameters, integer exponents where a
    fractional part is required, ...)."""


class PreconditionError(KpdError, ValueError):
    """A documented operation precondition does not hold (zero-sum
    constraint violated, vanishing moments missing, wrong coefficient
    sign, ...)."""


class SizeCapError(KpdError, ValueError):
    """A combinatorial or expansion size cap would be exceeded."""


class EigensolverError(KpdError, RuntimeError):
    """The symmetric eigensolver failed to converge.  Reported as a
    distinct diagnostic so it can never masquerade as a PASS verdict."""


class ToleranceError(KpdError, RuntimeError):
    """A numerical routine could not meet its requested tolerance or
    exhausted its iteration/precision budget.  Carries the best estimate
    achieved in the message."""
