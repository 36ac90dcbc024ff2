"""Exception types raised by polyurn."""


class UrnError(Exception):
    """Base class for domain errors."""


class BalanceViolation(UrnError, ValueError):
    """Rows of the replacement matrix add different numbers of balls."""


class EmptyUrn(UrnError, ValueError):
    """The initial composition holds no balls."""


class ZeroGrowth(UrnError, ValueError):
    """No balls are added per draw (S = 0)."""


class RegimeMismatch(UrnError, ValueError):
    """Operation requested outside the regime where it is defined."""


class DegenerateUrn(UrnError, ValueError):
    """Hypothesis bc != 0 (or a nondegenerate start) fails."""


class GammaPole(UrnError, ArithmeticError):
    """A Gamma function argument is a nonpositive integer."""


class OverflowHorizon(UrnError, OverflowError):
    """tau + N*S would not fit in a signed 64-bit count."""


class TooLarge(UrnError, ValueError):
    """Exhaustive enumeration requested beyond its supported size."""


class DegenerateProxy(UrnError, ValueError):
    """Finite horizon too short to stand in for the limit."""
