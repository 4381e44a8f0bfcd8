"""Exception hierarchy.

Every failure the library can detect carries the data needed to diagnose it
(the offending index, point, ratio or residual), so that callers and the CLI
can report it without re-running the computation.
"""


class ChebBernsteinError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ChebBernsteinError, ValueError):
    pass


class HaarViolation(ChebBernsteinError):
    def __init__(self, point, reason):
        self.point = point
        self.reason = reason
        super().__init__(f"Haar condition fails at x={point!r}: {reason}")


class DegenerateSpace(ChebBernsteinError):
    def __init__(self, k, rank=None):
        self.k = k
        self.rank = rank
        super().__init__(f"constraint system for p_{{n,{k}}} has rank {rank}; "
                         "null space is not one-dimensional")


class NotECT(ChebBernsteinError):
    def __init__(self, k, x, reason=""):
        self.k = k
        self.x = x
        super().__init__(f"basis function {k} fails the ECT checks at x={x!r}"
                         + (f": {reason}" if reason else ""))


class NotNested(ChebBernsteinError):
    def __init__(self, residual):
        self.residual = residual
        super().__init__(f"lower space is not contained in upper space "
                         f"(least-squares residual {residual:.3e})")


class NonPositiveElevation(ChebBernsteinError):
    def __init__(self, k, pair):
        self.k = k
        self.pair = pair
        super().__init__(f"elevation pair {k} is not positive: {pair}")


class NotInSpan(ChebBernsteinError):
    def __init__(self, residual):
        self.residual = residual
        super().__init__(f"function is not in the span of the basis "
                         f"(grid residual {residual:.3e})")


class RatioOutOfRange(ChebBernsteinError):
    def __init__(self, r, low=None, high=None):
        self.r = r
        self.low = low
        self.high = high
        super().__init__(f"ratio {r!r} lies outside f1/f0([a,b]) = [{low!r}, {high!r}]")


class Nonexistence(ChebBernsteinError):
    """No Bernstein operator fixing the pair exists in the space."""

    def __init__(self, k, ratio, reason=""):
        self.k = k
        self.ratio = ratio
        super().__init__(f"no Bernstein operator: index {k}, ratio {ratio!r}"
                         + (f" ({reason})" if reason else ""))


class FixingResidual(ChebBernsteinError):
    def __init__(self, which, residual):
        self.which = which
        self.residual = residual
        super().__init__(f"operator does not fix {which}: residual {residual:.3e}")


class InterlacingViolation(ChebBernsteinError):
    def __init__(self, level, k):
        self.level = level
        self.k = k
        super().__init__(f"nodes at level {level} do not strictly interlace at index {k}")


class MismatchedLevels(ChebBernsteinError, ValueError):
    pass


class HypothesisViolation(ChebBernsteinError):
    pass


class NonPositiveG(ChebBernsteinError):
    def __init__(self, point):
        self.point = point
        super().__init__(f"g is not positive at x={point!r}")


class SingularSystem(ChebBernsteinError):
    pass


class ConfigError(ChebBernsteinError, ValueError):
    pass
