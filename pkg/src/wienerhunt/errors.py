"""Exception types shared across the package."""


class WienerHuntError(Exception):
    """Base class for all package errors."""


class SymmetryViolation(WienerHuntError, ValueError):
    """A spectral field expected to come from a real image is not Hermitian."""


class StencilTooLarge(WienerHuntError, ValueError):
    pass


class ShapeMismatch(WienerHuntError, ValueError):
    pass


class DomainError(WienerHuntError, ValueError):
    """Argument outside the support of a density or sampler."""


class NonDifferentialOperator(WienerHuntError, ValueError):
    """The stencil does not annihilate constants (its null-frequency gain is not 0)."""


class SingularPrior(WienerHuntError, ValueError):
    pass


class SingularCovariance(WienerHuntError, ArithmeticError):
    """The image conditional law has a zero precision at some frequency.

    Happens when the null frequency is unobserved and its prior precision is 0.
    """


class DegenerateUpdate(WienerHuntError, ArithmeticError):
    """A conjugate update produced an infinite scale (zero residual, improper prior)."""


class TooLarge(WienerHuntError, ValueError):
    """Dense reference computations are limited to small images."""


class SingularMatrix(WienerHuntError, ArithmeticError):
    pass


class ZeroReference(WienerHuntError, ValueError):
    pass


class EmptyChain(WienerHuntError, ValueError):
    pass


class ConfigError(WienerHuntError, ValueError):
    pass


class NonConvergence(RuntimeWarning):
    """Emitted (not raised) when a chain stops at ``max_iters`` before converging."""
