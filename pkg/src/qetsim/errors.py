"""Exception types shared across the package."""


class QetError(Exception):
    """Base class for all simulator errors."""


class InvalidParams(QetError, ValueError):
    """System or reservoir parameters violate a domain guard."""


class InvalidState(QetError, ValueError):
    """Operator is not an admissible density matrix."""


class InvalidOutcome(QetError, ValueError):
    """Measurement outcome label outside {+1, -1}."""


class InvalidIndex(QetError, IndexError):
    """Eigenstate index outside 1..4."""


class DimensionMismatch(QetError, ValueError):
    """Matrix dimensions do not match the expected shape."""


class NonHermitianInput(QetError, ValueError):
    """Matrix expected to be Hermitian is not, beyond tolerance."""


class NonPositiveFrequency(QetError, ValueError):
    """Occupation requested at a non-positive transition frequency."""


class NoKernel(QetError):
    """Matrix has no numerical null space."""


class DegenerateKernel(QetError):
    """Null space is (numerically) more than one-dimensional."""


class ZeroTraceKernel(QetError):
    """Kernel vector unstacks to a traceless operator; cannot normalize."""


class NotConverged(QetError):
    """Propagation hit the time horizon above the derivative tolerance."""


class NotXForm(QetError):
    """Steady state has entries outside the expected X pattern."""


class PositivityViolation(QetError):
    """Steady-state eigenvalue below the accepted negativity slack."""


class UnknownPreset(QetError, KeyError):
    """No figure preset registered under the requested id."""


class EmptySweep(QetError):
    """Every grid point of a sweep was skipped."""


class ConfigError(QetError, ValueError):
    """Run configuration is malformed."""
