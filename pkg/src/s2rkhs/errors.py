"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ParameterError(ValueError):
    """A kernel parameter lies outside its family's admissible range."""


class KernelMismatchError(ValueError):
    """Two expansions built on different kernels were combined."""


class TruncationMismatchError(ValueError):
    """Coefficient vectors or spaces with incompatible truncations."""


class QuadratureConvergenceError(RuntimeError):
    """Successive quadrature refinements failed to agree."""


class RepairError(ValueError):
    """A candidate kernel cannot be repaired (empty or oversized exception set)."""


class SingularGramError(RuntimeError):
    """The (regularized) Gram system is numerically singular."""
