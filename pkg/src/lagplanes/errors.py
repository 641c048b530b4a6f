"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`LagplanesError`, so callers (and the CLI) can map families of
failures onto exit codes without catching unrelated exceptions.
"""


class LagplanesError(Exception):
    """Base class for all package errors."""


# -- input validation -------------------------------------------------------

class InvalidMatrix(LagplanesError, ValueError):
    pass


class DimensionMismatch(LagplanesError, ValueError):
    pass


class WrongDimension(LagplanesError, ValueError):
    pass


class NotSkew(LagplanesError, ValueError):
    pass


class DegenerateOmega(LagplanesError, ValueError):
    pass


# -- degeneracy of the quadratic form / system ------------------------------

class DegenerateForm(LagplanesError, ValueError):
    pass


class DegenerateSystem(LagplanesError, ValueError):
    pass


class WrongSignature(LagplanesError, ValueError):
    """Quadratic form on R^4 is not of inertia (2, 2, 0).

    The offending inertia is kept on the exception so callers can report
    "no planes" instead of failing.
    """

    def __init__(self, inertia, message=None):
        self.inertia = inertia
        super().__init__(message or f"expected inertia (2, 2, 0), got {tuple(inertia)}")


class NotHamiltonian(LagplanesError, ValueError):
    pass


# -- numerical failures -----------------------------------------------------

class NoConvergence(LagplanesError, RuntimeError):
    def __init__(self, message, iterations=None):
        self.iterations = iterations
        super().__init__(message)


class TrigFormViolation(LagplanesError, RuntimeError):
    pass


# -- plane verification -----------------------------------------------------

class PlaneCheckFailed(LagplanesError, ValueError):
    """A plane failed one of the residual checks; ``residual`` is the value."""

    def __init__(self, message, residual):
        self.residual = residual
        super().__init__(f"{message} (residual {residual:.3e})")


class NotInNullCone(PlaneCheckFailed):
    pass


class NotLagrangian(PlaneCheckFailed):
    pass


class NotInvariant(PlaneCheckFailed):
    pass


# -- higher-dimensional decomposition ---------------------------------------

class DecompositionError(LagplanesError, ValueError):
    pass


class IllSeparated(DecompositionError):
    pass


class HypothesisViolated(DecompositionError):
    def __init__(self, message, block_dims=None):
        self.block_dims = block_dims
        super().__init__(message)


class SharedEigenvalues(DecompositionError):
    pass
