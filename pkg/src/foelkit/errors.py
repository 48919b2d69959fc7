"""Exception types raised across foelkit."""


class FoelError(Exception):
    """Base class for all foelkit errors."""


class InvalidChain(FoelError, ValueError):
    pass


class NotAdmissible(FoelError, ValueError):
    def __init__(self, S, chain=None):
        self.S = S
        self.chain = chain
        super().__init__(f"total spin {S} is not admissible for this chain")


class DimensionTooLarge(FoelError):
    def __init__(self, dim, limit):
        self.dim = dim
        self.limit = limit
        super().__init__(f"Hilbert dimension {dim} exceeds the dense limit {limit}")


class InconsistentDiagram(FoelError, ValueError):
    pass


class InvalidStep(FoelError, ValueError):
    pass


class InvalidExtension(FoelError, ValueError):
    pass


class UnsupportedSpin(FoelError, ValueError):
    pass


class DimensionMismatch(FoelError, ValueError):
    pass


class NoConvergence(FoelError, RuntimeError):
    def __init__(self, iterations, residual):
        self.iterations = iterations
        self.residual = residual
        super().__init__(
            f"power iteration did not converge after {iterations} steps "
            f"(residual {residual:.3e})"
        )
