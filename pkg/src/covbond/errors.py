"""Exception hierarchy shared by all modules."""


class CovBondError(Exception):
    """Base class for model errors (mapped to exit code 2 by the CLI)."""


class NoBracket(CovBondError, ValueError):
    """Function values at both bracket ends have the same sign."""


class NoConvergence(CovBondError, RuntimeError):
    """An iterative solver or quadrature failed to reach its tolerance.

    ``residual`` carries the best residual achieved, when one is known.
    """

    def __init__(self, message: str, residual=None):
        super().__init__(message)
        self.residual = residual


class InfeasibleMoments(CovBondError, ValueError):
    """Mean/variance targets outside the attainable range of a family."""


class Infeasible(CovBondError, ValueError):
    """Calibration targets that the model cannot reproduce.

    ``constraint`` names the violated bound, ``bounds`` optionally carries
    the feasibility diagnostics.
    """

    def __init__(self, message: str, constraint: str = "", bounds=None):
        super().__init__(message)
        self.constraint = constraint
        self.bounds = bounds


class NotEquivalent(CovBondError, ValueError):
    """Two-asset parameters have no one-asset representation."""
