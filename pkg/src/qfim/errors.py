"""Exceptions and warnings raised by qfim."""

import numpy as np


class QfimError(Exception):
    """Base class for qfim errors."""


class DimensionError(QfimError, ValueError):
    pass


class PartitionError(QfimError, ValueError):
    pass


class NotHermitian(QfimError, ValueError):
    pass


class PreconditionError(QfimError, ValueError):
    pass


class SingularMatrix(QfimError, np.linalg.LinAlgError):
    """Matrix is singular to working tolerance.

    Attributes
    ----------
    cond : float
        1-norm condition number estimate (``inf`` when exactly singular).
    """

    def __init__(self, message, cond):
        super().__init__(f"{message} (1-norm condition estimate {cond:.3e})")
        self.cond = cond


class RankDeficient(QfimError):
    """Basis kets are linearly dependent to tolerance.

    This is what happens at a critical point of a parameterized basis, e.g.
    when two sources coincide.  The basis has to be reduced by the caller.

    Attributes
    ----------
    indices : tuple of int
        Kets taking part in the (near) linear dependence.
    sigma : float
        Smallest relative singular value found.
    """

    def __init__(self, indices, sigma, message=None):
        self.indices = tuple(int(i) for i in indices)
        self.sigma = float(sigma)
        if message is None:
            message = "basis kets are linearly dependent"
        super().__init__(f"{message}: indices {list(self.indices)}, smallest relative singular value {self.sigma:.3e}")


class ParaxialWarning(UserWarning):
    """Scene coordinates are not small compared with the source distance."""


class CriticalPointWarning(UserWarning):
    """A closed-form expression is evaluated at a removable singularity."""


class ExtrapolationWarning(UserWarning):
    """Richardson extrapolation did not settle within tolerance."""
