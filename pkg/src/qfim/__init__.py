"""Quantum Fisher information matrices in non-orthogonal bases.

Typical use::

    from qfim import imaging, qfim
    report = qfim(imaging.build_state_model(scene))
    report.H, report.Gamma
"""

from .basis import BasisSet, build_basis, extend_basis
from .core import ParameterSlot, QfimReport, StateModel, compatibility, qfi_single, qfim, qfim_unitary
from .errors import QfimError, RankDeficient, SingularMatrix
from .linalg import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BasisSet", "ParameterSlot", "QfimError", "QfimReport", "RankDeficient", "SingularMatrix",
    "StateModel", "build_basis", "compatibility", "extend_basis", "qfi_single", "qfim", "qfim_unitary",
]
