"""Dense complex matrix kernel.

Matrices are plain 2-D numpy arrays of complex128.  ``vec`` stacks columns
(column-major / Fortran order), so for a Fortran-ordered array ``vec`` is a
reshape without a copy and ``mat`` is its exact inverse::

    vec([[a1, a3],
         [a2, a4]]) == (a1, a2, a3, a4)

Block-partitioned matrices carry a :class:`BlockPartition` giving the row and
column split; block ``11`` is the upper-left ``row_split x col_split`` block.

The Tracy-Singh product, block vectorization and the Lyapunov operator
``I (x) C + conj(C) (x) I`` come from a compiled extension when available and
from numpy otherwise (set ``QFIM_PURE_PYTHON=1`` to force the latter).
"""

import os
import warnings
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla

from .errors import DimensionError, NotHermitian, PartitionError, SingularMatrix

if os.environ.get("QFIM_PURE_PYTHON", "") not in ("", "0"):
    from . import _kernels_py as _kernels
    BACKEND = "python"
else:
    try:
        from . import _kernels
        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _kernels
        BACKEND = "python"

HERMITIAN_TOL = 1e-12
SOLVE_TOL = 1e-12


class BlockPartition(NamedTuple):
    row_split: int
    col_split: int

    @classmethod
    def trivial(cls, shape):
        """Single-block partition of a matrix of the given shape."""
        return cls(shape[0], shape[1])

    @classmethod
    def square(cls, split):
        return cls(split, split)

    def check(self, shape):
        if not (0 <= self.row_split <= shape[0] and 0 <= self.col_split <= shape[1]):
            raise PartitionError(f"partition {tuple(self)} does not fit a {shape[0]}x{shape[1]} matrix")


def as_cmatrix(a):
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {a.shape}")
    return a


def vec(m):
    """Stack the columns of `m` into one vector."""
    m = as_cmatrix(m)
    return m.reshape(-1, order="F")


def mat(v, n):
    """Inverse of :func:`vec` for an ``n x n`` matrix."""
    v = np.asarray(v, dtype=np.complex128).ravel()
    if v.size != n * n:
        raise DimensionError(f"vector of length {v.size} cannot be reshaped to {n}x{n}")
    return v.reshape((n, n), order="F")


def vecb(m, p):
    """Block-wise vectorization ``(vec A11, vec A21, vec A12, vec A22)``."""
    m = as_cmatrix(m)
    p = BlockPartition(*p)
    p.check(m.shape)
    return np.asarray(_kernels.vecb(m, p.row_split, p.col_split))


def unvecb(v, shape, p):
    """Inverse of :func:`vecb`."""
    v = np.ascontiguousarray(v, dtype=np.complex128).ravel()
    nr, nc = shape
    if v.size != nr * nc:
        raise DimensionError(f"vector of length {v.size} does not fill a {nr}x{nc} matrix")
    p = BlockPartition(*p)
    p.check(shape)
    return np.asarray(_kernels.unvecb(v, nr, nc, p.row_split, p.col_split))


def kron(a, b):
    return np.asarray(_kernels.kron(as_cmatrix(a), as_cmatrix(b)))


def tracy_singh(a, pa, b, pb):
    """Tracy-Singh product of two 2x2 block-partitioned matrices.

    Block ``((i, k), (j, l))`` of the result is ``A_ij (x) B_kl``, with row
    blocks ordered ``(1,1), (1,2), (2,1), (2,2)`` over ``(i, k)`` and column
    blocks likewise over ``(j, l)``.  Trivial partitions reduce it to
    :func:`kron`.  It satisfies ``vecb(A X C) = tracy_singh(C.T, A) vecb(X)``
    for conformable partitions.
    """
    a = as_cmatrix(a)
    b = as_cmatrix(b)
    pa = BlockPartition(*pa)
    pb = BlockPartition(*pb)
    pa.check(a.shape)
    pb.check(b.shape)
    return np.asarray(_kernels.tracy_singh(a, pa.row_split, pa.col_split, b, pb.row_split, pb.col_split))


def lyapunov_operator(c):
    """``I (x) C + conj(C) (x) I``, the matrix of ``X -> C X + X C^dagger`` on ``vec X``."""
    c = as_cmatrix(c)
    if c.shape[0] != c.shape[1]:
        raise DimensionError("Lyapunov operator needs a square matrix")
    return np.asarray(_kernels.lyapunov_operator(c))


def _lu(a, solve_tol):
    a = as_cmatrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got {a.shape}")
    if a.shape[0] == 0:
        return None, 1.0
    anorm = np.abs(a).sum(axis=0).max()
    if not np.isfinite(anorm):
        raise SingularMatrix("matrix has non-finite entries", np.inf)
    with warnings.catch_warnings():
        # exact singularity is reported below as SingularMatrix
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(a, check_finite=False)
    if anorm == 0.0 or np.any(np.diag(lu) == 0):
        raise SingularMatrix("matrix is exactly singular", np.inf)
    rcond, _ = sla.lapack.zgecon(lu, anorm, norm="1")
    cond = np.inf if rcond == 0 else 1.0 / rcond
    if rcond < solve_tol:
        raise SingularMatrix("matrix is singular to tolerance", cond)
    return (lu, piv), cond


def solve(a, rhs, solve_tol=SOLVE_TOL):
    """Solve ``a x = rhs`` by LU.

    Returns
    -------
    x : ndarray
    cond : float
        LAPACK 1-norm condition estimate of `a`.

    Raises
    ------
    SingularMatrix
        If the reciprocal condition estimate is below `solve_tol`.
    """
    factors, cond = _lu(a, solve_tol)
    rhs = np.asarray(rhs, dtype=np.complex128)
    if factors is None:
        return rhs.copy(), cond
    return sla.lu_solve(factors, rhs, check_finite=False), cond


def inv(a, solve_tol=SOLVE_TOL):
    """Inverse of `a` with its 1-norm condition estimate; see :func:`solve`."""
    a = as_cmatrix(a)
    return solve(a, np.eye(a.shape[0], dtype=np.complex128), solve_tol)


def hermitian_defect(a):
    """``max|a - a^dagger|`` relative to ``max|a|`` (0 for the zero matrix)."""
    scale = np.abs(a).max(initial=0.0)
    if scale == 0.0:
        return 0.0
    return float(np.abs(a - a.conj().T).max() / scale)


def check_hermitian(a, tol=HERMITIAN_TOL, what="matrix"):
    a = as_cmatrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"{what} must be square, got {a.shape}")
    defect = hermitian_defect(a)
    if defect > tol:
        raise NotHermitian(f"{what} is not Hermitian (relative defect {defect:.3e})")
    return a


def eig_hermitian(a, hermitian_tol=HERMITIAN_TOL):
    """Eigendecomposition ``a = V diag(w) V^dagger`` of a Hermitian matrix.

    Eigenvalues are returned in ascending order.
    """
    a = check_hermitian(a, hermitian_tol)
    return np.linalg.eigh(a)
