"""Non-orthogonal bases of ambient kets and their Gram matrices."""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, PreconditionError, RankDeficient

RANK_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class BasisSet:
    """Ordered, linearly independent kets with their Gram matrix.

    Attributes
    ----------
    kets : ndarray, shape (ambient_dim, n)
        Kets as columns.
    support_size : int
        Number of leading kets spanning the support of the state; later kets
        are appended derivative directions.
    gram : ndarray, shape (n, n)
        ``gram[j, k] = <psi_j|psi_k>``.
    """

    kets: np.ndarray
    support_size: int
    gram: np.ndarray

    @property
    def ambient_dim(self):
        return self.kets.shape[0]

    def __len__(self):
        return self.kets.shape[1]

    @property
    def extension_size(self):
        return len(self) - self.support_size

    def coordinates(self, vectors):
        """Least-squares coefficients of ambient `vectors` (columns) in this basis."""
        vectors = _as_columns(vectors, self.ambient_dim)
        coeffs, *_ = np.linalg.lstsq(self.kets, vectors, rcond=None)
        return coeffs


def _as_columns(kets, ambient_dim=None):
    if isinstance(kets, np.ndarray) and kets.ndim == 2:
        arr = np.asarray(kets, dtype=np.complex128)
    else:
        kets = [np.asarray(k, dtype=np.complex128).ravel() for k in kets]
        if not kets:
            if ambient_dim is None:
                raise DimensionError("cannot infer the ambient dimension of an empty ket list")
            return np.zeros((ambient_dim, 0), dtype=np.complex128)
        arr = np.column_stack(kets)
    if ambient_dim is not None and arr.shape[0] != ambient_dim:
        raise DimensionError(f"kets have dimension {arr.shape[0]}, expected {ambient_dim}")
    return arr


def independence_check(kets, rank_tol=RANK_TOL):
    """Raise :class:`RankDeficient` unless the columns of `kets` are independent.

    Columns are normalized first, so the test is on the relative singular
    values: ``sigma_min >= rank_tol * sigma_max``.
    """
    n = kets.shape[1]
    if n == 0:
        return
    norms = np.linalg.norm(kets, axis=0)
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        raise RankDeficient(zero, 0.0, "basis contains a zero ket")
    if n > kets.shape[0]:
        raise RankDeficient(range(n), 0.0, f"{n} kets in a {kets.shape[0]}-dimensional space")
    _, s, vh = np.linalg.svd(kets / norms, full_matrices=False)
    ratio = s[-1] / s[0]
    if ratio < rank_tol:
        null = np.abs(vh[-1])
        involved = np.flatnonzero(null > 1e-3 * null.max())
        raise RankDeficient(involved, ratio)


def build_basis(kets, support_size, rank_tol=RANK_TOL):
    """Validate `kets` and cache their Gram matrix.

    Parameters
    ----------
    kets : array_like
        Either an ``(ambient_dim, n)`` array with kets as columns or a
        sequence of 1-D ambient vectors.
    support_size : int
        Number of leading kets spanning the support of the state.
    rank_tol : float
        Relative singular-value cutoff for linear independence.

    Raises
    ------
    RankDeficient
        If the kets are linearly dependent to tolerance.  This is never
        repaired silently; pass a reduced set of kets instead.
    """
    arr = _as_columns(kets)
    if not 0 <= support_size <= arr.shape[1]:
        raise PreconditionError(f"support_size {support_size} outside [0, {arr.shape[1]}]")
    independence_check(arr, rank_tol)
    arr = np.array(arr, dtype=np.complex128, order="F")
    arr.setflags(write=False)
    gram = arr.conj().T @ arr
    # exact Hermitian symmetry and a real diagonal
    gram = 0.5 * (gram + gram.conj().T)
    gram.setflags(write=False)
    return BasisSet(arr, int(support_size), gram)


def extend_basis(basis, new_kets, rank_tol=RANK_TOL, return_coords=False):
    """Append `new_kets` to `basis`, dropping those already in its span.

    A new ket is dropped when the norm of its component orthogonal to the
    running span is below ``rank_tol`` times its own norm.  Order is kept, so
    the result is deterministic.  ``support_size`` is unchanged.

    With ``return_coords=True`` also return the ``(len(result), m)``
    coordinates of the `m` requested kets in the extended basis: unit vectors
    for kept kets, least-squares coefficients for dropped ones.
    """
    new = _as_columns(new_kets, basis.ambient_dim)
    n0 = len(basis)
    if n0:
        q, _ = np.linalg.qr(basis.kets / np.linalg.norm(basis.kets, axis=0))
    else:
        q = np.zeros((basis.ambient_dim, 0), dtype=np.complex128)
    kept = []
    slot = []
    for j in range(new.shape[1]):
        f = new[:, j]
        fnorm = np.linalg.norm(f)
        if fnorm == 0.0:
            slot.append(None)
            continue
        r = f - q @ (q.conj().T @ f)
        r = r - q @ (q.conj().T @ r)
        rnorm = np.linalg.norm(r)
        if rnorm < rank_tol * fnorm:
            slot.append(None)
            continue
        q = np.column_stack([q, r / rnorm])
        slot.append(n0 + len(kept))
        kept.append(j)
    out = build_basis(np.column_stack([basis.kets, new[:, kept]]), basis.support_size, rank_tol)
    if not return_coords:
        return out
    coords = np.zeros((len(out), new.shape[1]), dtype=np.complex128)
    dropped = [j for j, s in enumerate(slot) if s is None]
    if dropped:
        coords[:, dropped] = out.coordinates(new[:, dropped])
    for j, s in enumerate(slot):
        if s is not None:
            coords[s, j] = 1.0
    return out, coords
