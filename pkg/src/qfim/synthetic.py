"""Random parameterized states for cross-validation."""

import numpy as np

from .basis import build_basis
from .core import ParameterSlot, StateModel


def random_kets(rng, ambient_dim, n):
    return rng.standard_normal((ambient_dim, n)) + 1j * rng.standard_normal((ambient_dim, n))


def random_hermitian(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (a + a.conj().T)


def random_state_model(rng, ambient_dim=None, support=None, nparams=None, orthonormal=False):
    """Full-rank state on a random non-orthogonal basis with random derivatives.

    Parameters
    ----------
    rng : numpy.random.Generator
    ambient_dim : int, optional
        Defaults to a random value in ``[2, 6]``.
    support : int, optional
        Number of support kets; defaults to a random value in ``[1, ambient_dim]``
        (``[2, ambient_dim]`` when `orthonormal`).
    nparams : int, optional
        Defaults to a random value in ``[1, 3]``.
    orthonormal : bool
        Use orthonormal support and extension kets and keep every derivative
        inside the support.

    Returns
    -------
    StateModel
    """
    d = ambient_dim if ambient_dim is not None else int(rng.integers(2, 7))
    # a single support ket with no extension only admits a zero derivative
    lo = 2 if orthonormal else 1
    r = support if support is not None else int(rng.integers(lo, d + 1))
    npar = nparams if nparams is not None else int(rng.integers(1, 4))
    kets = random_kets(rng, d, d)
    if orthonormal:
        kets, _ = np.linalg.qr(kets)
    basis = build_basis(kets[:, :r], r)
    a = random_kets(rng, r, r)
    rho = a @ a.conj().T + 0.1 * np.eye(r)
    rho /= np.trace(rho @ basis.gram).real
    params = []
    for mu in range(npar):
        if orthonormal:
            ext = np.zeros((d, 0), dtype=np.complex128)
        else:
            e = int(rng.integers(1 if r == 1 else 0, d - r + 1))
            ext = random_kets(rng, d, e)
        bmu = build_basis(np.column_stack([basis.kets, ext]), r)
        n = len(bmu)
        x = random_hermitian(rng, n)
        x[r:, r:] = 0.0
        rho_pad = np.zeros((n, n), dtype=np.complex128)
        rho_pad[:r, :r] = rho
        x -= np.trace(x @ bmu.gram) * rho_pad
        params.append(ParameterSlot(f"theta{mu}", ext, 0.5 * (x + x.conj().T)))
    return StateModel(basis, rho, tuple(params))
