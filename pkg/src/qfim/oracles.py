"""Reference QFIM evaluations in an orthonormal ambient basis.

These work on plain density matrices and serve as independent checks of
:func:`qfim.core.qfim`.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .errors import DimensionError, ExtrapolationWarning

EIG_CUT = 1e-12


def _inputs(rho, drhos):
    rho = la.check_hermitian(rho, 1e-10, "rho")
    rho = 0.5 * (rho + rho.conj().T)
    out = []
    for d in drhos:
        d = la.check_hermitian(d, 1e-10, "derivative")
        if d.shape != rho.shape:
            raise DimensionError(f"derivative of shape {d.shape} for rho of shape {rho.shape}")
        out.append(0.5 * (d + d.conj().T))
    return rho, out


def _eigen_pairs(rho, drhos, eig_cut):
    lam, v = np.linalg.eigh(rho)
    tot = lam[:, None] + lam[None, :]
    keep = tot > eig_cut
    inv_tot = np.where(keep, 1.0 / np.where(keep, tot, 1.0), 0.0)
    rot = [v.conj().T @ d @ v for d in drhos]
    return rot, inv_tot


def qfim_oracle_eigen(rho, drhos, eig_cut=EIG_CUT):
    """QFIM from the eigendecomposition of `rho`.

    ``H_mu,nu = 2 sum_jk Re(D_mu[j, k] D_nu[k, j]) / (l_j + l_k)``, summed
    over pairs with ``l_j + l_k > eig_cut``, where ``D`` are the derivatives
    in the eigenbasis.
    """
    rho, drhos = _inputs(rho, drhos)
    rot, w = _eigen_pairs(rho, drhos, eig_cut)
    n = len(drhos)
    h = np.zeros((n, n))
    for a in range(n):
        for b in range(a, n):
            h[a, b] = h[b, a] = 2.0 * np.sum(w * (rot[a] * rot[b].T).real)
    return h


def gamma_oracle_eigen(rho, drhos, eig_cut=EIG_CUT):
    """``Im tr(rho L_mu L_nu)`` with SLDs built in the eigenbasis of `rho`.

    On the kernel of `rho` the SLD is set to zero.
    """
    rho, drhos = _inputs(rho, drhos)
    lam, v = np.linalg.eigh(rho)
    rot, w = _eigen_pairs(rho, drhos, eig_cut)
    slds = [2.0 * w * d for d in rot]
    n = len(drhos)
    g = np.zeros((n, n))
    for a in range(n):
        for b in range(a + 1, n):
            q = np.trace((lam[:, None] * slds[a]) @ slds[b])
            g[a, b] = q.imag
            g[b, a] = -q.imag
    return g


def qfim_safranek(rho, drhos, solve_tol=la.SOLVE_TOL):
    """``2 vec(d_mu)^dagger (conj(rho) [x] I + I [x] rho)^-1 vec(d_nu)``.

    Requires a full-rank `rho`.

    Raises
    ------
    SingularMatrix
        If the superoperator cannot be inverted.
    """
    rho, drhos = _inputs(rho, drhos)
    op = la.lyapunov_operator(rho)
    n = len(drhos)
    if n == 0:
        return np.zeros((0, 0))
    vs = np.column_stack([la.vec(d) for d in drhos])
    x, _ = la.solve(op, vs, solve_tol)
    h = 2.0 * (vs.conj().T @ x).real
    return 0.5 * (h + h.T)


@dataclass
class Extrapolation:
    """Richardson-extrapolated QFIM with its spread as an error estimate."""

    value: np.ndarray
    spread: float
    converged: bool
    samples: list


def _neville(s, values):
    """Polynomial extrapolation of ``values(s)`` to ``s = 0``."""
    p = [np.array(v, dtype=float) for v in values]
    n = len(s)
    for k in range(1, n):
        for i in range(n - k):
            p[i] = (s[i + k] * p[i] - s[i] * p[i + 1]) / (s[i + k] - s[i])
    return p[0]


def qfim_safranek_regularized(rho, drhos, s_sequence=(1e-3, 1e-4, 1e-5), tol=1e-6):
    """Safranek formula on ``(1 - s) rho + s I / d`` extrapolated to ``s -> 0``.

    Works for rank-deficient `rho`.  The spread is the largest difference
    between the full extrapolant and the one that leaves out the largest
    ``s``, relative to ``max(1, max|H|)``; a spread above `tol` raises an
    :class:`ExtrapolationWarning` and sets ``converged=False``.
    """
    s = np.asarray(s_sequence, dtype=float)
    if s.ndim != 1 or len(s) < 2 or np.any(s <= 0) or np.any(np.diff(s) >= 0):
        raise ValueError("s_sequence must hold at least two strictly decreasing positive values")
    rho, drhos = _inputs(rho, drhos)
    d = rho.shape[0]
    eye = np.eye(d)
    samples = [qfim_safranek((1 - si) * rho + si / d * eye, drhos, solve_tol=0.0) for si in s]
    value = _neville(s, samples)
    coarse = _neville(s[1:], samples[1:]) if len(s) > 2 else samples[-1]
    spread = float(np.abs(value - coarse).max(initial=0.0) / max(1.0, np.abs(value).max(initial=0.0)))
    converged = spread <= tol
    if not converged:
        warnings.warn(f"regularized QFIM did not settle (spread {spread:.3e})", ExtrapolationWarning, stacklevel=2)
    return Extrapolation(value, spread, converged, samples)
