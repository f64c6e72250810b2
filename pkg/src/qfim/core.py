"""Symmetric logarithmic derivatives and the QFIM in a non-orthogonal basis.

A state is stored by its coefficients in a basis ``B`` of linearly
independent kets spanning its support, ``rho = sum_jk R[j, k] |psi_j><psi_k|``.
Each parameter ``mu`` appends the kets its derivative needs, giving
``B_mu``; in those coordinates the state is ``[[R, 0], [0, 0]]`` and the
derivative ``Delta`` has a zero lower-right block.  With the Gram matrix
``G`` of ``B_mu`` the SLD equation reads

    2 Delta = L G rho + rho G L

and every matrix product and trace picks up a ``G`` in between.
"""

from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .basis import RANK_TOL, build_basis, extend_basis
from .errors import DimensionError, NotHermitian, PreconditionError

TRACE_TOL = 1e-10
COMMUTE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ParameterSlot:
    """Derivative of the state with respect to one parameter.

    Attributes
    ----------
    name : str
    extension_kets : ndarray, shape (ambient_dim, e)
        Kets appended to ``B`` to form ``B_mu``.
    drho_coeffs : ndarray, shape (|B| + e, |B| + e)
        Coefficients of the derivative in ``B_mu``.
    """

    name: str
    extension_kets: np.ndarray
    drho_coeffs: np.ndarray

    @classmethod
    def from_operator(cls, name, basis, kets, coeffs, rank_tol=RANK_TOL):
        """Slot for ``sum_ab coeffs[a, b] |f_a><f_b|``.

        The kets ``f`` are the kets of `basis` followed by the columns of
        `kets`, so `coeffs` is ``(|B| + m) x (|B| + m)``.  Extra kets already
        in the span of the running basis are dropped and re-expressed.  Kept
        kets are stored with unit norm so coefficients of all basis kets are
        on one scale.
        """
        coeffs = la.check_hermitian(coeffs, 1e-10, "derivative coefficients")
        r = len(basis)
        ext, coords = extend_basis(basis, kets, rank_tol, return_coords=True)
        if coeffs.shape != (r + coords.shape[1],) * 2:
            raise DimensionError(f"coefficients of shape {coeffs.shape} for {r} + {coords.shape[1]} kets")
        new = ext.kets[:, r:]
        norms = np.linalg.norm(new, axis=0)
        s = np.zeros((len(ext), coeffs.shape[0]), dtype=np.complex128)
        s[:r, :r] = np.eye(r)
        s[:, r:] = coords
        s[r:] *= norms[:, None]
        drho = s @ coeffs @ s.conj().T
        return cls(name, new / norms, 0.5 * (drho + drho.conj().T))


@dataclass(frozen=True, eq=False)
class StateModel:
    """Full-rank state on ``span(B)`` together with its parameter derivatives.

    Validation happens on construction; the per-parameter bases ``B_mu`` are
    built once and cached.
    """

    basis: object
    rho_coeffs: np.ndarray
    params: tuple = ()
    rank_tol: float = RANK_TOL
    _param_bases: tuple = field(init=False, repr=False)

    def __post_init__(self):
        b = self.basis
        if b.support_size != len(b):
            raise PreconditionError("the state basis must consist of support kets only")
        rho = la.as_cmatrix(self.rho_coeffs)
        if rho.shape != (len(b), len(b)):
            raise DimensionError(f"rho has shape {rho.shape}, basis has {len(b)} kets")
        la.check_hermitian(rho, 1e-10, "rho")
        rho = 0.5 * (rho + rho.conj().T)
        trace = np.trace(rho @ b.gram).real
        if abs(trace - 1.0) > TRACE_TOL:
            raise PreconditionError(f"tr(rho G) = {trace!r}, expected 1")
        # independence of B is certified separately, so full rank on span(B)
        # means positive definite coefficients; unit-norm kets fix the scale
        norms = np.sqrt(np.diag(b.gram).real)
        lam = np.linalg.eigvalsh(norms[:, None] * rho * norms[None, :])
        if len(lam) and lam[0] < self.rank_tol * lam[-1]:
            raise PreconditionError(f"rho is not full rank on span(B): eigenvalues {lam[0]:.3e} .. {lam[-1]:.3e}")
        object.__setattr__(self, "rho_coeffs", rho)
        params = tuple(self.params)
        object.__setattr__(self, "params", params)
        bases = []
        for p in params:
            bases.append(self._check_slot(p))
        object.__setattr__(self, "_param_bases", tuple(bases))

    def _check_slot(self, p):
        r = len(self.basis)
        ext = np.asarray(p.extension_kets, dtype=np.complex128).reshape(self.basis.ambient_dim, -1)
        bmu = build_basis(np.column_stack([self.basis.kets, ext]), r, self.rank_tol)
        d = la.as_cmatrix(p.drho_coeffs)
        if d.shape != (len(bmu), len(bmu)):
            raise DimensionError(f"{p.name}: derivative has shape {d.shape}, B_mu has {len(bmu)} kets")
        scale = np.abs(d).max(initial=0.0)
        if scale and np.abs(d - d.conj().T).max() > 1e-10 * scale:
            raise NotHermitian(f"{p.name}: derivative is not Hermitian")
        if scale and np.abs(d[r:, r:]).max(initial=0.0) > 1e-10 * scale:
            raise PreconditionError(f"{p.name}: derivative has a nonzero extension-extension block")
        gscale = np.abs(bmu.gram).max()
        tr = np.trace(d @ bmu.gram)
        if abs(tr) > TRACE_TOL * max(1.0, scale * gscale * len(bmu)):
            raise PreconditionError(f"{p.name}: derivative is not traceless (tr = {tr:.3e})")
        return bmu

    @property
    def names(self):
        return [p.name for p in self.params]

    def param_basis(self, mu):
        return self._param_bases[mu]

    def ambient_rho(self):
        k = self.basis.kets
        return k @ self.rho_coeffs @ k.conj().T

    def ambient_drho(self, mu):
        k = self._param_bases[mu].kets
        return k @ self.params[mu].drho_coeffs @ k.conj().T

    def with_params(self, params):
        return StateModel(self.basis, self.rho_coeffs, tuple(params), self.rank_tol)


@dataclass
class SldDiagnostics:
    cond_C: float
    cond_D: float
    residual: float


def _solve_sld(rho, gram, drho, r, solve_tol):
    """SLD coefficients with a zero extension-extension block.

    `rho` is ``r x r``; `gram` and `drho` live on the extended basis.
    """
    n = gram.shape[0]
    g11 = gram[:r, :r]
    g21 = gram[r:, :r]
    d11 = drho[:r, :r]
    d12 = drho[:r, r:]
    d21 = drho[r:, :r]
    c = rho @ g11
    cinv, cond_c = la.inv(c, solve_tol)
    e = cinv @ d12 @ g21 @ rho
    lop = la.lyapunov_operator(c)
    x, cond_d = la.solve(lop, la.vec(d11 - e - e.conj().T), solve_tol)
    out = np.zeros((n, n), dtype=np.complex128)
    out[:r, :r] = 2.0 * la.mat(x, r)
    out[:r, r:] = 2.0 * cinv @ d12
    out[r:, :r] = 2.0 * d21 @ cinv.conj().T
    return out, cond_c, cond_d


def _pad(m, n):
    out = np.zeros((n, n), dtype=np.complex128)
    k = m.shape[0]
    out[:k, :k] = m
    return out


def lyapunov_residual(sld, gram, rho, drho):
    """``max|2 Delta - L G rho - rho G L|`` with `rho` padded onto the basis of `sld`."""
    rp = _pad(rho, gram.shape[0])
    return float(np.abs(2 * drho - sld @ gram @ rp - rp @ gram @ sld).max(initial=0.0))


def sld_nonortho(m, mu, solve_tol=la.SOLVE_TOL):
    """SLD of parameter `mu` in ``B_mu`` coordinates.

    Raises
    ------
    SingularMatrix
        If ``rho G`` or its Lyapunov operator cannot be inverted.
    """
    return _sld_with_diagnostics(m, mu, solve_tol)[0]


def _sld_with_diagnostics(m, mu, solve_tol):
    bmu = m.param_basis(mu)
    drho = m.params[mu].drho_coeffs
    sld, cc, cd = _solve_sld(m.rho_coeffs, bmu.gram, drho, len(m.basis), solve_tol)
    res = lyapunov_residual(sld, bmu.gram, m.rho_coeffs, drho)
    return sld, SldDiagnostics(cc, cd, res)


def sld_blockvec(m, mu, solve_tol=la.SOLVE_TOL):
    """SLD from the full block-vectorized system, as a cross-check.

    Builds ``vecb(L G rho + rho G L) = ((G rho)^T [x] I + I [x] rho G) vecb(L)``
    with the Tracy-Singh product and solves it with the extension block of
    ``L`` fixed to zero.
    """
    bmu = m.param_basis(mu)
    r = len(m.basis)
    n = len(bmu)
    g = bmu.gram
    rp = _pad(m.rho_coeffs, n)
    p = la.BlockPartition.square(r)
    eye = np.eye(n, dtype=np.complex128)
    op = la.tracy_singh((g @ rp).T, p, eye, p) + la.tracy_singh(eye, p, rp @ g, p)
    rhs = 2.0 * la.vecb(m.params[mu].drho_coeffs, p)
    k = n * n - (n - r) ** 2
    x, _ = la.solve(op[:k, :k], rhs[:k], solve_tol)
    return la.unvecb(np.concatenate([x, np.zeros((n - r) ** 2)]), (n, n), p)


@dataclass
class QfimReport:
    """Output of :func:`qfim`.

    Attributes
    ----------
    H : ndarray, shape (n, n)
        Real symmetric quantum Fisher information matrix.
    Gamma : ndarray, shape (n, n)
        Real antisymmetric commutation matrix.
    slds : list of ndarray
        SLD of each parameter in its own extended basis.
    names : list of str
    diagnostics : dict
        ``cond_C``, ``cond_D`` and ``residual`` per parameter;
        ``asymmetry`` (of H before symmetrization) and ``re_mismatch``
        (real part of the Gamma trace against H), both relative to
        ``max|H|``; the tolerances used.
    """

    H: np.ndarray
    Gamma: np.ndarray
    slds: list
    names: list
    diagnostics: dict


def _joint_maps(m, mu, nu):
    """Joint basis of ``mu`` and ``nu`` and the coordinate maps into it."""
    r = len(m.basis)
    bmu = m.param_basis(mu)
    if mu == nu:
        eye = np.eye(len(bmu), dtype=np.complex128)
        return bmu, eye, eye
    ext = np.asarray(m.params[nu].extension_kets).reshape(m.basis.ambient_dim, -1)
    joint, coords = extend_basis(bmu, ext, m.rank_tol, return_coords=True)
    n = len(joint)
    s_mu = np.zeros((n, len(bmu)), dtype=np.complex128)
    s_mu[: len(bmu), : len(bmu)] = np.eye(len(bmu))
    s_nu = np.zeros((n, r + ext.shape[1]), dtype=np.complex128)
    s_nu[:r, :r] = np.eye(r)
    s_nu[:, r:] = coords
    return joint, s_mu, s_nu


def qfim(m, solve_tol=la.SOLVE_TOL):
    """Quantum Fisher information matrix and commutation matrix of `m`.

    For each pair ``mu <= nu`` both SLDs and derivatives are carried into
    the joint basis ``B_mu,nu`` (``mu`` extensions first).  With
    ``Q = tr(rho G L_mu G L_nu G)`` there, ``H = Re Q`` and ``Gamma = Im Q``;
    ``H`` is evaluated independently as ``tr(L_mu G Delta_nu G)`` and the
    difference is reported.
    """
    npar = len(m.params)
    slds = []
    cond_c, cond_d, res = [], [], []
    for mu in range(npar):
        sld, d = _sld_with_diagnostics(m, mu, solve_tol)
        slds.append(sld)
        cond_c.append(d.cond_C)
        cond_d.append(d.cond_D)
        dscale = np.abs(m.params[mu].drho_coeffs).max(initial=0.0)
        res.append(d.residual / dscale if dscale else d.residual)
    h = np.zeros((npar, npar))
    gam = np.zeros((npar, npar))
    re_q = np.zeros((npar, npar))
    for mu in range(npar):
        for nu in range(mu, npar):
            joint, s_mu, s_nu = _joint_maps(m, mu, nu)
            g = joint.gram
            l_mu = s_mu @ slds[mu] @ s_mu.conj().T
            l_nu = s_nu @ slds[nu] @ s_nu.conj().T
            d_mu = s_mu @ m.params[mu].drho_coeffs @ s_mu.conj().T
            d_nu = s_nu @ m.params[nu].drho_coeffs @ s_nu.conj().T
            rho = _pad(m.rho_coeffs, len(joint))
            lg_mu = l_mu @ g
            lg_nu = l_nu @ g
            h[mu, nu] = np.trace(lg_mu @ d_nu @ g).real
            h[nu, mu] = np.trace(lg_nu @ d_mu @ g).real
            q = np.trace(rho @ g @ lg_mu @ lg_nu)
            if mu != nu:
                # tr(rho L L) is real for a single Hermitian L; keep Gamma exactly antisymmetric
                gam[mu, nu] = q.imag
                gam[nu, mu] = -q.imag
            re_q[mu, nu] = re_q[nu, mu] = q.real
    scale = np.abs(h).max(initial=0.0)
    asym = np.abs(h - h.T).max(initial=0.0)
    mismatch = np.abs(re_q - 0.5 * (h + h.T)).max(initial=0.0)
    if scale:
        asym /= scale
        mismatch /= scale
    diag = {
        "cond_C": cond_c,
        "cond_D": cond_d,
        "residual": res,
        "asymmetry": float(asym),
        "re_mismatch": float(mismatch),
        "rank_tol": m.rank_tol,
        "solve_tol": solve_tol,
    }
    return QfimReport(0.5 * (h + h.T), gam, slds, m.names, diag)


def qfi_single(m, mu, solve_tol=la.SOLVE_TOL):
    """Quantum Fisher information of parameter `mu` alone."""
    sld = sld_nonortho(m, mu, solve_tol)
    g = m.param_basis(mu).gram
    return float(np.trace(sld @ g @ m.params[mu].drho_coeffs @ g).real)


def gamma(m, solve_tol=la.SOLVE_TOL):
    """Commutation matrix ``Gamma_mu,nu = Im tr(rho L_mu L_nu)``."""
    return qfim(m, solve_tol).Gamma


@dataclass
class Compatibility:
    """Per-pair flags keyed by ``(name_mu, name_nu)`` with ``mu < nu``."""

    commutation: dict
    independence: dict


def compatibility(m, tol=1e-8, report=None):
    """Flag pairs with ``|Gamma| <= tol * scale`` and ``|H| <= tol * scale``.

    ``scale`` is ``max|H|``.  Pass a precomputed `report` to skip the solve.
    """
    if report is None:
        report = qfim(m)
    scale = np.abs(report.H).max(initial=0.0)
    comm, indep = {}, {}
    n = len(report.names)
    for mu in range(n):
        for nu in range(mu + 1, n):
            key = (report.names[mu], report.names[nu])
            comm[key] = bool(abs(report.Gamma[mu, nu]) <= tol * scale)
            indep[key] = bool(abs(report.H[mu, nu]) <= tol * scale)
    return Compatibility(comm, indep)


def qfim_unitary(rho0, generators, names=None, solve_tol=la.SOLVE_TOL):
    """QFIM of ``exp(-i sum K_mu theta_mu) rho0 exp(i sum K_mu theta_mu)``.

    For commuting generators the derivative at any ``theta`` is unitarily
    equivalent to ``-i [K_mu, rho0]``, so the result does not depend on
    ``theta``.  `rho0` is a :class:`StateModel`; its own parameters are
    ignored.

    Raises
    ------
    PreconditionError
        If two generators do not commute.
    """
    gens = [check_generator(k, rho0.basis.ambient_dim) for k in generators]
    for i, a in enumerate(gens):
        for b in gens[i + 1:]:
            scale = max(np.abs(a).max(initial=0.0) * np.abs(b).max(initial=0.0), 1e-300)
            if np.abs(a @ b - b @ a).max(initial=0.0) > COMMUTE_TOL * scale * a.shape[0]:
                raise PreconditionError("generators do not commute")
    if names is None:
        names = [f"theta{i}" for i in range(len(gens))]
    r = len(rho0.basis)
    rho = rho0.rho_coeffs
    zero = np.zeros((r, r), dtype=np.complex128)
    slots = []
    for name, k in zip(names, gens):
        # -i [K, rho0] on the kets (psi_j, K psi_j)
        coeffs = np.block([[zero, 1j * rho], [-1j * rho, zero]])
        slots.append(ParameterSlot.from_operator(name, rho0.basis, k @ rho0.basis.kets, coeffs, rho0.rank_tol))
    return qfim(rho0.with_params(slots), solve_tol).H


def check_generator(k, dim):
    k = la.as_cmatrix(k)
    if k.shape != (dim, dim):
        raise DimensionError(f"generator of shape {k.shape} in a {dim}-dimensional space")
    return la.check_hermitian(k, 1e-10, "generator")


def reparameterize(h, jac):
    """Fisher information in new coordinates: ``J^T H J`` with ``J = d(old)/d(new)``."""
    h = np.asarray(h, dtype=float)
    jac = np.asarray(jac, dtype=float)
    if jac.shape[0] != h.shape[0]:
        raise DimensionError(f"Jacobian with {jac.shape[0]} rows for a {h.shape[0]}-parameter matrix")
    return jac.T @ h @ jac
