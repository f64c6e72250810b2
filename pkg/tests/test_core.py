import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from qfim import core, oracles, synthetic
from qfim import imaging as im
from qfim import linalg as la
from qfim.basis import build_basis
from qfim.core import ParameterSlot, StateModel
from qfim.errors import DimensionError, NotHermitian, PreconditionError

from conftest import crandn

seeds = st.integers(0, 2**32 - 1)


def classical_model(p):
    basis = build_basis(np.eye(2), 2)
    slot = ParameterSlot("p", np.zeros((2, 0)), np.diag([1.0, -1.0]).astype(complex))
    return StateModel(basis, np.diag([p, 1 - p]).astype(complex), (slot,))


def pure_model(psi, dpsi, name="theta"):
    basis = build_basis(psi[:, None], 1)
    slot = ParameterSlot.from_operator(name, basis, dpsi[:, None], np.array([[0, 1], [1, 0]], dtype=complex))
    return StateModel(basis, np.eye(1, dtype=complex), (slot,))


def normalized_family(rng, d):
    psi = crandn(rng, d)
    psi /= np.linalg.norm(psi)
    dpsi = crandn(rng, d)
    # keep <psi|psi> = 1 to first order
    dpsi -= np.vdot(psi, dpsi).real * psi
    return psi, dpsi


def ambient_sld(m, mu, sld):
    k = m.param_basis(mu).kets
    return k @ sld @ k.conj().T


def test_classical_two_level():
    rep = core.qfim(classical_model(0.3))
    assert_allclose(rep.H, [[1 / 0.21]], rtol=1e-14)
    assert_allclose(rep.H[0, 0], 4.761904761904762, rtol=1e-14)
    assert rep.Gamma[0, 0] == 0.0


def test_pure_state_formula(rng):
    psi, dpsi = normalized_family(rng, 4)
    h = core.qfim(pure_model(psi, dpsi)).H[0, 0]
    expected = 4 * (np.vdot(dpsi, dpsi).real - abs(np.vdot(psi, dpsi)) ** 2)
    assert_allclose(h, expected, rtol=1e-10)


def test_pure_state_sld_is_twice_derivative(rng):
    psi = np.array([1, 0, 0], dtype=complex)
    dpsi = np.array([0, 0.6, 0.8j])
    m = pure_model(psi, dpsi)
    sld = core.sld_nonortho(m, 0)
    assert_allclose(ambient_sld(m, 0, sld), 2 * m.ambient_drho(0), atol=1e-14)
    assert core.lyapunov_residual(sld, m.param_basis(0).gram, m.rho_coeffs, m.params[0].drho_coeffs) < 1e-14


def test_orthonormal_sld_matches_superoperator_solution(rng):
    m = synthetic.random_state_model(rng, ambient_dim=3, support=3, nparams=1, orthonormal=True)
    d = m.params[0].drho_coeffs
    op = la.lyapunov_operator(m.rho_coeffs)
    expected = 2 * la.mat(np.linalg.solve(op, la.vec(d)), 3)
    assert_allclose(core.sld_nonortho(m, 0), expected, atol=1e-12 * np.abs(expected).max())


def test_random_nonorthogonal_residual(rng):
    m = synthetic.random_state_model(rng, ambient_dim=3, support=3, nparams=1)
    sld = core.sld_nonortho(m, 0)
    g = m.param_basis(0).gram
    d = m.params[0].drho_coeffs
    assert core.lyapunov_residual(sld, g, m.rho_coeffs, d) <= 1e-8 * np.abs(d).max()


def test_sld_blocks(rng):
    m = synthetic.random_state_model(rng, ambient_dim=5, support=2, nparams=1)
    sld = core.sld_nonortho(m, 0)
    r = len(m.basis)
    assert np.all(sld[r:, r:] == 0)
    assert np.abs(sld - sld.conj().T).max() <= 1e-9 * np.abs(sld).max()


def test_qfi_single_matches_diagonal(rng):
    m = synthetic.random_state_model(rng, nparams=3)
    h = core.qfim(m).H
    for mu in range(3):
        assert_allclose(core.qfi_single(m, mu), h[mu, mu], rtol=1e-10)


def test_zero_derivative_gives_zero(rng):
    m = synthetic.random_state_model(rng, ambient_dim=3, support=3, nparams=1)
    zero = ParameterSlot("z", np.zeros((3, 0)), np.zeros((3, 3), dtype=complex))
    assert_allclose(core.qfim(m.with_params((zero,))).H, [[0.0]])


@given(seeds)
def test_oracle_equivalence(seed):
    m = synthetic.random_state_model(np.random.default_rng(seed))
    rep = core.qfim(m)
    drhos = [m.ambient_drho(i) for i in range(len(m.params))]
    h_ref = oracles.qfim_oracle_eigen(m.ambient_rho(), drhos)
    g_ref = oracles.gamma_oracle_eigen(m.ambient_rho(), drhos)
    scale = np.abs(h_ref).max()
    assert np.abs(rep.H - h_ref).max() <= 1e-7 * scale
    assert np.abs(rep.Gamma - g_ref).max() <= 1e-7 * scale


@given(seeds)
def test_report_symmetry_and_residuals(seed):
    m = synthetic.random_state_model(np.random.default_rng(seed))
    rep = core.qfim(m)
    scale = np.abs(rep.H).max()
    assert np.array_equal(rep.H, rep.H.T)
    assert np.array_equal(rep.Gamma, -rep.Gamma.T)
    assert rep.diagnostics["asymmetry"] <= 1e-9
    assert rep.diagnostics["re_mismatch"] <= 1e-9
    assert max(rep.diagnostics["residual"]) <= 1e-8
    assert np.all(np.linalg.eigvalsh(rep.H) >= -1e-9 * scale)


@given(seeds)
def test_blockvec_route_matches_formula(seed):
    rng = np.random.default_rng(seed)
    m = synthetic.random_state_model(rng)
    for mu in range(len(m.params)):
        a = core.sld_nonortho(m, mu)
        b = core.sld_blockvec(m, mu)
        assert np.abs(a - b).max() <= 1e-8 * max(1.0, np.abs(a).max())


@given(seeds)
def test_basis_invariance(seed):
    rng = np.random.default_rng(seed)
    m = synthetic.random_state_model(rng)
    r = len(m.basis)
    t = crandn(rng, r, r) + 2 * np.eye(r)
    tinv = np.linalg.inv(t)
    basis = build_basis(m.basis.kets @ t, r)
    rho = tinv @ m.rho_coeffs @ tinv.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    slots = []
    for mu, p in enumerate(m.params):
        e = len(m.param_basis(mu)) - r
        s = np.eye(r + e, dtype=complex)
        s[:r, :r] = tinv
        d = s @ p.drho_coeffs @ s.conj().T
        slots.append(ParameterSlot(p.name, m.param_basis(mu).kets[:, r:], 0.5 * (d + d.conj().T)))
    h0 = core.qfim(m).H
    h1 = core.qfim(StateModel(basis, rho / np.trace(rho @ basis.gram).real, tuple(slots))).H
    assert np.abs(h0 - h1).max() <= 1e-7 * np.abs(h0).max()


def test_safranek_reduction(rng):
    for _ in range(10):
        m = synthetic.random_state_model(rng, orthonormal=True)
        k = m.basis.kets
        drhos = [k.conj().T @ m.ambient_drho(i) @ k for i in range(len(m.params))]
        h = core.qfim(m).H
        ref = oracles.qfim_safranek(m.rho_coeffs, drhos)
        assert np.abs(h - ref).max() <= 1e-9 * np.abs(ref).max()


def test_compatibility_flags():
    basis = build_basis(np.eye(3), 3)
    rho = np.diag([0.2, 0.3, 0.5]).astype(complex)
    a = ParameterSlot("a", np.zeros((3, 0)), np.diag([1.0, -1.0, 0.0]).astype(complex))
    b = ParameterSlot("b", np.zeros((3, 0)), np.diag([0.0, 1.0, -1.0]).astype(complex))
    c = ParameterSlot("c", np.zeros((3, 0)), np.diag([1.0, 0.0, -1.0]).astype(complex))
    m = StateModel(basis, rho, (a, b, c))
    rep = core.qfim(m)
    assert_allclose(rep.H[0, 1], -1 / 0.3)
    comp = core.compatibility(m)
    assert comp.commutation == {("a", "b"): True, ("a", "c"): True, ("b", "c"): True}
    assert comp.independence[("a", "b")] is False


def test_compatibility_detects_noncommuting_slds():
    # qubit with Bloch vector derivatives along x and y: Gamma != 0
    basis = build_basis(np.eye(2), 2)
    rho = np.array([[0.6, 0.1], [0.1, 0.4]], dtype=complex)
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]])
    m = StateModel(basis, rho, (ParameterSlot("x", np.zeros((2, 0)), sx / 2),
                                ParameterSlot("y", np.zeros((2, 0)), sy / 2)))
    rep = core.qfim(m)
    g_ref = oracles.gamma_oracle_eigen(rho, [sx / 2, sy / 2])
    assert abs(g_ref[0, 1]) > 0.1
    assert_allclose(rep.Gamma, g_ref, atol=1e-12)
    assert core.compatibility(m, report=rep).commutation[("x", "y")] is False


def test_unitary_identity_generator_gives_zero_row(rng):
    basis = build_basis(np.eye(3), 3)
    rho0 = StateModel(basis, np.diag([0.2, 0.3, 0.5]).astype(complex))
    k = np.diag([1.0, -2.0, 0.5]).astype(complex)
    h = core.qfim_unitary(rho0, [np.eye(3) * 0.7, k])
    assert_allclose(h[0], 0.0, atol=1e-14)
    assert_allclose(h[:, 0], 0.0, atol=1e-14)
    assert h[1, 1] == 0.0  # diagonal generator commutes with diagonal rho0


def test_unitary_qubit_matches_oracle():
    p = 0.3
    basis = build_basis(np.eye(2), 2)
    rho = np.diag([p, 1 - p]).astype(complex)
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    h = core.qfim_unitary(StateModel(basis, rho), [sx])
    ref = oracles.qfim_oracle_eigen(rho, [-1j * (sx @ rho - rho @ sx)])
    assert_allclose(h, ref, rtol=1e-12)
    assert_allclose(h[0, 0], 4 * (1 - 2 * p) ** 2, rtol=1e-12)


def test_unitary_theta_independence(rng):
    d = 4
    gens = [np.diag(rng.standard_normal(d)).astype(complex) for _ in range(2)]
    kets = crandn(rng, d, 2)
    a = crandn(rng, 2, 2)
    rho = a @ a.conj().T + 0.1 * np.eye(2)
    basis = build_basis(kets, 2)
    rho /= np.trace(rho @ basis.gram).real
    # generators are diagonal, so a unitary diagonal in the same basis keeps them commuting
    base = core.qfim_unitary(StateModel(basis, rho), gens)
    for _ in range(3):
        theta = rng.standard_normal(2)
        u = np.diag(np.exp(-1j * sum(t * np.diag(g) for t, g in zip(theta, gens))))
        moved = core.qfim_unitary(StateModel(build_basis(u @ kets, 2), rho), gens)
        assert_allclose(moved, base, rtol=1e-9, atol=1e-12)


def test_unitary_rejects_noncommuting():
    basis = build_basis(np.eye(2), 2)
    rho0 = StateModel(basis, np.diag([0.3, 0.7]).astype(complex))
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sz = np.diag([1.0, -1.0]).astype(complex)
    with pytest.raises(PreconditionError):
        core.qfim_unitary(rho0, [sx, sz])


def test_unitary_accepts_imaging_generators():
    scene = im.ImagingScene((im.Source(0.001, 0, 0),), [[0.05, 0.0], [-0.03, 0.02], [0.0, -0.04]], 300.0, 1.0)
    psi = im.source_ket(scene, 0)
    rho0 = StateModel(build_basis(psi[:, None], 1), np.eye(1, dtype=complex))
    h = core.qfim_unitary(rho0, im.generators(scene).matrices())
    assert h.shape == (3, 3)
    assert np.all(np.diag(h) > 0)


def test_reparameterize():
    h = np.array([[2.0, 1.0], [1.0, 3.0]])
    j = np.array([[1.0, 1.0], [1.0, -1.0]])
    assert_allclose(core.reparameterize(h, j), j.T @ h @ j)
    with pytest.raises(DimensionError):
        core.reparameterize(h, np.eye(3))


def test_state_model_validation():
    basis = build_basis(np.eye(2), 2)
    with pytest.raises(PreconditionError):
        StateModel(basis, np.diag([0.5, 0.6]).astype(complex))
    with pytest.raises(NotHermitian):
        StateModel(basis, np.array([[0.5, 0.1], [0.0, 0.5]], dtype=complex))
    with pytest.raises(PreconditionError):
        StateModel(basis, np.diag([1.0, 0.0]).astype(complex))
    with pytest.raises(DimensionError):
        StateModel(basis, np.eye(3, dtype=complex) / 3)
    rho = np.diag([0.5, 0.5]).astype(complex)
    bad22 = np.zeros((3, 3), dtype=complex)
    bad22[2, 2] = 1.0
    with pytest.raises(PreconditionError):
        StateModel(build_basis(np.eye(3)[:, :2], 2), rho, (ParameterSlot("e", np.eye(3)[:, 2:], bad22),))
    with pytest.raises(PreconditionError):
        StateModel(basis, rho, (ParameterSlot("t", np.zeros((2, 0)), np.eye(2, dtype=complex)),))
    with pytest.raises(PreconditionError):
        StateModel(build_basis(np.eye(3)[:, :2], 1), rho)
