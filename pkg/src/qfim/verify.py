"""Built-in golden checks run by ``qfim verify``."""

from dataclasses import dataclass

import numpy as np

from . import closed_forms as cf
from . import core, oracles, synthetic
from . import imaging as im
from . import scenarios as sc


@dataclass
class Check:
    name: str
    value: float
    tolerance: float

    @property
    def passed(self):
        return bool(np.isfinite(self.value) and self.value <= self.tolerance)


def _rel(a, b):
    scale = np.abs(b).max(initial=0.0)
    return float(np.abs(a - b).max(initial=0.0) / scale) if scale else float(np.abs(a).max(initial=0.0))


def oracle_equivalence(n_models=100, seed=0):
    """Largest relative deviation from the eigen oracle over random models."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_models):
        m = synthetic.random_state_model(rng)
        h = core.qfim(m).H
        ref = oracles.qfim_oracle_eigen(m.ambient_rho(), [m.ambient_drho(i) for i in range(len(m.params))])
        worst = max(worst, _rel(h, ref))
    return Check("oracle equivalence (100 random models)", worst, 1e-7)


def safranek_reduction(n_models=20, seed=1):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_models):
        m = synthetic.random_state_model(rng, orthonormal=True)
        h = core.qfim(m).H
        drhos = [m.ambient_drho(i) for i in range(len(m.params))]
        # orthonormal support kets: coefficients are the density matrix itself
        k = m.basis.kets
        ref = oracles.qfim_safranek(k.conj().T @ m.ambient_rho() @ k, [k.conj().T @ d @ k for d in drhos])
        worst = max(worst, _rel(h, ref))
    return Check("orthonormal reduction vs Safranek formula", worst, 1e-9)


def three_source_intensity(delta_x=1e-3):
    pts = sc.random_cloud()
    scene = sc.three_source_scene(pts, 1 / 3, 1 / 3, delta_x)
    h = core.qfim(im.build_state_model(scene)).H
    var_x = im.generator_moments(scene).var[0]
    target = np.array([[16.0, 8.0], [8.0, 5.5]])
    dev = float(np.abs(h / (delta_x**2 * var_x) / target - 1).max())
    return Check("three-source intensity QFIM at p1=p2=1/3", dev, 0.02)


def radial_symmetry(delta_scale=1e-3):
    pts = sc.ring_cloud()
    delta = delta_scale * np.array([1.0, 0.5, 0.3])
    worst = 0.0
    for p1 in (0.5, 0.3):
        scene = sc.two_source_scene(pts, p1, delta)
        rep = core.qfim(im.build_state_model(scene))
        if np.any(cf.two_source_gamma(im.generator_moments(scene), p1, delta) != 0):
            return Check("ring aperture: closed-form Gamma is not zero", np.inf, 1e-3)
        worst = max(worst, np.abs(rep.Gamma).max() / (np.abs(rep.H).max() * delta_scale))
    return Check("ring aperture: Gamma / (max|H| delta/z0)", worst, 1e-3)


def two_source_golden(delta_scale=1e-3):
    pts = sc.random_cloud()
    delta = delta_scale * np.array([1.0, 0.5, 0.3])
    worst = 0.0
    for p1 in (0.5, 0.3):
        scene = sc.two_source_scene(pts, p1, delta)
        h = core.qfim(im.build_state_model(scene)).H
        ref = cf.two_source_qfim(im.generator_moments(scene), p1, delta)
        nz = ref != 0
        worst = max(worst, float(np.abs((h[nz] - ref[nz]) / ref[nz]).max()))
    return Check("two-source 7x7 QFIM vs lowest-order form", worst, 0.02)


def run_all():
    return [
        oracle_equivalence(),
        safranek_reduction(),
        three_source_intensity(),
        radial_symmetry(),
        two_source_golden(),
    ]


def format_table(checks):
    width = max(len(c.name) for c in checks)
    lines = [f"{'check':<{width}}  {'value':>10}  {'tolerance':>9}  result"]
    for c in checks:
        lines.append(f"{c.name:<{width}}  {c.value:10.3e}  {c.tolerance:9.1e}  {'PASS' if c.passed else 'FAIL'}")
    return "\n".join(lines)
