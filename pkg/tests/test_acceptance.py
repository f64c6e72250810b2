"""Acceptance criteria 1-10, one test each.

Every test records a single ``criterion N: PASS|FAIL`` line, printed in the
terminal summary and to stdout.  Scenes use an 8-point collection cloud
within ``0.1 z0`` of the axis; the wavenumber per problem is chosen in
:mod:`qfim.scenarios`.
"""

import json
import time
import warnings

import numpy as np
import pytest

from qfim import cli, core, oracles, synthetic
from qfim import closed_forms as cf
from qfim import imaging as im
from qfim import scenarios as sc
from qfim.basis import build_basis
from qfim.errors import RankDeficient

from conftest import ACCEPTANCE_LINES

SWEEP = np.array([1e-4, 3e-4, 1e-3])
DELTA = 1e-3 * np.array([1.0, 0.5, 0.3])
RESIDUALS = {}


def record(n, ok, detail):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def solved(key, model):
    rep = core.qfim(model)
    RESIDUALS[key] = max(rep.diagnostics["residual"], default=0.0)
    return rep


def rel_dev(a, b):
    return float(np.abs(a - b).max() / np.abs(b).max())


def slope(x, y):
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


@pytest.fixture(scope="module")
def cloud():
    return sc.random_cloud()


def test_criterion_01_oracle_equivalence():
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    worst = 0.0
    for i in range(100):
        m = synthetic.random_state_model(rng)
        assert m.basis.ambient_dim <= 6 and 1 <= len(m.params) <= 3
        h = solved(f"c1 model {i}", m).H
        ref = oracles.qfim_oracle_eigen(m.ambient_rho(), [m.ambient_drho(j) for j in range(len(m.params))])
        worst = max(worst, rel_dev(h, ref))
    elapsed = time.perf_counter() - t0
    record(1, worst <= 1e-7 and elapsed <= 10.0, f"max rel dev {worst:.2e} (<= 1e-7), {elapsed:.2f} s (<= 10 s)")


def test_criterion_02_safranek_reduction():
    rng = np.random.default_rng(7)
    worst = 0.0
    for i in range(50):
        m = synthetic.random_state_model(rng, orthonormal=True)
        k = m.basis.kets
        drhos = [m.ambient_drho(j) for j in range(len(m.params))]
        h = solved(f"c2 model {i}", m).H
        saf = oracles.qfim_safranek(m.rho_coeffs, [k.conj().T @ d @ k for d in drhos])
        orc = oracles.qfim_oracle_eigen(m.ambient_rho(), drhos)
        worst = max(worst, rel_dev(h, saf), rel_dev(h, orc), rel_dev(saf, orc))
    record(2, worst <= 1e-9, f"max pairwise rel dev qfim/safranek/oracle {worst:.2e} (<= 1e-9)")


def test_criterion_03_three_source_intensity(cloud):
    dx = 1e-3
    t0 = time.perf_counter()
    scene = sc.three_source_scene(cloud, 1 / 3, 1 / 3, dx)
    h = solved("c3", im.build_state_model(scene)).H
    elapsed = time.perf_counter() - t0
    var_x = im.generator_moments(scene).var[0]
    assert var_x > 0
    ratio = h / (dx**2 * var_x)
    dev = float(np.abs(ratio / np.array([[16, 8], [8, 5.5]]) - 1).max())
    record(3, dev <= 0.02 and elapsed <= 1.0,
           f"H/(dx^2 Var gx) = {np.round(ratio, 3).tolist()}, max dev {dev:.2%} (<= 2%), {elapsed:.3f} s (<= 1 s)")


def test_criterion_04_three_source_distance(cloud):
    devs = []
    for p2 in (0.1, 0.25, 0.5):
        scene = sc.three_source_scene(cloud, 0.4 * (1 - p2), p2, 1e-3, estimate=(sc.spacing_parameter(),),
                                      k=sc.K_SPACING)
        h = solved(f"c4 p2={p2}", im.build_state_model(scene)).H[0, 0]
        devs.append(abs(h / im.generator_moments(scene).var[0] / (4 * (1 - p2)) - 1))
    record(4, max(devs) <= 0.02, f"max dev from 4(1-p2) {max(devs):.2%} (<= 2%)")


def test_criterion_05_offset_pair(cloud):
    devs = []
    for q in (-0.5, 0.0, 0.5):
        for p2 in (0.3, 0.5):
            scene = sc.offset_pair_scene(cloud, q, p2, 1e-3)
            ratio = solved(f"c5 q={q} p2={p2}", im.build_state_model(scene)).H[0, 0] / im.generator_moments(scene).var[0]
            devs.append(abs(ratio - (1 + 4 * q**2 + 4 * q * (2 * p2 - 1))))
    record(5, max(devs) <= 0.02, f"max |H/Var gx - formula| {max(devs):.2e} (<= 0.02; q=0 cases included)")


def test_criterion_06_two_source_structure(cloud):
    half = solved("c6a", im.build_state_model(sc.two_source_scene(cloud, 0.5, DELTA))).H
    cov_max = np.abs(half[:3, :3]).max()
    decoupled = float(np.abs(half[:3, 3:6]).max() / cov_max)
    p1 = 0.3
    scene = sc.two_source_scene(cloud, p1, DELTA)
    h = solved("c6b", im.build_state_model(scene)).H
    expected = 4 * (2 * p1 - 1) * im.generator_moments(scene).cov
    coupled = float(np.abs(h[:3, 3:6] / expected - 1).max())
    zero = 0.0
    for m in (half, h):
        # relative to the Cauchy-Schwarz bound sqrt(H_ii H_77)
        zero = max(zero, float((np.abs(m[:3, 6]) / np.sqrt(np.diag(m)[:3] * m[6, 6])).max()))
    ok = decoupled <= 1e-2 and coupled <= 0.02 and zero <= 1e-2
    record(6, ok, f"p1=1/2 cen-rel/Cov {decoupled:.1e} (<= 1e-2); p1=0.3 block vs (2p1-1)Cov {coupled:.1e} "
                  f"(<= 2e-2); (rel,p1) block {zero:.1e} (<= 1e-2)")


def test_criterion_07_radial_symmetry():
    ring = sc.ring_cloud()
    worst, closed = 0.0, 0.0
    for p1 in (0.5, 0.3):
        scene = sc.two_source_scene(ring, p1, DELTA)
        closed = max(closed, float(np.abs(cf.two_source_gamma(im.generator_moments(scene), p1, DELTA)).max()))
        rep = solved(f"c7 p1={p1}", im.build_state_model(scene))
        worst = max(worst, float(np.abs(rep.Gamma).max() / (np.abs(rep.H).max() * 1e-3)))
    record(7, closed == 0.0 and worst <= 1e-3,
           f"closed-form max|Gamma| = {closed!r} (== 0); max|Gamma|/(max|H| delta/z0) = {worst:.1e} (<= 1e-3)")


def test_criterion_08_scaling_exponents(cloud):
    h77, gam = [], []
    for dx in SWEEP:
        # single-parameter p1 model; at dx=1e-4 the 7-parameter basis hits a critical point
        scene = sc.two_source_scene(cloud, 0.3, [dx, 0, 0], estimate=(im.probability(0),))
        h77.append(solved(f"c8 H77 dx={dx:g}", im.build_state_model(scene)).H[0, 0])
        three = sc.three_source_scene(cloud, 1 / 3, 1 / 3, dx, k=sc.K_SWEEP)
        gam.append(abs(solved(f"c8 Gamma dx={dx:g}", im.build_state_model(three)).Gamma[0, 1]))
    s_h, s_g = slope(SWEEP, h77), slope(SWEEP, gam)
    record(8, abs(s_h - 2) <= 0.05 and s_g >= 2.5, f"H77 slope {s_h:.4f} (2 +- 0.05); Gamma slope {s_g:.3f} (>= 2.5)")


def test_criterion_09_lyapunov_residuals():
    # runs last in file order, after every SLD of criteria 1-8 has been collected
    expected = {"c3", "c6a", "c6b"}
    if not expected <= set(RESIDUALS):
        pytest.skip("run together with criteria 1-8")
    worst_key = max(RESIDUALS, key=RESIDUALS.get)
    record(9, RESIDUALS[worst_key] <= 1e-8,
           f"{len(RESIDUALS)} models, max residual/max|drho| {RESIDUALS[worst_key]:.2e} at {worst_key} (<= 1e-8)")


def test_criterion_10_degenerate_inputs(tmp_path, cloud):
    checks = []
    src = [im.Source(0.01, 0.0, 0.0), im.Source(0.02, 0.0, 0.0), im.Source(0.01, 0.0, 0.0)]
    try:
        im.build_state_model(im.ImagingScene(src, cloud, sc.K, sc.Z0))
        checks.append(("coincident sources", False))
    except RankDeficient as exc:
        checks.append(("coincident sources", exc.indices == (0, 2)))
    rng = np.random.default_rng(0)
    kets = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
    try:
        build_basis(np.column_stack([kets, kets[:, 0]]), 4)
        checks.append(("duplicated ket", False))
    except RankDeficient as exc:
        checks.append(("duplicated ket", set(exc.indices) == {0, 3}))
    moments = im.generator_moments(sc.two_source_scene(cloud, 0.3, DELTA))
    for p1 in (0.0, 1.0):
        try:
            cf.two_source_qfim(moments, p1, DELTA)
            checks.append((f"p1={p1}", False))
        except ZeroDivisionError:
            checks.append((f"p1={p1}", True))

    def scene_file(sources):
        doc = {"schema_version": 1, "scene": {"sources": sources, "collection_points": cloud.tolist(),
                                              "k": sc.K, "z0": sc.Z0, "estimate": ["two_source"]}}
        path = tmp_path / f"s{len(list(tmp_path.iterdir()))}.json"
        path.write_text(json.dumps(doc))
        return str(path)

    a = {"x": 0.011, "y": -0.02, "z": 0.005, "intensity": 0.3}
    b = {"x": 0.009, "y": -0.02, "z": 0.005, "intensity": 0.7}
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        codes = {
            "exit 0": cli.main(["compute", scene_file([a, b]), "-o", str(tmp_path / "r.json")]) == 0,
            "exit 2": cli.main(["compute", scene_file([a, a])]) == 2,
            "exit 3": cli.main(["compute", str(bad)]) == 3,
        }
    checks.extend(codes.items())
    failed = [name for name, ok in checks if not ok]
    record(10, not failed, f"{len(checks)} checks" + (f", failed: {failed}" if failed else " ok"))
