"""Ready-made imaging scenes used by ``qfim verify`` and the test-suite.

Lengths are in units of ``z0 = 1``.  With ``k = 300`` collection points
within ``0.1`` of the axis give generator values up to about 30, so phase
shifts ``k v delta / z0`` stay near 0.03 for separations around ``1e-3``.

The wavenumber trades accuracy of the lowest-order formulas (small phases)
against conditioning of the source-ket basis (large phases): nearly
parallel source kets make the SLD coefficients large and their Lyapunov
residual grows roughly as the fourth inverse power of the phase.
``K_WIDE`` suits the three-source intensity and offset-pair problems at
separation ``1e-3``, ``K_SPACING`` the three-source spacing problem (its
derivative kets nearly lie in the span of the source kets), and ``K_SWEEP``
keeps three sources resolvable down to separation ``1e-4``.
"""

import numpy as np

from . import imaging as im

K = 300.0
K_WIDE = 1000.0
K_SPACING = 2000.0
K_SWEEP = 4000.0
Z0 = 1.0
APERTURE = 0.1
CENTROID = (0.01, -0.02, 0.005)


def random_cloud(seed=3, n=8, radius=APERTURE):
    """``n`` collection points uniform in a square of half-width `radius`."""
    rng = np.random.default_rng(seed)
    return rng.uniform(-radius, radius, size=(n, 2))


def symmetric_cloud(seed=3, n=6, radius=APERTURE):
    """Random cloud closed under ``(v, w) -> (-v, -w)``."""
    half = random_cloud(seed, n, radius)
    return np.vstack([half, -half])


_PYTHAGOREAN_25 = ((25, 0), (24, 7), (20, 15), (15, 20), (7, 24), (0, 25))


def ring_cloud(scale=1 / 256):
    """12 points on a circle of radius ``25 * scale``, closed under ``(v, w) -> (-v, -w)``.

    Built from integer triples with hypotenuse 25, so for a power-of-two
    `scale` every ``v**2 + w**2`` is the same float and ``gz`` is exactly
    constant over the cloud.
    """
    half = scale * np.array(_PYTHAGOREAN_25, dtype=float)
    return np.vstack([half, -half])


def two_source_scene(points, p1, delta, centroid=CENTROID, estimate=None, k=K):
    """Sources at ``centroid +- delta`` with probabilities ``p1, 1 - p1``."""
    c = np.asarray(centroid, dtype=float)
    d = np.asarray(delta, dtype=float)
    if estimate is None:
        estimate = im.two_source_parameters()
    return im.ImagingScene(
        (im.Source(*(c + d), intensity=p1), im.Source(*(c - d), intensity=1 - p1)),
        points, k, Z0, estimate,
    )


def three_source_scene(points, p1, p2, delta_x, centroid=CENTROID, estimate=None, k=K_WIDE):
    """Sources at ``centroid + (-delta_x, 0, +delta_x)`` along x with probabilities ``p1, p2, 1 - p1 - p2``."""
    c = np.asarray(centroid, dtype=float)
    step = np.array([delta_x, 0.0, 0.0])
    if estimate is None:
        estimate = (im.probability(0), im.probability(1))
    sources = (
        im.Source(*(c - step), intensity=p1),
        im.Source(*c, intensity=p2),
        im.Source(*(c + step), intensity=1 - p1 - p2),
    )
    return im.ImagingScene(sources, points, k, Z0, estimate)


def spacing_parameter():
    """Common spacing of three equally spaced sources along x."""
    return im.linear("spacing", [(0, "x", -1.0), (2, "x", 1.0)])


def offset_pair_scene(points, q, p2, separation, centroid=CENTROID, k=K_WIDE):
    """Two sources at ``c + separation (q - 1/2)`` and ``c + separation (q + 1/2)`` along x.

    Probabilities are ``1 - p2, p2``; the single parameter is the separation.
    """
    c = np.asarray(centroid, dtype=float)
    ex = np.array([1.0, 0.0, 0.0])
    par = im.linear("separation", [(0, "x", q - 0.5), (1, "x", q + 0.5)])
    sources = (
        im.Source(*(c + separation * (q - 0.5) * ex), intensity=1 - p2),
        im.Source(*(c + separation * (q + 0.5) * ex), intensity=p2),
    )
    return im.ImagingScene(sources, points, k, Z0, (par,))
