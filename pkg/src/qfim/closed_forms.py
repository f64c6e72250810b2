"""Lowest-order analytic QFIMs for a few point-source problems.

Every function takes :class:`~qfim.imaging.GeneratorMoments` rather than a
scene, so the formulas can be checked on hand-made point clouds.

Two-source matrices use the parameter order
``(dx, dy, dz, cx, cy, cz, p1)`` with ``r1 = c + d`` and ``r2 = c - d``.
"""

import warnings

import numpy as np

from .errors import CriticalPointWarning


def _check_probability(p1):
    if p1 == 0 or p1 == 1:
        raise ZeroDivisionError(f"p1 = {p1}: the relative intensity is at the edge of its range")


def two_source_qfim(moments, p1, delta):
    """7x7 QFIM of two sources at half-separation `delta`.

    Raises
    ------
    ZeroDivisionError
        For ``p1`` in ``{0, 1}``.

    Warns
    -----
    CriticalPointWarning
        If ``Var(delta . g) = 0`` (e.g. ``delta = 0``); the ``(p1, p1)``
        entry is then 0.
    """
    _check_probability(p1)
    cov = moments.cov
    var = moments.var_along(delta)
    if var == 0:
        warnings.warn("Var(delta . g) = 0: relative intensity carries no information", CriticalPointWarning, stacklevel=2)
    cross = moments.cross(delta)
    h = np.zeros((7, 7))
    h[:3, :3] = cov
    h[3:6, 3:6] = cov
    h[:3, 3:6] = (2 * p1 - 1) * cov
    h[3:6, :3] = (2 * p1 - 1) * cov
    h[3:6, 6] = 2 * cross
    h[6, 3:6] = 2 * cross
    h[6, 6] = var / (p1 * (1 - p1))
    return 4 * h


def two_source_gamma(moments, p1, delta):
    """7x7 commutation matrix of two sources, antisymmetric.

    When ``Var(delta . g) = 0`` the centroid-relative block is set to its
    limit 0.
    """
    g23 = moments.gamma23(delta)
    var = moments.var_along(delta)
    cross = moments.cross(delta)
    g13 = (2 * p1 - 1) * g23
    if var == 0:
        g12 = np.zeros((3, 3))
    else:
        g12 = 2 * p1 * (p1 - 1) * np.outer(g23, cross) / var
    gam = np.zeros((7, 7))
    gam[3:6, :3] = g12
    gam[:3, 3:6] = -g12.T
    gam[:3, 6] = g23
    gam[6, :3] = -g23
    gam[3:6, 6] = g13
    gam[6, 3:6] = -g13
    return 4 * gam


def three_source_distance_qfi(moments, p2, axis=0):
    """QFI of the common spacing of three equally spaced collinear sources.

    `p2` is the probability of the middle source; `axis` indexes the
    direction of the line (0, 1, 2 for x, y, z).
    """
    return 4 * (1 - p2) * moments.var[axis]


def two_source_scaled_qfi(moments, q, p2, axis=0):
    """QFI of the separation ``s`` of two sources at ``c + s (q -+ 1/2)``.

    `q` fixes where the reference point sits on the line through the
    sources and `p2` is the probability of the second source.
    """
    return (1 + 4 * q**2 + 4 * q * (2 * p2 - 1)) * moments.var[axis]


def three_source_intensity_qfim(moments, p1, p2, delta_x, axis=0):
    """2x2 QFIM of ``(p1, p2)`` for three collinear sources spaced `delta_x` apart.

    Raises
    ------
    ZeroDivisionError
        Where ``(1 - p2)(4 p1 + p2) - 4 p1^2`` vanishes.
    """
    den = (1 - p2) * (4 * p1 + p2) - 4 * p1**2
    if den == 0:
        raise ZeroDivisionError(f"intensity QFIM is singular at p1={p1}, p2={p2}")
    off = 4 * (1 + 2 * p1 - p2)
    m = np.array([[16 * (1 - p2), off], [off, 1 + 8 * p1]])
    return delta_x**2 * moments.var[axis] / den * m
