"""Single photons from incoherent point sources sampled at discrete collection points.

The ambient space has one basis state per collection point ``(v_j, w_j)``.
A source at ``r = (x, y, z)`` produces the ket

    psi(r)_j = exp(-i (gx_j x + gy_j y + gz_j z)) / sqrt(Nc)

with the diagonal generators ``gx = k v / z0``, ``gy = k w / z0`` and
``gz = k (v^2 + w^2) / (2 z0^2)`` (phases to first order in the source
coordinates).  Sources add incoherently with probabilities proportional to
their intensities, so in the basis of source kets the state is
``diag(p)``.  The last source's probability is fixed by normalization and is
never a free parameter.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .basis import RANK_TOL, build_basis
from .core import ParameterSlot, StateModel
from .errors import ParaxialWarning, PreconditionError, RankDeficient

AXES = ("x", "y", "z")
PARAXIAL_LIMIT = 0.1


@dataclass(frozen=True)
class Source:
    x: float
    y: float
    z: float
    intensity: float = 1.0

    @property
    def position(self):
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class Param:
    """Parameter to estimate.

    ``kind`` is ``"position"`` or ``"probability"``.  For positions,
    ``terms`` holds ``(source, axis, coef)`` triples: the parameter moves
    coordinate `axis` of each listed source at rate `coef`.  For
    probabilities it holds the single source index whose probability is
    varied against the last source's.  Source indices are 0-based.
    """

    name: str
    kind: str
    terms: tuple

    def to_dict(self):
        if self.kind == "probability":
            return {"name": self.name, "kind": self.kind, "terms": list(self.terms)}
        return {"name": self.name, "kind": self.kind, "terms": [list(t) for t in self.terms]}

    @classmethod
    def from_dict(cls, d):
        kind = d["kind"]
        if kind == "position":
            terms = tuple((int(s), str(a), float(c)) for s, a, c in d["terms"])
            for _, a, _ in terms:
                if a not in AXES:
                    raise ValueError(f"unknown axis {a!r}")
        elif kind == "probability":
            terms = tuple(int(s) for s in d["terms"])
            if len(terms) != 1:
                raise ValueError("a probability parameter names exactly one source")
        else:
            raise ValueError(f"unknown parameter kind {kind!r}")
        return cls(str(d["name"]), kind, terms)


def position(source, axis):
    """Coordinate `axis` of one source, labelled e.g. ``x1`` for source 0."""
    return Param(f"{axis}{source + 1}", "position", ((source, axis, 1.0),))


def probability(source):
    """Relative intensity of `source`, traded against the last source."""
    return Param(f"p{source + 1}", "probability", (source,))


def relative(axis, a=0, b=1):
    """Half-difference ``(r_a - r_b) / 2`` of two sources along `axis`."""
    return Param(f"d{axis}", "position", ((a, axis, 1.0), (b, axis, -1.0)))


def centroid(axis, a=0, b=1):
    """Midpoint ``(r_a + r_b) / 2`` of two sources along `axis`."""
    return Param(f"c{axis}", "position", ((a, axis, 1.0), (b, axis, 1.0)))


def linear(name, terms):
    """Position parameter moving several coordinates at once."""
    return Param(name, "position", tuple((int(s), str(a), float(c)) for s, a, c in terms))


def two_source_parameters():
    """Relative coordinates, centroid coordinates, then ``p1``."""
    return tuple(relative(a) for a in AXES) + tuple(centroid(a) for a in AXES) + (probability(0),)


@dataclass(frozen=True, eq=False)
class ImagingScene:
    """Point sources, collection points and optical constants.

    Parameters
    ----------
    sources : sequence of Source
    collection_points : array_like, shape (Nc, 2)
        ``(v, w)`` positions in the collection plane.
    k : float
        Wavenumber.
    z0 : float
        Distance from the source plane to the collection plane.
    estimate : sequence of Param
        Parameters of interest, in output order.
    """

    sources: tuple
    collection_points: np.ndarray
    k: float
    z0: float
    estimate: tuple = ()
    probabilities: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "sources", tuple(self.sources))
        object.__setattr__(self, "estimate", tuple(self.estimate))
        pts = np.array(self.collection_points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise PreconditionError(f"collection points must have shape (Nc, 2), got {pts.shape}")
        if pts.shape[0] < 2:
            raise PreconditionError("need at least 2 collection points")
        if not self.sources:
            raise PreconditionError("need at least 1 source")
        if not (self.k > 0 and self.z0 > 0):
            raise PreconditionError("k and z0 must be positive")
        pts.setflags(write=False)
        object.__setattr__(self, "collection_points", pts)
        inten = np.array([s.intensity for s in self.sources], dtype=float)
        if np.any(inten < 0) or inten.sum() <= 0:
            raise PreconditionError("intensities must be nonnegative with a positive sum")
        p = inten / inten.sum()
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)
        for par in self.estimate:
            self._check_param(par)
        extent = max(np.abs(pts).max(), max(np.abs(s.position).max() for s in self.sources))
        if extent / self.z0 > PARAXIAL_LIMIT:
            warnings.warn(
                f"largest coordinate is {extent / self.z0:.3g} z0; the first-order phase model assumes "
                f"it is well below 1",
                ParaxialWarning,
                stacklevel=3,
            )

    def _check_param(self, par):
        ns = len(self.sources)
        if par.kind == "probability":
            (s,) = par.terms
            if not 0 <= s < ns - 1:
                raise PreconditionError(f"{par.name}: probability of source {s} is not a free parameter")
        else:
            for s, a, _ in par.terms:
                if not 0 <= s < ns:
                    raise PreconditionError(f"{par.name}: no source {s}")
                if a not in AXES:
                    raise PreconditionError(f"{par.name}: unknown axis {a!r}")

    @property
    def n_collection(self):
        return self.collection_points.shape[0]

    def with_sources(self, sources):
        return ImagingScene(sources, self.collection_points, self.k, self.z0, self.estimate)


@dataclass(frozen=True)
class GeneratorSet:
    """Diagonals of the commuting generators, one entry per collection point."""

    gx: np.ndarray
    gy: np.ndarray
    gz: np.ndarray

    def stacked(self):
        """``(Nc, 3)`` array with columns ``gx, gy, gz``."""
        return np.column_stack([self.gx, self.gy, self.gz])

    def axis(self, name):
        return {"x": self.gx, "y": self.gy, "z": self.gz}[name]

    def matrices(self):
        return [np.diag(g).astype(np.complex128) for g in (self.gx, self.gy, self.gz)]


def generators_from_points(points, k, z0):
    pts = np.asarray(points, dtype=float)
    v, w = pts[:, 0], pts[:, 1]
    return GeneratorSet(k * v / z0, k * w / z0, k * (v**2 + w**2) / (2 * z0**2))


def generators(scene):
    return generators_from_points(scene.collection_points, scene.k, scene.z0)


def reference_state(nc):
    """Uniform superposition over the collection points."""
    return np.full(nc, 1 / np.sqrt(nc), dtype=np.complex128)


def _ket(g, r):
    phase = g.stacked() @ np.asarray(r, dtype=float)
    return np.exp(-1j * phase) / np.sqrt(len(phase))


def source_ket(scene, s):
    return _ket(generators(scene), scene.sources[s].position)


def photon_state(scene):
    """Ambient density matrix ``sum_s p_s |psi_s><psi_s|``."""
    g = generators(scene)
    kets = np.column_stack([_ket(g, s.position) for s in scene.sources])
    return (kets * scene.probabilities) @ kets.conj().T


def _position_derivative(scene, g, kets, par):
    ext = []
    coeffs = []
    for s, a, c in par.terms:
        ext.append(-1j * g.axis(a) * kets[:, s])
        coeffs.append((s, c * scene.probabilities[s]))
    return np.column_stack(ext), coeffs


def derivative_kets(scene, par):
    """Extension kets and ambient derivative of the state for parameter `par`.

    Returns
    -------
    ext : ndarray, shape (Nc, e)
        ``d psi_s = -i g_axis psi_s`` for every term, in term order; empty for
        probabilities.
    drho : ndarray, shape (Nc, Nc)
    """
    scene._check_param(par)
    g = generators(scene)
    kets = np.column_stack([_ket(g, s.position) for s in scene.sources])
    if par.kind == "probability":
        (s,) = par.terms
        last = kets[:, -1]
        drho = np.outer(kets[:, s], kets[:, s].conj()) - np.outer(last, last.conj())
        return np.zeros((scene.n_collection, 0), dtype=np.complex128), drho
    ext, coeffs = _position_derivative(scene, g, kets, par)
    drho = np.zeros((scene.n_collection,) * 2, dtype=np.complex128)
    for t, (s, w) in enumerate(coeffs):
        term = w * np.outer(ext[:, t], kets[:, s].conj())
        drho += term + term.conj().T
    return ext, drho


def _check_coincident(scene, rank_tol):
    pos = np.array([s.position for s in scene.sources])
    for a in range(len(pos)):
        for b in range(a + 1, len(pos)):
            if np.linalg.norm(pos[a] - pos[b]) < rank_tol * scene.z0:
                raise RankDeficient(
                    (a, b), 0.0,
                    f"sources {a} and {b} coincide; merge them into one source with the summed intensity",
                )


def build_state_model(scene, rank_tol=RANK_TOL):
    """State model in the basis of source kets.

    Raises
    ------
    RankDeficient
        If sources coincide, or their kets are otherwise linearly dependent
        on the collection points, so the source-ket basis must be reduced.
    PreconditionError
        If a source has zero intensity.
    """
    _check_coincident(scene, rank_tol)
    p = scene.probabilities
    if np.any(p == 0):
        raise PreconditionError(f"sources {np.flatnonzero(p == 0).tolist()} have zero intensity; remove them")
    g = generators(scene)
    kets = np.column_stack([_ket(g, s.position) for s in scene.sources])
    basis = build_basis(kets, kets.shape[1], rank_tol)
    ns = kets.shape[1]
    slots = []
    for par in scene.estimate:
        scene._check_param(par)
        if par.kind == "probability":
            (s,) = par.terms
            d = np.zeros((ns, ns), dtype=np.complex128)
            d[s, s] = 1.0
            d[-1, -1] = -1.0
            slots.append(ParameterSlot(par.name, np.zeros((kets.shape[0], 0), dtype=np.complex128), d))
            continue
        ext, coeffs = _position_derivative(scene, g, kets, par)
        m = ext.shape[1]
        x = np.zeros((ns + m, ns + m), dtype=np.complex128)
        for t, (s, w) in enumerate(coeffs):
            x[ns + t, s] += w
            x[s, ns + t] += w
        slots.append(ParameterSlot.from_operator(par.name, basis, ext, x, rank_tol))
    return StateModel(basis, np.diag(p).astype(np.complex128), tuple(slots), rank_tol)


@dataclass(frozen=True, eq=False)
class GeneratorMoments:
    """Moments of the generators in the reference state.

    All expectations are plain averages over the collection points.

    Attributes
    ----------
    samples : ndarray, shape (Nc, 3)
        Generator eigenvalues ``(gx, gy, gz)`` at each collection point.
    """

    samples: np.ndarray

    @classmethod
    def from_points(cls, points, k, z0):
        return cls(generators_from_points(points, k, z0).stacked())

    @property
    def mean(self):
        # exactly rounded, so sign-symmetric clouds give an exact zero
        return np.array([math.fsum(col) for col in self.samples.T]) / len(self.samples)

    @property
    def centered(self):
        return self.samples - self.mean

    @property
    def cov(self):
        c = self.centered
        return c.T @ c / len(self.samples)

    @property
    def var(self):
        return np.diag(self.cov)

    def projection(self, delta):
        """``delta . g`` at each collection point."""
        return self.samples @ np.asarray(delta, dtype=float)

    def _centered_projection(self, delta):
        return self.centered @ np.asarray(delta, dtype=float)

    def _average(self, values):
        return np.array([math.fsum(col) for col in np.atleast_2d(values.T)]) / len(self.samples)

    def var_along(self, delta):
        """``Var(delta . g)``."""
        d = self._centered_projection(delta)
        return float(self._average(d**2)[0])

    def cross(self, delta):
        """``<g (delta . g)> - <g> <delta . g>``."""
        d = self._centered_projection(delta)
        return self._average(self.centered * d[:, None])

    def gamma23(self, delta):
        """Third-moment combination driving the two-source commutation matrix.

        ``2 [<g d^2> - <g><d^2> + 2 <g><d>^2 - 2 <g d><d>]`` with
        ``d = delta . g``, evaluated as the central co-moment
        ``2 <(g - <g>) (d - <d>)^2>``.
        """
        d = self._centered_projection(delta)
        return 2 * self._average(self.centered * (d**2)[:, None])


def generator_moments(scene):
    return GeneratorMoments(generators(scene).stacked())


def centroid_relative_jacobian(n_sources=2):
    """``d(x1, y1, z1, x2, y2, z2, p1) / d(dx, dy, dz, cx, cy, cz, p1)``.

    With ``r1 = c + d`` and ``r2 = c - d``.  Use with
    :func:`qfim.core.reparameterize` on a matrix in source-coordinate order.
    """
    if n_sources != 2:
        raise ValueError("centroid and relative coordinates are defined for two sources")
    jac = np.zeros((7, 7))
    for a in range(3):
        jac[a, a] = 1.0
        jac[3 + a, a] = -1.0
        jac[a, 3 + a] = 1.0
        jac[3 + a, 3 + a] = 1.0
    jac[6, 6] = 1.0
    return jac


def source_coordinate_parameters():
    """``x1, y1, z1, x2, y2, z2, p1``: the order matching :func:`centroid_relative_jacobian`."""
    return tuple(position(0, a) for a in AXES) + tuple(position(1, a) for a in AXES) + (probability(0),)
