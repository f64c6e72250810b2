"""JSON scene and report files.

A scene file looks like::

    {
      "schema_version": 1,
      "scene": {
        "sources": [{"x": 0.011, "y": -0.0195, "z": 0.0053, "intensity": 0.3}, ...],
        "collection_points": [[0.05, -0.02], ...],
        "k": 300.0,
        "z0": 1.0,
        "estimate": ["dx", "dy", "dz", "cx", "cy", "cz", "p1"]
      },
      "options": {
        "rank_tol": 1e-10,
        "compare_closed_form": true,
        "sweep": {"parameter": "separation.x", "values": [1e-4, 3e-4, 1e-3]}
      }
    }

Estimated parameters are labels (``x1``, ``p2``, ``dx``, ``cz``; source
numbers are 1-based) or explicit objects
``{"name": ..., "kind": "position", "terms": [[source, axis, coef], ...]}``
with 0-based source indices.  The ``"two_source"`` shorthand expands to the
seven relative, centroid and intensity parameters.

Sweep parameters are ``sources[i].x`` (any source field, 0-based ``i``) or
``separation.<axis>``, which places the sources at ``m + value * (i - (n - 1) / 2)``
along the axis around their current mean ``m``.
"""

import json
import math
import re
from dataclasses import dataclass, field, replace

import numpy as np

from . import imaging as im

SCHEMA_VERSION = 1


class SceneFormatError(ValueError):
    """Scene or report file does not follow the schema."""


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple
    entries: tuple = ()


@dataclass(frozen=True)
class SceneOptions:
    rank_tol: float = None
    compare_closed_form: bool = False
    sweep: SweepSpec = None


@dataclass(frozen=True)
class SceneFile:
    scene: object
    options: SceneOptions = field(default_factory=SceneOptions)


_LABELS = (
    (re.compile(r"^([xyz])(\d+)$"), lambda m: im.position(int(m[2]) - 1, m[1])),
    (re.compile(r"^p(\d+)$"), lambda m: im.probability(int(m[1]) - 1)),
    (re.compile(r"^d([xyz])$"), lambda m: im.relative(m[1])),
    (re.compile(r"^c([xyz])$"), lambda m: im.centroid(m[1])),
)


def parse_param(item):
    if isinstance(item, dict):
        try:
            return im.Param.from_dict(item)
        except (KeyError, TypeError, ValueError) as exc:
            raise SceneFormatError(f"bad parameter {item!r}: {exc}") from exc
    if isinstance(item, str):
        for pattern, build in _LABELS:
            m = pattern.match(item)
            if m:
                par = build(m)
                if par.kind == "position" and any(s < 0 for s, _, _ in par.terms):
                    break
                if par.kind == "probability" and par.terms[0] < 0:
                    break
                return par
    raise SceneFormatError(f"unknown parameter {item!r}")


def parse_estimate(items):
    out = []
    for item in items:
        if item == "two_source":
            out.extend(im.two_source_parameters())
        else:
            out.append(parse_param(item))
    return tuple(out)


def _number(d, key, default=None):
    if key not in d:
        if default is None:
            raise SceneFormatError(f"missing field {key!r}")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise SceneFormatError(f"field {key!r} must be a finite number, got {v!r}")
    return float(v)


def scene_from_dict(d):
    try:
        sources = tuple(
            im.Source(_number(s, "x"), _number(s, "y"), _number(s, "z"), _number(s, "intensity", 1.0))
            for s in d["sources"]
        )
        points = np.array(d["collection_points"], dtype=float)
        estimate = parse_estimate(d.get("estimate", []))
        k = _number(d, "k")
        z0 = _number(d, "z0")
    except SceneFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise SceneFormatError(f"bad scene: {exc}") from exc
    try:
        return im.ImagingScene(sources, points, k, z0, estimate)
    except ValueError as exc:
        raise SceneFormatError(str(exc)) from exc


def scene_to_dict(scene):
    return {
        "sources": [{"x": s.x, "y": s.y, "z": s.z, "intensity": s.intensity} for s in scene.sources],
        "collection_points": scene.collection_points.tolist(),
        "k": scene.k,
        "z0": scene.z0,
        "estimate": [p.to_dict() for p in scene.estimate],
    }


def parse_scene_file(text):
    """Parse scene-file JSON text into a :class:`SceneFile`.

    Raises
    ------
    SceneFormatError
    """
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(d, dict):
        raise SceneFormatError("scene file must hold a JSON object")
    if d.get("schema_version") != SCHEMA_VERSION:
        raise SceneFormatError(f"schema_version must be {SCHEMA_VERSION}, got {d.get('schema_version')!r}")
    if "scene" not in d:
        raise SceneFormatError("missing field 'scene'")
    scene = scene_from_dict(d["scene"])
    opts = d.get("options", {})
    if not isinstance(opts, dict):
        raise SceneFormatError("options must be an object")
    sweep = None
    if opts.get("sweep") is not None:
        sw = opts["sweep"]
        try:
            values = tuple(float(v) for v in sw["values"])
            entries = tuple(tuple(str(x) for x in e) for e in sw.get("entries", ()))
            sweep = SweepSpec(str(sw["parameter"]), values, entries)
        except (KeyError, TypeError, ValueError) as exc:
            raise SceneFormatError(f"bad sweep: {exc}") from exc
        if any(len(e) != 2 for e in entries):
            raise SceneFormatError("sweep entries must be label pairs")
        check_sweep_parameter(scene, sweep.parameter)
    rank_tol = opts.get("rank_tol")
    if rank_tol is not None:
        rank_tol = _number(opts, "rank_tol")
    options = SceneOptions(rank_tol, bool(opts.get("compare_closed_form", False)), sweep)
    return SceneFile(scene, options)


def load_scene_file(path):
    with open(path, encoding="utf-8") as fh:
        return parse_scene_file(fh.read())


def scene_file_to_dict(sf):
    opts = {"compare_closed_form": sf.options.compare_closed_form}
    if sf.options.rank_tol is not None:
        opts["rank_tol"] = sf.options.rank_tol
    if sf.options.sweep is not None:
        sw = sf.options.sweep
        opts["sweep"] = {"parameter": sw.parameter, "values": list(sw.values), "entries": [list(e) for e in sw.entries]}
    return {"schema_version": SCHEMA_VERSION, "scene": scene_to_dict(sf.scene), "options": opts}


_SOURCE_FIELD = re.compile(r"^sources\[(\d+)\]\.(x|y|z|intensity)$")
_SEPARATION = re.compile(r"^separation\.([xyz])$")


def check_sweep_parameter(scene, name):
    m = _SOURCE_FIELD.match(name)
    if m:
        if int(m[1]) >= len(scene.sources):
            raise SceneFormatError(f"sweep parameter {name!r}: no such source")
        return
    if _SEPARATION.match(name):
        return
    raise SceneFormatError(f"unknown sweep parameter {name!r}")


def apply_sweep_value(scene, name, value):
    """Copy of `scene` with the swept quantity set to `value`."""
    m = _SOURCE_FIELD.match(name)
    if m:
        i, attr = int(m[1]), m[2]
        sources = list(scene.sources)
        sources[i] = replace(sources[i], **{attr: float(value)})
        return scene.with_sources(sources)
    m = _SEPARATION.match(name)
    if m:
        axis = m[1]
        n = len(scene.sources)
        mid = np.mean([getattr(s, axis) for s in scene.sources])
        sources = [replace(s, **{axis: float(mid + value * (i - (n - 1) / 2))}) for i, s in enumerate(scene.sources)]
        return scene.with_sources(sources)
    raise SceneFormatError(f"unknown sweep parameter {name!r}")


@dataclass
class Report:
    """Machine-readable result of ``qfim compute``.

    Matrices are nested lists in row-major order; ``None`` marks an entry
    without a value (e.g. a relative deviation from a zero closed-form
    entry).
    """

    labels: list
    H: list
    Gamma: list
    diagnostics: dict
    compatibility: dict = field(default_factory=dict)
    closed_form_H: list = None
    closed_form_deviation: list = None
    warnings: list = field(default_factory=list)

    def to_dict(self):
        d = {
            "schema_version": SCHEMA_VERSION,
            "labels": list(self.labels),
            "H": self.H,
            "Gamma": self.Gamma,
            "diagnostics": self.diagnostics,
            "compatibility": self.compatibility,
            "warnings": list(self.warnings),
        }
        if self.closed_form_H is not None:
            d["closed_form_H"] = self.closed_form_H
            d["closed_form_deviation"] = self.closed_form_deviation
        return d

    @classmethod
    def from_dict(cls, d):
        if d.get("schema_version") != SCHEMA_VERSION:
            raise SceneFormatError(f"report schema_version must be {SCHEMA_VERSION}")
        try:
            rep = cls(
                labels=list(d["labels"]),
                H=d["H"],
                Gamma=d["Gamma"],
                diagnostics=d["diagnostics"],
                compatibility=d.get("compatibility", {}),
                closed_form_H=d.get("closed_form_H"),
                closed_form_deviation=d.get("closed_form_deviation"),
                warnings=list(d.get("warnings", [])),
            )
        except KeyError as exc:
            raise SceneFormatError(f"report is missing {exc}") from exc
        n = len(rep.labels)
        for name in ("H", "Gamma"):
            m = getattr(rep, name)
            if len(m) != n or any(len(row) != n for row in m):
                raise SceneFormatError(f"report {name} is not {n}x{n}")
        return rep

    def dumps(self):
        # json uses repr for floats, the shortest string that round-trips
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def loads(cls, text):
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise SceneFormatError(f"invalid JSON: {exc}") from exc


def matrix_to_list(m):
    return [[None if v is None else float(v) for v in row] for row in np.asarray(m, dtype=object)]
