"""Command line front end.

    qfim compute scene.json [-o report.json]
    qfim verify
    qfim sweep scene.json --out DIR

Exit codes: 0 success, 1 numerical failure, 2 rank-deficient basis
(coincident sources or a critical point), 3 unreadable or malformed input.
"""

import argparse
import csv
import os
import sys
import warnings

import numpy as np

from . import closed_forms as cf
from . import core
from . import imaging as im
from . import linalg as la
from .basis import RANK_TOL
from .errors import QfimError, RankDeficient
from .scenefile import (
    Report,
    SceneFormatError,
    apply_sweep_value,
    load_scene_file,
    matrix_to_list,
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_RANK_DEFICIENT = 2
EXIT_PARSE_ERROR = 3


def default_rank_tol():
    env = os.environ.get("QFIM_RANK_TOL")
    if env:
        try:
            return float(env)
        except ValueError:
            raise SceneFormatError(f"QFIM_RANK_TOL={env!r} is not a number") from None
    return RANK_TOL


def closed_form_for(scene):
    """Lowest-order QFIM matching `scene`, or None when no formula applies."""
    names = [p.name for p in scene.estimate]
    pos = np.array([s.position for s in scene.sources])
    p = scene.probabilities
    moments = im.generator_moments(scene)
    if len(scene.sources) == 2 and names == [q.name for q in im.two_source_parameters()]:
        if p[0] in (0.0, 1.0):
            return None
        return cf.two_source_qfim(moments, p[0], (pos[0] - pos[1]) / 2)
    if len(scene.sources) == 3 and names == ["p1", "p2"]:
        steps = np.diff(pos, axis=0)
        if np.all(steps[:, 1:] == 0) and np.isclose(steps[0, 0], steps[1, 0]):
            try:
                return cf.three_source_intensity_qfim(moments, p[0], p[1], steps[0, 0])
            except ZeroDivisionError:
                return None
    return None


def compute_report(scene, rank_tol=RANK_TOL, solve_tol=la.SOLVE_TOL, compare_closed_form=False):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        model = im.build_state_model(scene, rank_tol)
        rep = core.qfim(model, solve_tol)
        comp = core.compatibility(model, report=rep)
        closed = closed_form_for(scene) if compare_closed_form else None
    labels = rep.names
    d = rep.diagnostics
    diagnostics = {
        "cond_C": [float(x) for x in d["cond_C"]],
        "cond_D": [float(x) for x in d["cond_D"]],
        "residuals": [float(x) for x in d["residual"]],
        "asymmetry": d["asymmetry"],
        "re_mismatch": d["re_mismatch"],
        "rank_tol": rank_tol,
        "solve_tol": solve_tol,
    }
    compat = {
        kind: {f"{a},{b}": flag for (a, b), flag in getattr(comp, kind).items()}
        for kind in ("commutation", "independence")
    }
    notes = [f"{w.category.__name__}: {w.message}" for w in caught]
    report = Report(labels, matrix_to_list(rep.H), matrix_to_list(rep.Gamma), diagnostics, compat, warnings=notes)
    if compare_closed_form:
        if closed is None:
            report.warnings.append("no closed form applies to this scene")
        else:
            dev = np.full(closed.shape, None, dtype=object)
            nz = closed != 0
            dev[nz] = (rep.H[nz] - closed[nz]) / np.abs(closed[nz])
            report.closed_form_H = matrix_to_list(closed)
            report.closed_form_deviation = matrix_to_list(dev)
    return report


def _tolerances(args, sf):
    rank_tol = args.rank_tol
    if rank_tol is None:
        rank_tol = sf.options.rank_tol if sf.options.rank_tol is not None else default_rank_tol()
    return rank_tol, args.solve_tol


def summary(report):
    n = len(report.labels)
    width = max(8, max(len(x) for x in report.labels))
    lines = ["H:", " " * width + "".join(f"{x:>13}" for x in report.labels)]
    for i in range(n):
        lines.append(f"{report.labels[i]:<{width}}" + "".join(f"{v:13.5g}" for v in report.H[i]))
    gmax = max((abs(v) for row in report.Gamma for v in row), default=0.0)
    lines.append(f"max|Gamma| = {gmax:.3e}")
    lines.append(f"max residual = {max(report.diagnostics['residuals'], default=0.0):.3e}")
    if report.closed_form_deviation is not None:
        devs = [abs(v) for row in report.closed_form_deviation for v in row if v is not None]
        lines.append(f"max deviation from closed form = {max(devs, default=0.0):.3e}")
    lines.extend(f"warning: {w}" for w in report.warnings)
    return "\n".join(lines)


def cmd_compute(args):
    sf = load_scene_file(args.scene)
    rank_tol, solve_tol = _tolerances(args, sf)
    report = compute_report(sf.scene, rank_tol, solve_tol, sf.options.compare_closed_form)
    text = report.dumps()
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(summary(report))
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args):
    from . import verify

    checks = verify.run_all()
    print(verify.format_table(checks))
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAILURE


def cmd_sweep(args):
    sf = load_scene_file(args.scene)
    sweep = sf.options.sweep
    if sweep is None:
        raise SceneFormatError("scene file has no options.sweep")
    rank_tol, solve_tol = _tolerances(args, sf)
    labels = [p.name for p in sf.scene.estimate]
    entries = sweep.entries or tuple((x, x) for x in labels)
    for a, b in entries:
        if a not in labels or b not in labels:
            raise SceneFormatError(f"sweep entry ({a}, {b}) is not an estimated parameter")
    os.makedirs(args.out, exist_ok=True)
    rows = []
    for i, value in enumerate(sweep.values):
        scene = apply_sweep_value(sf.scene, sweep.parameter, value)
        report = compute_report(scene, rank_tol, solve_tol, sf.options.compare_closed_form)
        with open(os.path.join(args.out, f"point_{i:03d}.json"), "w", encoding="utf-8") as fh:
            fh.write(report.dumps())
        h = report.H
        gmax = max((abs(v) for row in report.Gamma for v in row), default=0.0)
        rows.append([repr(value)] + [repr(h[labels.index(a)][labels.index(b)]) for a, b in entries] + [repr(gmax)])
    with open(os.path.join(args.out, "sweep.csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([sweep.parameter] + [f"H[{a},{b}]" for a, b in entries] + ["max_abs_Gamma"])
        w.writerows(rows)
    print(f"wrote {len(rows)} points to {args.out}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="qfim", description="Quantum Fisher information of point-source imaging scenes.")
    sub = parser.add_subparsers(dest="command", required=True)

    def tolerance_flags(p):
        p.add_argument("--rank-tol", type=float, default=None,
                       help=f"relative singular-value cutoff for basis independence (default {RANK_TOL:g}, "
                            "or QFIM_RANK_TOL, or the scene's options.rank_tol)")
        p.add_argument("--solve-tol", type=float, default=la.SOLVE_TOL,
                       help=f"smallest reciprocal condition number accepted by linear solves (default {la.SOLVE_TOL:g})")

    p = sub.add_parser("compute", help="QFIM, Gamma and diagnostics for one scene")
    p.add_argument("scene")
    p.add_argument("-o", "--output", help="write the JSON report here and print a summary")
    tolerance_flags(p)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("verify", help="run the built-in golden checks")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="evaluate a scene over options.sweep values")
    p.add_argument("scene")
    p.add_argument("--out", required=True, help="output directory")
    tolerance_flags(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except RankDeficient as exc:
        print(f"qfim: rank-deficient basis: {exc}", file=sys.stderr)
        return EXIT_RANK_DEFICIENT
    except (SceneFormatError, OSError) as exc:
        print(f"qfim: cannot read input: {exc}", file=sys.stderr)
        return EXIT_PARSE_ERROR
    except (QfimError, ZeroDivisionError, np.linalg.LinAlgError) as exc:
        print(f"qfim: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
