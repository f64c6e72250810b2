"""Compare the compiled and numpy kernels, and time a full QFIM evaluation.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from qfim import _kernels_py, core, synthetic
from qfim import imaging as im
from qfim import linalg as la
from qfim import scenarios as sc

try:
    from qfim import _kernels as _compiled
except ImportError:
    _compiled = None


def _cases(rng):
    out = {}
    for n in (4, 8, 16):
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        b = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        h = n // 2
        out[f"tracy_singh n={n}"] = lambda k, a=a, b=b, h=h: k.tracy_singh(a, h, h, b, h, h)
        out[f"vecb n={n}"] = lambda k, a=a, h=h: k.vecb(a, h, h)
        out[f"lyapunov_operator n={n}"] = lambda k, a=a: k.lyapunov_operator(a)
    return out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=200)
    args = parser.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"active backend: {la.BACKEND}")
    backends = [("python", _kernels_py)] + ([("cython", _compiled)] if _compiled else [])
    print(f"{'kernel':<26}" + "".join(f"{name:>14}" for name, _ in backends) + "   max|diff|")
    for label, fn in _cases(rng).items():
        times = [timeit.timeit(lambda: fn(k), number=args.repeat) / args.repeat for _, k in backends]
        results = [np.asarray(fn(k)) for _, k in backends]
        # complex products may round differently in C (fused multiply-add)
        diff = max((np.abs(results[0] - r).max() for r in results[1:]), default=0.0)
        print(f"{label:<26}" + "".join(f"{t * 1e6:12.1f}us" for t in times) + f"   {diff:.1e}")

    model = synthetic.random_state_model(rng, ambient_dim=6, support=4, nparams=3)
    t = timeit.timeit(lambda: core.qfim(model), number=20) / 20
    print(f"qfim, random 6-dim model: {t * 1e3:.2f} ms")
    scene = sc.two_source_scene(sc.random_cloud(), 0.3, 1e-3 * np.array([1.0, 0.5, 0.3]))
    t = timeit.timeit(lambda: core.qfim(im.build_state_model(scene)), number=5) / 5
    print(f"qfim, two-source 7-parameter scene: {t * 1e3:.2f} ms")


if __name__ == "__main__":
    main()
