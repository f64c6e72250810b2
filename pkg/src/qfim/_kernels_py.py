"""Pure-numpy versions of the index-shuffling kernels.

Same signatures and results as the compiled ``_kernels`` module; used when
the extension is not built or when ``QFIM_PURE_PYTHON`` is set.
All inputs are complex128 arrays; splits are already validated.
"""

import numpy as np


def _blocks(m, rs, cs):
    return ((m[:rs, :cs], m[:rs, cs:]), (m[rs:, :cs], m[rs:, cs:]))


def kron(a, b):
    return np.kron(a, b)


def tracy_singh(a, ra, ca, b, rb, cb):
    ab = _blocks(a, ra, ca)
    bb = _blocks(b, rb, cb)
    rows = []
    for i in range(2):
        for k in range(2):
            row = []
            for j in range(2):
                for l in range(2):
                    row.append(np.kron(ab[i][j], bb[k][l]))
            rows.append(row)
    out = np.block(rows)
    return out.reshape(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1])


def vecb(m, rs, cs):
    parts = [m[:rs, :cs], m[rs:, :cs], m[:rs, cs:], m[rs:, cs:]]
    return np.concatenate([p.reshape(-1, order="F") for p in parts])


def unvecb(v, nrows, ncols, rs, cs):
    out = np.empty((nrows, ncols), dtype=np.complex128, order="F")
    shapes = [
        (slice(0, rs), slice(0, cs)),
        (slice(rs, nrows), slice(0, cs)),
        (slice(0, rs), slice(cs, ncols)),
        (slice(rs, nrows), slice(cs, ncols)),
    ]
    pos = 0
    for rsl, csl in shapes:
        nr = rsl.stop - rsl.start
        nc = csl.stop - csl.start
        out[rsl, csl] = v[pos:pos + nr * nc].reshape((nr, nc), order="F")
        pos += nr * nc
    return out


def lyapunov_operator(c):
    n = c.shape[0]
    eye = np.eye(n, dtype=np.complex128)
    return np.kron(eye, c) + np.kron(c.conj(), eye)
