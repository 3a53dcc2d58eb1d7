"""Numpy reference implementation of the modular row reduction kernel."""
import numpy as np


def rref_mod_p(M: np.ndarray, p: int) -> list:
    """Reduce ``M`` (int64, entries in [0, p)) in place to reduced echelon form.

    Returns the pivot columns; the first ``len(pivots)`` rows hold the echelon basis.
    """
    nr, nc = M.shape
    r = 0
    pivots = []
    for c in range(nc):
        if r == nr:
            break
        nz = np.flatnonzero(M[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            M[[r, piv], c:] = M[[piv, r], c:]
        inv = pow(int(M[r, c]), p - 2, p)
        M[r, c:] = M[r, c:] * inv % p
        cols = np.flatnonzero(M[r, c:]) + c
        rows = np.flatnonzero(M[:, c])
        rows = rows[rows != r]
        if rows.size:
            block = np.ix_(rows, cols)
            M[block] = (M[block] - M[rows, c][:, None] * M[r, cols][None, :]) % p
        pivots.append(c)
        r += 1
    return pivots
