# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled modular row reduction; same contract as the numpy reference."""
from libc.stdlib cimport malloc, free


cdef long long _inv_mod(long long a, long long p):
    cdef long long t = 0, nt = 1, r = p, nr = a % p, q, tmp
    while nr != 0:
        q = r // nr
        tmp = t - q * nt
        t = nt
        nt = tmp
        tmp = r - q * nr
        r = nr
        nr = tmp
    if t < 0:
        t += p
    return t


def rref_mod_p(long long[:, ::1] M, long long p):
    cdef Py_ssize_t nr = M.shape[0], nc = M.shape[1]
    cdef Py_ssize_t r = 0, c, i, k, t, piv, nnz
    cdef long long inv, f, v
    cdef Py_ssize_t* nzc = <Py_ssize_t*> malloc((nc + 1) * sizeof(Py_ssize_t))
    pivots = []
    try:
        for c in range(nc):
            if r == nr:
                break
            piv = -1
            for i in range(r, nr):
                if M[i, c] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != r:
                for k in range(c, nc):
                    v = M[r, k]
                    M[r, k] = M[piv, k]
                    M[piv, k] = v
            inv = _inv_mod(M[r, c], p)
            nnz = 0
            for k in range(c, nc):
                v = M[r, k]
                if v != 0:
                    M[r, k] = (v * inv) % p
                    nzc[nnz] = k
                    nnz += 1
            for i in range(nr):
                if i == r:
                    continue
                f = M[i, c]
                if f == 0:
                    continue
                f = p - f
                for t in range(nnz):
                    k = nzc[t]
                    M[i, k] = (M[i, k] + f * M[r, k]) % p
            pivots.append(c)
            r += 1
    finally:
        free(nzc)
    return pivots
