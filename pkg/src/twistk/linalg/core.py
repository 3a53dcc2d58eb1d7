"""Exact row reduction over Q and F_p with sparse row storage.

Rows are ``dict`` objects mapping column index to a nonzero field element.
Three elimination routes share one contract (canonical reduced echelon form):

* sparse Gauss-Jordan, for small inputs and incremental span bookkeeping;
* fraction-free integer Gauss-Jordan for small rational matrices;
* modular elimination (compiled kernel) for large inputs.  Over Q the modular
  result is lifted by CRT and rational reconstruction and then certified exactly
  before it is returned, so the answer never depends on a lucky prime.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt, lcm

import numpy as np
from sympy import prevprime

from ..errors import InternalConsistencyError
from ..fields import FieldSpec
from . import backend

# elementwise work above which the dense modular route is used
DENSE_THRESHOLD = 6000
# memory guard for dense conversion (number of int64 cells)
DENSE_CELL_LIMIT = 400_000_000


def _lift_primes(count: int) -> list:
    out, p = [], 2**31
    for _ in range(count):
        p = prevprime(p)
        out.append(p)
    return out


LIFT_PRIMES = _lift_primes(24)


def axpy(v: dict, w: dict, c, p: int) -> None:
    """In place ``v += c * w`` dropping zeros."""
    if p:
        for k, x in w.items():
            val = (v.get(k, 0) + c * x) % p
            if val:
                v[k] = val
            else:
                v.pop(k, None)
    else:
        for k, x in w.items():
            val = v.get(k, 0) + c * x
            if val:
                v[k] = val
            else:
                v.pop(k, None)


class Echelon:
    """Incrementally maintained reduced echelon basis of a row space."""

    __slots__ = ("field", "p", "rows")

    def __init__(self, field: FieldSpec):
        self.field = field
        self.p = field.p
        self.rows: dict = {}

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vec: dict) -> dict:
        v = dict(vec)
        rows = self.rows
        for c in [c for c in v if c in rows]:
            coef = v.get(c)
            if coef:
                axpy(v, rows[c], -coef, self.p)
        return v

    def add(self, vec: dict) -> bool:
        """Insert ``vec``; returns True when the rank grew."""
        v = self.reduce(vec)
        if not v:
            return False
        lead = min(v)
        inv = self.field.inv(v[lead])
        if self.p:
            v = {k: x * inv % self.p for k, x in v.items()}
        else:
            v = {k: x * inv for k, x in v.items()}
        for row in self.rows.values():
            coef = row.get(lead)
            if coef:
                axpy(row, v, -coef, self.p)
        self.rows[lead] = v
        return True

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)

    def echelon(self):
        pivots = sorted(self.rows)
        return [self.rows[c] for c in pivots], pivots


def _rref_sparse(rows, field):
    ech = Echelon(field)
    for r in rows:
        if r:
            ech.add(r)
    return ech.echelon()


def _integer_rows(rows) -> list:
    """Scale rational rows to primitive integer rows (same row space)."""
    out = []
    for r in rows:
        if not r:
            continue
        den = 1
        for x in r.values():
            den = lcm(den, Fraction(x).denominator)
        ir = {k: int(Fraction(x) * den) for k, x in r.items()}
        g = 0
        for x in ir.values():
            g = gcd(g, x)
        if g > 1:
            ir = {k: x // g for k, x in ir.items()}
        out.append(ir)
    return out


def _rref_bareiss(int_rows, ncols):
    """Fraction-free Gauss-Jordan on integer rows; exact divisions are asserted."""
    M = []
    for r in int_rows:
        dense = [0] * ncols
        for k, x in r.items():
            dense[k] = x
        M.append(dense)
    m = len(M)
    r = 0
    prev = 1
    pivots = []
    for c in range(ncols):
        if r == m:
            break
        piv = next((i for i in range(r, m) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        pr = M[r]
        a = pr[c]
        for i in range(m):
            if i == r:
                continue
            Mi = M[i]
            b = Mi[c]
            new = []
            for x, y in zip(Mi, pr):
                q, rem = divmod(a * x - b * y, prev)
                if rem:
                    raise InternalConsistencyError("inexact fraction-free division")
                new.append(q)
            M[i] = new
        prev = a
        pivots.append(c)
        r += 1
    out = []
    for k, c in enumerate(pivots):
        d = M[k][c]
        out.append({j: Fraction(x, d) for j, x in enumerate(M[k]) if x})
    return out, pivots


def _dense_mod(int_rows, ncols, p):
    M = np.zeros((len(int_rows), ncols), dtype=np.int64)
    I, J, V = [], [], []
    for i, r in enumerate(int_rows):
        for k, x in r.items():
            I.append(i)
            J.append(k)
            V.append(x % p)
    if I:
        M[np.asarray(I), np.asarray(J)] = np.asarray(V, dtype=np.int64)
    return M


def _echelon_from_dense(M, pivots):
    r = len(pivots)
    out = []
    for k in range(r):
        nz = np.flatnonzero(M[k])
        row = M[k]
        out.append({int(j): int(row[j]) for j in nz})
    return out


def _rref_modp_dense(rows, ncols, p):
    M = _dense_mod(rows, ncols, p)
    pivots = backend.rref_mod_p(M, p)
    return _echelon_from_dense(M, pivots), [int(c) for c in pivots]


def _ratrec(a: int, m: int):
    bound = isqrt(m // 2)
    r0, r1 = m, a % m
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    return Fraction(r1, s1)


def _free_part(M, pivots):
    """Residues of the echelon rows outside the pivot columns, keyed (row, col)."""
    r = len(pivots)
    sub = M[:r].copy()
    if r:
        sub[:, pivots] = 0
    ii, jj = np.nonzero(sub)
    vals = sub[ii, jj]
    return {(int(i), int(j)): int(v) for i, j, v in zip(ii, jj, vals)}


def _certify(int_rows, pivots, free_rows) -> bool:
    """Check that every input row lies in the span of the candidate echelon rows.

    Together with rank_Q >= rank_p this pins the candidate as the exact RREF.
    """
    where = {c: k for k, c in enumerate(pivots)}
    dens = [1] * len(pivots)
    for k, row in enumerate(free_rows):
        d = 1
        for x in row.values():
            d = lcm(d, x.denominator)
        dens[k] = d
    L = 1
    for d in dens:
        L = lcm(L, d)
    scaled = [{j: int(x * L) for j, x in row.items()} for row in free_rows]
    for row in int_rows:
        acc = {}
        for c, v in row.items():
            k = where.get(c)
            if k is None:
                acc[c] = acc.get(c, 0) + v * L
            else:
                for j, x in scaled[k].items():
                    acc[j] = acc.get(j, 0) - v * x
        for val in acc.values():
            if val:
                return False
    return True


def _rref_rational_modular(int_rows, ncols):
    best = None
    modulus = 1
    acc: dict = {}
    for p in LIFT_PRIMES:
        M = _dense_mod(int_rows, ncols, p)
        piv = [int(c) for c in backend.rref_mod_p(M, p)]
        res = _free_part(M, piv)
        if best is None or len(piv) > len(best) or (len(piv) == len(best) and piv < best):
            best, modulus, acc = piv, p, res
        elif piv == best:
            inv = pow(modulus, -1, p)
            merged = {}
            for key in acc.keys() | res.keys():
                a1 = acc.get(key, 0)
                a2 = res.get(key, 0)
                merged[key] = a1 + modulus * ((a2 - a1) * inv % p)
            modulus *= p
            acc = merged
        else:
            continue
        free_rows = [dict() for _ in best]
        ok = True
        for (i, j), v in acc.items():
            q = _ratrec(v, modulus)
            if q is None:
                ok = False
                break
            if q:
                free_rows[i][j] = q
        if not ok:
            continue
        if _certify(int_rows, best, free_rows):
            out = []
            for k, c in enumerate(best):
                row = {c: Fraction(1)}
                row.update(free_rows[k])
                out.append(row)
            return out, best
    return None


def rref_rows(rows, ncols: int, field: FieldSpec):
    """Canonical reduced echelon form of the span of ``rows``.

    Returns ``(echelon_rows, pivots)`` with pivots ascending and each echelon row
    normalised to 1 at its pivot and 0 at the other pivots.
    """
    rows = [r for r in rows if r]
    if not rows:
        return [], []
    work = len(rows) * ncols
    p = field.p
    if p:
        if work <= DENSE_THRESHOLD or work > DENSE_CELL_LIMIT:
            return _rref_sparse(rows, field)
        return _rref_modp_dense(rows, ncols, p)
    int_rows = _integer_rows(rows)
    if work <= DENSE_THRESHOLD // 4:
        return _rref_bareiss(int_rows, ncols)
    if work <= DENSE_CELL_LIMIT:
        res = _rref_rational_modular(int_rows, ncols)
        if res is not None:
            return res
    return _rref_sparse(rows, field)


def rank_rows(rows, ncols: int, field: FieldSpec) -> int:
    return len(rref_rows(rows, ncols, field)[1])


def kernel_from_echelon(echelon, pivots, ncols: int, field: FieldSpec) -> list:
    """Basis ``e_f - sum_k E[k, f] e_{pivot_k}`` indexed by the free columns ``f``."""
    piv = set(pivots)
    free = [f for f in range(ncols) if f not in piv]
    cols: dict = {f: {f: field.one} for f in free}
    p = field.p
    for c, row in zip(pivots, echelon):
        for f, x in row.items():
            if f != c:
                cols[f][c] = (-x) % p if p else -x
    return [cols[f] for f in free]
