"""Bigraded ``Tor^A(k, k)`` of a truncated connected graded algebra.

Two methods share one answer:

* ``bar``: homology of the reduced bar complex, exact ranks per internal degree;
* ``resolution``: a minimal graded free resolution of ``k`` by left modules,
  counting new generators per bidegree.  Much smaller than the bar complex.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct
from typing import Optional

from .algebra import TruncatedAlgebra
from .errors import BoundError, PreconditionError
from .linalg import Echelon, ExactMatrix, rank_and_kernel, rref_rows
from .twisting import add_into

# above this many bar cells the resolution method is used by default
BAR_LIMIT = 6000


@dataclass(frozen=True)
class TorTable:
    entries: dict
    i_max: int
    j_max: int
    method: str = "bar"

    def get(self, i: int, j: int) -> int:
        return self.entries.get((i, j), 0)

    def first_off_diagonal(self) -> Optional[tuple]:
        for j in range(self.j_max + 1):
            for i in range(self.i_max + 1):
                if i != j and self.get(i, j):
                    return (i, j)
        return None

    def nonzero(self) -> dict:
        return {k: v for k, v in sorted(self.entries.items()) if v}

    def diagonal(self) -> list:
        return [self.get(i, i) for i in range(min(self.i_max, self.j_max) + 1)]

    def as_rows(self) -> list:
        """Rows indexed by ``i``, columns by ``j``."""
        return [[self.get(i, j) for j in range(self.j_max + 1)] for i in range(self.i_max + 1)]


def _check_bounds(alg: TruncatedAlgebra, i_max: int, j_max: int) -> None:
    if j_max > alg.top_degree:
        raise BoundError(f"internal degree {j_max} exceeds truncation {alg.top_degree}")
    if i_max < 0 or j_max < 0:
        raise PreconditionError("bounds must be nonnegative")


def bar_size(alg: TruncatedAlgebra, i_max: int, j_max: int) -> int:
    """Total dimension of the bar terms needed for ``bar_tor_table``."""
    dims = [alg.dim(n) for n in range(j_max + 1)]
    c = [[0] * (j_max + 1) for _ in range(i_max + 2)]
    c[0][0] = 1
    for i in range(1, i_max + 2):
        for j in range(1, j_max + 1):
            c[i][j] = sum(dims[d] * c[i - 1][j - d] for d in range(1, j + 1))
    return sum(map(sum, c))


def _compositions(j: int, i: int):
    if i == 0:
        if j == 0:
            yield ()
        return
    for first in range(1, j - i + 2):
        for rest in _compositions(j - first, i - 1):
            yield (first,) + rest


def _bar_basis(alg: TruncatedAlgebra, i: int, j: int) -> list:
    out = []
    for comp in _compositions(j, i):
        out.extend(iproduct(*(alg.basis(d) for d in comp)))
    return out


def _bar_rank(alg: TruncatedAlgebra, i: int, j: int) -> int:
    """Rank of the bar differential ``B_{i,j} -> B_{i-1,j}``."""
    if i < 2 or j < i:
        return 0
    src = _bar_basis(alg, i, j)
    tgt = {t: k for k, t in enumerate(_bar_basis(alg, i - 1, j))}
    p = alg.field.p
    rows = []
    for t in src:
        row: dict = {}
        for k in range(i - 1):
            sign = -1 if k % 2 == 0 else 1
            for w, c in alg.mul_words(t[k], t[k + 1]).items():
                add_into(row, tgt[t[:k] + (w,) + t[k + 2:]], sign * c, p)
        if row:
            rows.append(row)
    return len(rref_rows(rows, len(tgt), alg.field)[1])


def bar_tor_table(alg: TruncatedAlgebra, i_max: int, j_max: int) -> TorTable:
    _check_bounds(alg, i_max, j_max)
    entries = {(0, 0): 1}
    for j in range(1, j_max + 1):
        ranks = {i: _bar_rank(alg, i, j) for i in range(2, min(i_max + 1, j) + 1)}
        for i in range(1, min(i_max, j) + 1):
            dim = len(_bar_basis(alg, i, j))
            entries[(i, j)] = dim - ranks.get(i, 0) - ranks.get(i + 1, 0)
    return TorTable(entries, i_max, j_max, "bar")


def _left_mult(alg: TruncatedAlgebra, w, elem: dict, p: int) -> dict:
    out: dict = {}
    for (g, u), c in elem.items():
        for v, c2 in alg.mul_words(w, u).items():
            add_into(out, (g, v), c * c2, p)
    return out


def _module_basis(alg: TruncatedAlgebra, gens: list, j: int) -> list:
    return [(g, w) for g, (d, _) in enumerate(gens) if d <= j for w in alg.basis(j - d)]


def resolution_tor_table(alg: TruncatedAlgebra, i_max: int, j_max: int) -> TorTable:
    """Generators of a minimal free resolution of ``k``, counted by bidegree."""
    _check_bounds(alg, i_max, j_max)
    F = alg.field
    p = F.p
    entries = {(0, 0): 1}
    # gens[i] lists (degree, image in P_{i-1}) for the free generators of P_i
    gens: dict = {0: [(0, None)]}
    for i in range(1, i_max + 1):
        gens[i] = []
        prev = gens[i - 1]
        for j in range(i, j_max + 1):
            src = _module_basis(alg, prev, j)
            sidx = {k: n for n, k in enumerate(src)}
            if i == 1:
                kernel = [{n: F.one} for n in range(len(src))]
            else:
                tgt = {k: n for n, k in enumerate(_module_basis(alg, gens[i - 2], j))}
                cols = []
                for g, w in src:
                    img = _left_mult(alg, w, prev[g][1], p)
                    cols.append({tgt[k]: c for k, c in img.items()})
                M = ExactMatrix.from_columns(F, len(tgt), cols)
                _, ker = rank_and_kernel(M)
                kernel = [{n: c for n, c in enumerate(v) if c} for v in ker]
            ech = Echelon(F)
            for g, (d, img) in enumerate(gens[i]):
                for w in alg.basis(j - d):
                    vec = _left_mult(alg, w, img, p)
                    ech.add({sidx[k]: c for k, c in vec.items()})
            new = 0
            for v in kernel:
                if ech.add(v):
                    gens[i].append((j, {src[n]: c for n, c in v.items()}))
                    new += 1
            entries[(i, j)] = new
    return TorTable(entries, i_max, j_max, "resolution")


def tor_table(alg: TruncatedAlgebra, i_max: int, j_max: int, method: str = "auto") -> TorTable:
    if method == "auto":
        method = "bar" if bar_size(alg, i_max, j_max) <= BAR_LIMIT else "resolution"
    if method == "bar":
        return bar_tor_table(alg, i_max, j_max)
    if method == "resolution":
        return resolution_tor_table(alg, i_max, j_max)
    raise PreconditionError(f"unknown Tor method {method!r}")
