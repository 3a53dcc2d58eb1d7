"""Matrix type and the public linear-algebra operations."""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

from ..errors import StructuralError
from ..fields import QQ, FieldSpec
from .core import Echelon, kernel_from_echelon, rref_rows


class ExactMatrix:
    """An ``nrows x ncols`` matrix over a FieldSpec, stored as sparse rows.

    Instances are treated as immutable; accessors return copies.
    """

    __slots__ = ("field", "nrows", "ncols", "_rows")

    def __init__(self, field: FieldSpec, nrows: int, ncols: int, rows=None):
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        if rows is None:
            rows = [dict() for _ in range(nrows)]
        if len(rows) != nrows:
            raise StructuralError("row count does not match shape")
        clean = []
        for r in rows:
            d = {}
            for j, x in r.items():
                if not 0 <= j < ncols:
                    raise StructuralError(f"column {j} out of range")
                x = field(x)
                if x:
                    d[j] = x
            clean.append(d)
        self._rows = clean

    @classmethod
    def from_dense(cls, field: FieldSpec, data: Sequence[Sequence], ncols: Optional[int] = None):
        data = [list(r) for r in data]
        if ncols is None:
            ncols = len(data[0]) if data else 0
        if any(len(r) != ncols for r in data):
            raise StructuralError("ragged matrix")
        return cls(field, len(data), ncols, [{j: x for j, x in enumerate(r) if x} for r in data])

    @classmethod
    def from_columns(cls, field: FieldSpec, nrows: int, columns: Sequence[dict]):
        rows = [dict() for _ in range(nrows)]
        for j, col in enumerate(columns):
            for i, x in col.items():
                rows[i][j] = x
        return cls(field, nrows, len(columns), rows)

    @classmethod
    def identity(cls, field: FieldSpec, n: int):
        return cls(field, n, n, [{i: 1} for i in range(n)])

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def row(self, i: int) -> dict:
        return dict(self._rows[i])

    def sparse_rows(self) -> list:
        return [dict(r) for r in self._rows]

    def sparse_columns(self) -> list:
        cols = [dict() for _ in range(self.ncols)]
        for i, r in enumerate(self._rows):
            for j, x in r.items():
                cols[j][i] = x
        return cols

    def entry(self, i: int, j: int):
        return self._rows[i].get(j, self.field.zero)

    def to_dense(self) -> list:
        z = self.field.zero
        return [[r.get(j, z) for j in range(self.ncols)] for r in self._rows]

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.field, self.ncols, self.nrows, self.sparse_columns())

    def apply(self, vec: Sequence) -> list:
        """Matrix times a dense column vector."""
        if len(vec) != self.ncols:
            raise StructuralError("vector length does not match column count")
        F = self.field
        out = []
        for r in self._rows:
            s = F.zero
            for j, x in r.items():
                s += x * vec[j]
            out.append(F.norm(s))
        return out

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.ncols != other.nrows or self.field != other.field:
            raise StructuralError("incompatible product")
        p = self.field.p
        out = []
        for r in self._rows:
            acc: dict = {}
            for k, x in r.items():
                for j, y in other._rows[k].items():
                    acc[j] = acc.get(j, 0) + x * y
            out.append({j: v for j, v in acc.items() if (v % p if p else v)})
        return ExactMatrix(self.field, self.nrows, other.ncols, out)

    def __eq__(self, other):
        return (
            isinstance(other, ExactMatrix)
            and self.field == other.field
            and self.shape == other.shape
            and self._rows == other._rows
        )

    def is_zero(self) -> bool:
        return not any(self._rows)

    def __repr__(self):
        return f"ExactMatrix({self.field}, {self.nrows}x{self.ncols})"


def _dense_vec(sparse: dict, n: int, field: FieldSpec) -> tuple:
    z = field.zero
    return tuple(sparse.get(j, z) for j in range(n))


def rank_and_kernel(M: ExactMatrix):
    """Rank and the reduced echelon basis of the right kernel of ``M``."""
    E, piv = rref_rows(M.sparse_rows(), M.ncols, M.field)
    ker = kernel_from_echelon(E, piv, M.ncols, M.field)
    kE, _ = rref_rows(ker, M.ncols, M.field)
    return len(piv), [_dense_vec(v, M.ncols, M.field) for v in kE]


@dataclass(frozen=True)
class SolveOutcome:
    """Result of solving ``F . D = R`` for ``F``.

    ``cokernel_basis`` spans the functionals vanishing on the image of ``D``;
    adding any matrix whose rows lie in that span gives another solution.
    On inconsistency ``witness`` is a kernel vector ``v`` of ``D`` with ``R v != 0``.
    """

    consistent: bool
    particular: Optional[ExactMatrix] = None
    cokernel_basis: list = dc_field(default_factory=list)
    witness: Optional[tuple] = None

    @property
    def unique(self) -> bool:
        return self.consistent and not self.cokernel_basis


def solve_pairs(pairs, n: int, q: int, field: FieldSpec):
    """Core of ``solve_left_factor`` on sparse data.

    ``pairs`` lists ``(D column, R column)`` for each domain vector, with D columns
    in ``range(n)`` and R columns in ``range(q)``.  Returns
    ``(consistent, values, free)`` where ``values[x]`` is the image of the x-th
    basis vector under the canonical solution (absent means zero) and ``free``
    lists the non-pivot coordinates of the target of ``D``.
    """
    rows = []
    for dcol, rcol in pairs:
        row = dict(dcol)
        for l, x in rcol.items():
            row[n + l] = x
        if row:
            rows.append(row)
    E, piv = rref_rows(rows, n + q, field)
    if piv and piv[-1] >= n:
        return False, None, None
    values = {}
    for c, row in zip(piv, E):
        img = {j - n: x for j, x in row.items() if j >= n}
        if img:
            values[c] = img
    pset = set(piv)
    free = [x for x in range(n) if x not in pset]
    return True, values, free


def solve_left_factor(D: ExactMatrix, R: ExactMatrix) -> SolveOutcome:
    """Solve ``F . D = R`` where ``D: k^m -> k^n`` and ``R: k^m -> k^q``."""
    if D.ncols != R.ncols:
        raise StructuralError(f"domains differ: {D.ncols} vs {R.ncols}")
    if D.field != R.field:
        raise StructuralError("fields differ")
    F = D.field
    n, q = D.nrows, R.nrows
    pairs = list(zip(D.sparse_columns(), R.sparse_columns()))
    ok, values, free = solve_pairs(pairs, n, q, F)
    if not ok:
        _, ker = rank_and_kernel(D)
        witness = next(v for v in ker if any(R.apply(v)))
        return SolveOutcome(False, witness=witness)
    rows = [dict() for _ in range(q)]
    for x, img in values.items():
        for l, val in img.items():
            rows[l][x] = val
    particular = ExactMatrix(F, q, n, rows)
    _, coker = rank_and_kernel(D.transpose())
    return SolveOutcome(True, particular, coker)


def complement_basis(subspace_basis: Sequence[Sequence], ambient_dim: int, ordering=None, field: FieldSpec = QQ) -> list:
    """Standard basis vectors completing ``subspace_basis``, admitted greedily by priority."""
    vecs = [list(v) for v in subspace_basis]
    if any(len(v) != ambient_dim for v in vecs):
        raise StructuralError("vector length does not match ambient dimension")
    rows = [{j: field(x) for j, x in enumerate(v) if x} for v in vecs]
    if ordering is not None and sorted(ordering) != list(range(ambient_dim)):
        raise StructuralError("ordering must be a permutation of the coordinates")
    admitted = complement_in_field(rows, ambient_dim, field, ordering, expected=len(vecs))
    return [tuple(1 if j == c else 0 for j in range(ambient_dim)) for c in admitted]


def complement_in_field(subspace_rows, ambient_dim: int, field: FieldSpec, ordering=None, expected=None) -> list:
    """Like ``complement_basis`` on sparse rows; returns the admitted coordinates."""
    if ordering is None:
        ordering = list(range(ambient_dim))
    pos = {c: ambient_dim - 1 - k for k, c in enumerate(ordering)}
    rows = [{pos[j]: x for j, x in r.items()} for r in subspace_rows]
    _, piv = rref_rows(rows, ambient_dim, field)
    if len(piv) < (len(rows) if expected is None else expected):
        raise StructuralError("subspace basis is linearly dependent")
    taken = set(piv)
    return [c for c in ordering if pos[c] not in taken]


__all__ = [
    "Echelon",
    "ExactMatrix",
    "SolveOutcome",
    "complement_basis",
    "complement_in_field",
    "rank_and_kernel",
    "solve_left_factor",
    "solve_pairs",
]
