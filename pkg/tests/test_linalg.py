import random
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from twistk.fields import QQ, FieldSpec
from twistk.linalg import (
    Echelon,
    ExactMatrix,
    complement_basis,
    rank_and_kernel,
    rref_rows,
    solve_left_factor,
)
from twistk.linalg import backend, core

P = 2_147_483_629


def _rows(data):
    return [{j: x for j, x in enumerate(r) if x} for r in data]


def _canon(echelon):
    return [{k: Fraction(v) for k, v in r.items()} for r in echelon]


def _random_int_matrix(rng, r, c, rank, lo=-5, hi=5):
    left = [[rng.randint(lo, hi) for _ in range(rank)] for _ in range(r)]
    right = [[rng.randint(lo, hi) for _ in range(c)] for _ in range(rank)]
    return [[sum(left[i][k] * right[k][j] for k in range(rank)) for j in range(c)] for i in range(r)]


def test_rational_routes_agree():
    rng = random.Random(1)
    for _ in range(60):
        r, c = rng.randint(2, 40), rng.randint(2, 40)
        data = _random_int_matrix(rng, r, c, rng.randint(0, min(r, c)))
        rows = _rows(data)
        sparse = core._rref_sparse(rows, QQ)
        ints = core._integer_rows(rows)
        bareiss = core._rref_bareiss(ints, c)
        modular = core._rref_rational_modular(ints, c)
        assert _canon(sparse[0]) == _canon(bareiss[0]) and sparse[1] == bareiss[1]
        assert modular is not None
        assert _canon(modular[0]) == _canon(sparse[0]) and modular[1] == sparse[1]


def test_rational_route_matches_sympy_rref():
    rng = random.Random(2)
    for _ in range(25):
        r, c = rng.randint(1, 8), rng.randint(1, 8)
        data = [[Fraction(rng.randint(-3, 3), rng.randint(1, 4)) for _ in range(c)] for _ in range(r)]
        E, piv = rref_rows(_rows(data), c, QQ)
        R, spiv = sympy.Matrix(data).rref()
        assert tuple(piv) == spiv
        for k in range(len(piv)):
            assert [Fraction(E[k].get(j, 0)) for j in range(c)] == [Fraction(int(x.p), int(x.q)) for x in R.row(k)]


def test_mod_p_routes_agree():
    rng = random.Random(3)
    for p in (2, 3, 101, P):
        for _ in range(20):
            r, c = rng.randint(1, 60), rng.randint(1, 60)
            data = [[rng.randrange(p) if rng.random() < 0.4 else 0 for _ in range(c)] for _ in range(r)]
            rows = _rows(data)
            F = FieldSpec(p)
            sparse = core._rref_sparse(rows, F)
            dense = core._rref_modp_dense(rows, c, p)
            assert sparse == dense


def test_compiled_and_python_kernels_agree():
    if backend.compiled_rref_mod_p is None:
        pytest.skip("compiled kernel not built")
    rng = np.random.default_rng(4)
    for p in (7, 65521, P):
        for _ in range(10):
            M = rng.integers(0, p, size=(rng.integers(1, 30), rng.integers(1, 30)), dtype=np.int64)
            M[rng.random(M.shape) < 0.5] = 0
            a, b = M.copy(), M.copy()
            pa = list(backend.compiled_rref_mod_p(a, p))
            pb = list(backend.python_rref_mod_p(b, p))
            assert pa == pb
            assert np.array_equal(a, b)


def test_field_prime_bound():
    with pytest.raises(Exception):
        FieldSpec(2**31 + 11)
    with pytest.raises(Exception):
        FieldSpec(15)


def test_echelon_incremental_span():
    F = FieldSpec(5)
    ech = Echelon(F)
    assert ech.add({0: 1, 1: 2})
    assert ech.add({1: 1, 2: 3})
    assert not ech.add({0: 1, 1: 3, 2: 3})
    assert ech.contains({0: 2, 1: 4})
    assert ech.rank == 2


def test_complement_basis_respects_ordering():
    sub = [(1, 1, 0), (0, 1, 1)]
    assert complement_basis(sub, 3) == [(1, 0, 0)]
    assert complement_basis(sub, 3, ordering=[2, 1, 0]) == [(0, 0, 1)]
    assert complement_basis([(1, 0, 0)], 3) == [(0, 1, 0), (0, 0, 1)]


def test_solve_left_factor_known_system():
    D = ExactMatrix.from_dense(QQ, [[1, -1], [-1, 1]], 2)
    R_ok = ExactMatrix.from_dense(QQ, [[2, -2]], 2)
    out = solve_left_factor(D, R_ok)
    assert out.consistent and not out.unique
    assert out.particular @ D == R_ok
    assert len(out.cokernel_basis) == 1
    R_bad = ExactMatrix.from_dense(QQ, [[1, 1]], 2)
    bad = solve_left_factor(D, R_bad)
    assert not bad.consistent
    assert not any(D.apply(bad.witness)) and any(R_bad.apply(bad.witness))


matrices = st.integers(1, 7).flatmap(
    lambda c: st.lists(st.lists(st.integers(-6, 6), min_size=c, max_size=c), min_size=1, max_size=7)
)


@settings(max_examples=150, deadline=None)
@given(matrices, st.sampled_from([0, 3, 101]))
def test_rank_nullity_property(data, p):
    F = FieldSpec(p)
    M = ExactMatrix.from_dense(F, [[F(x) for x in r] for r in data], len(data[0]))
    rank, ker = rank_and_kernel(M)
    assert rank + len(ker) == M.ncols
    for v in ker:
        assert not any(M.apply(v))
    E, piv = rref_rows(M.sparse_rows(), M.ncols, F)
    assert len(piv) == rank
    assert rank == rank_and_kernel(M.transpose())[0]


@settings(max_examples=100, deadline=None)
@given(matrices, st.lists(st.integers(-3, 3), min_size=1, max_size=7))
def test_rref_is_canonical_under_row_operations(data, mix):
    c = len(data[0])
    extra = [sum(m * data[i % len(data)][j] for i, m in enumerate(mix)) for j in range(c)]
    base = rref_rows(_rows(data), c, QQ)
    more = rref_rows(_rows(list(reversed(data)) + [extra]), c, QQ)
    assert _canon(base[0]) == _canon(more[0]) and base[1] == more[1]
