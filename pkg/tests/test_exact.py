from fractions import Fraction as F

from hypothesis import given, settings
from hypothesis import strategies as st

from dshift.exact import (
    SparseMatrix,
    dense_rank,
    orthogonal_basis,
    orthogonal_complement,
    projection,
    reduce_modulo,
    rref,
    sparse_nullity,
    sparse_rank,
    to_fraction,
)

small = st.integers(-3, 3).map(F)


def test_rref_basic():
    assert rref([[2, 4], [1, 2]]) == [(F(1), F(2))]
    assert rref([[0, 1], [1, 0]]) == [(F(1), F(0)), (F(0), F(1))]
    assert rref([]) == []


def test_to_fraction_rejects_floats():
    assert to_fraction("3/6") == F(1, 2)
    try:
        to_fraction(0.5)
    except TypeError:
        pass
    else:
        raise AssertionError("float accepted")


def test_reduce_modulo_keeps_sum():
    basis = [(F(1), F(1), F(0))]
    vecs = [(F(1), F(0), F(0)), (F(2), F(2), F(0))]
    new = reduce_modulo(vecs, basis)
    assert len(new) == 1
    assert dense_rank(basis + new) == dense_rank(basis + vecs)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=1, max_size=3))
def test_projection_is_orthogonal_projection(vecs):
    P = projection(vecs, 3)
    P2 = [[sum(P[i][k] * P[k][j] for k in range(3)) for j in range(3)] for i in range(3)]
    assert [list(row) for row in P] == P2
    assert all(P[i][j] == P[j][i] for i in range(3) for j in range(3))
    assert sum(P[i][i] for i in range(3)) == dense_rank(vecs)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=1, max_size=3))
def test_complement_orthogonal_and_complementary(vecs):
    comp = orthogonal_complement(vecs, 3)
    assert len(comp) + dense_rank(vecs) == 3
    for u in comp:
        for v in vecs:
            assert sum(a * b for a, b in zip(u, v)) == 0
    ortho = orthogonal_basis(comp)
    assert len(ortho) == len(comp)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.lists(small, min_size=4, max_size=4), min_size=1, max_size=6))
def test_sparse_rank_matches_dense(rows):
    sparse = [{j: v for j, v in enumerate(row) if v} for row in rows]
    assert sparse_rank(sparse) == dense_rank(rows)
    cols = {j: {i: rows[i][j] for i in range(len(rows)) if rows[i][j]} for j in range(4)}
    assert sparse_nullity(cols) == 4 - dense_rank(rows)


def test_sparse_matrix_algebra():
    A = SparseMatrix({"a": {"b": F(2)}})
    B = SparseMatrix({"b": {"c": F(3)}})
    assert (B @ A).entry("c", "a") == 6
    assert (A - A).is_zero()
    assert A.transpose().entry("a", "b") == 2
    assert (A + A).max_abs() == 4
