import random
from fractions import Fraction as F
from math import factorial, prod

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dshift.exact import SparseMatrix
from dshift.fock import (
    IDENTITIES,
    Part,
    adjoint,
    ambient_basis,
    commutator,
    defect,
    fock_norm_sq,
    gram,
    gram_adjoint,
    projection_matrix,
    self_commutator,
    shift_tuple,
    truncated_shift,
    verify_identities,
)
from dshift.lattice import DimensionError, MonomialSubmodule, degree

from suite import suite


def norm_recursion(n):
    # ||z^n||^2 = (n_k/|n|) ||z^{n-e_k}||^2 for any k with n_k > 0, and ||1|| = 1
    if not any(n):
        return F(1)
    k = next(i for i, c in enumerate(n) if c)
    prev = n[:k] + (n[k] - 1,) + n[k + 1 :]
    return F(n[k], sum(n)) * norm_recursion(prev)


def inner(x, y):
    return sum((v * y.get(k, 0) * gram(k) for k, v in x.items()), F(0))


def test_fock_norm_examples():
    assert fock_norm_sq((0, 0)) == 1
    assert fock_norm_sq((1, 1)) == F(1, 2)
    assert fock_norm_sq((2, 1)) == F(1, 3)
    assert fock_norm_sq((3,)) == 1


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=1, max_size=4))
def test_fock_norm_matches_recursion(n):
    n = tuple(n)
    assert fock_norm_sq(n) == norm_recursion(n)
    assert fock_norm_sq(n) * factorial(sum(n)) == prod(factorial(c) for c in n)


def test_adjoint_formula_d2():
    # S_1^* z^n = (n_1/|n|) z^{n-e_1}
    T = truncated_shift(MonomialSubmodule.zero(2), 1, 6)
    Ts = adjoint(T)
    assert Ts.apply({((3, 1), 0): F(1)}) == {((2, 1), 0): F(3, 4)}
    assert Ts.apply({((1, 1), 0): F(1)}) == {((0, 1), 0): F(1, 2)}
    assert Ts.apply({((0, 2), 0): F(1)}) == {}


@pytest.mark.parametrize("d, N", [(1, 6), (2, 5), (3, 4)])
def test_s1_star_s1_eigenvalues(d, N):
    T = truncated_shift(MonomialSubmodule.zero(d), 1, N)
    Ts = adjoint(T)
    for key in ambient_basis(d, 1, N - 1):
        n = key[0]
        image = Ts.apply(T.apply({key: F(1)}))
        assert image == {key: F(n[0] + 1, degree(n) + 1)}


def test_adjoint_is_inner_product_adjoint():
    rng = random.Random(11)
    M = MonomialSubmodule(2, 2, (((1, 0), ((F(1), F(-2)),)), ((0, 2), ((F(1), F(0)), (F(0), F(1))))))
    for part in Part:
        ops = shift_tuple(M, 5, part)
        keys = ops[0].basis
        for _ in range(100):
            x = {k: F(rng.randint(-5, 5), rng.randint(1, 4)) for k in rng.sample(keys, 6)}
            y = {k: F(rng.randint(-5, 5), rng.randint(1, 4)) for k in rng.sample(keys, 6)}
            for T in ops:
                assert inner(T.apply(x), y) == inner(x, adjoint(T).apply(y))


def test_adjoint_is_involution():
    for _, M in suite()[:4]:
        for T in shift_tuple(M, 5, Part.COMPRESSED):
            assert gram_adjoint(gram_adjoint(T.matrix)) == T.matrix


def test_truncated_shift_examples():
    T = truncated_shift(MonomialSubmodule.zero(2), 2, 3)
    assert T.apply({((1, 0), 0): F(1)}) == {((1, 1), 0): F(1)}
    assert T.apply({((1, 2), 0): F(1)}) == {}  # degree N is cut off
    M = MonomialSubmodule.from_exponents(2, [(1, 1)])
    R = truncated_shift(M, 1, 4, "restricted")
    assert R.apply({((1, 1), 0): F(1)}) == {((2, 1), 0): F(1)}
    C = truncated_shift(M, 1, 4, "compressed")
    assert C.apply({((0, 1), 0): F(1)}) == {}
    assert C.apply({((1, 0), 0): F(1)}) == {((2, 0), 0): F(1)}


def test_truncated_shift_bad_axis():
    with pytest.raises(DimensionError):
        truncated_shift(MonomialSubmodule.zero(2), 3, 4)
    with pytest.raises(ValueError):
        truncated_shift(MonomialSubmodule.zero(2), 1, 0)


def test_projection_idempotent_self_adjoint():
    for _, M in suite():
        P = projection_matrix(M, 5)
        Q = projection_matrix(M, 5, "quotient")
        assert P @ P == P
        assert gram_adjoint(P) == P
        assert (P @ Q).is_zero()
        assert P + Q == SparseMatrix.identity(ambient_basis(M.d, M.r, 5))


def test_defect_full_shift_is_vacuum_projection():
    for d in (1, 2, 3):
        ops = shift_tuple(MonomialSubmodule.zero(d), 5)
        vac = SparseMatrix({((0,) * d, 0): {((0,) * d, 0): F(1)}})
        assert defect(ops).matrix == vac


def test_defect_compressed_d1():
    M = MonomialSubmodule.from_exponents(1, [(2,)])
    ops = shift_tuple(M, 6, "compressed")
    dense = defect(ops).support_matrix()
    assert dense == [[1, 0], [0, 0]]


def test_defect_zero_tuple_is_identity():
    # M = everything: M-perp = {0} and the defect vanishes
    M = MonomialSubmodule.full(2, 1)
    ops = shift_tuple(M, 4, "compressed")
    assert defect(ops).matrix.is_zero()
    d1 = MonomialSubmodule.from_exponents(1, [(1,)])
    ops = shift_tuple(d1, 4, "compressed")  # M-perp = C, the tuple is 0
    assert defect(ops).support_matrix() == [[1]]


def test_tuple_commutes_below_cutoff():
    for _, M in suite():
        for part in Part:
            ops = shift_tuple(M, 6, part)
            for i in range(M.d):
                for j in range(i + 1, M.d):
                    c = commutator(ops[i].matrix, ops[j].matrix)
                    assert c.restrict_columns(lambda k: degree(k[0]) <= 4).is_zero()


def test_self_commutator_examples():
    ops = shift_tuple(MonomialSubmodule.zero(2), 5)
    c11 = self_commutator(ops, 1, 1)
    assert c11.apply({((0, 0), 0): F(1)}) == {((0, 0), 0): F(1)}
    # on z^n with |n| >= 1: (n_1+1)/(|n|+1) - n_1/|n|
    assert c11.apply({((1, 1), 0): F(1)}) == {((1, 1), 0): F(2, 3) - F(1, 2)}
    M = MonomialSubmodule.from_exponents(1, [(2,)])
    comp = shift_tuple(M, 6, "compressed")
    assert self_commutator(comp, 1, 1).support_matrix() == [[1, 0], [0, -1]]


def test_verify_identities_z1z2():
    rep = verify_identities(MonomialSubmodule.from_exponents(2, [(1, 1)]), 8)
    assert rep.status == "exact" and rep.passed
    assert set(rep.defects) == set(IDENTITIES)
    assert all(v == 0 for v in rep.defects.values())


def test_verify_identities_inconclusive_small_cutoff():
    M = MonomialSubmodule.from_exponents(2, [(3, 2)])
    rep = verify_identities(M, 5)
    assert rep.status == "inconclusive" and not rep.passed


def test_perturbed_identity_is_detected():
    # a wrong sign on the correction term must leave a nonzero defect
    M = MonomialSubmodule.from_exponents(2, [(1, 1)])
    N = 6
    ops = shift_tuple(MonomialSubmodule.zero(2), N)
    A = [T.matrix for T in ops]
    P = projection_matrix(M, N)
    B = [P @ a @ P for a in A]
    PA = commutator(P, A[0])
    lhs = commutator(B[0], gram_adjoint(B[0])) @ P
    inner_c = A[0] @ gram_adjoint(A[0]) - gram_adjoint(A[0]) @ A[0]
    wrong = PA @ gram_adjoint(PA) @ P + P @ inner_c @ P
    low = lambda X: X.restrict_columns(lambda k: degree(k[0]) <= N - 2)
    assert low(lhs - wrong).max_abs() > 0
    right = -(PA @ gram_adjoint(PA) @ P) + P @ inner_c @ P
    assert low(lhs - right).is_zero()
