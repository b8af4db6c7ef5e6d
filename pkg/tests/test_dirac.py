import random
from fractions import Fraction as F

import pytest

from dshift.dirac import (
    CutoffError,
    block_kernel_dims,
    car_relations_hold,
    creation_matrices,
    dirac_block,
    dirac_index,
    exterior_basis,
    homology_kernel_dims,
    tuple_for,
    verify_index_formulas,
)
from dshift.exterior import wedge
from dshift.fock import shift_tuple
from dshift.lattice import MonomialSubmodule

from suite import suite


@pytest.mark.parametrize("d", range(1, 7))
def test_car_relations(d):
    mats = creation_matrices(d)
    assert len(mats) == d and len(mats[0]) == 2**d
    assert car_relations_hold(mats)


def test_creation_d1():
    assert exterior_basis(1) == ((), (1,))
    assert creation_matrices(1) == (((0, 0), (1, 0)),)


def test_wedge_signs():
    assert wedge(1, (2,)) == (1, (1, 2))
    assert wedge(2, (1,)) == (-1, (1, 2))
    assert wedge(2, (1, 3)) == (-1, (1, 2, 3))
    assert wedge(1, (1,)) is None


def test_car_detects_broken_matrices():
    mats = [list(map(list, m)) for m in creation_matrices(2)]
    mats[0][1][0] = 2
    assert not car_relations_hold(tuple(tuple(map(tuple, m)) for m in mats))


def test_block_shapes_d1_full():
    ops = shift_tuple(MonomialSubmodule.zero(1), 6)
    b = dirac_block(ops, -1)
    assert b.basis == [(1, 0, (1,))]  # only 1 (x) e_1
    b0 = dirac_block(ops, 0)
    assert len(b0.even) == 1 and len(b0.odd) == 1


def test_b_squared_zero():
    for _, M in suite()[:6]:
        for side in ("quotient", "submodule"):
            ops = tuple_for(M, 7, side)
            for s in range(-M.d, 7 - M.d):
                assert dirac_block(ops, s).b_squared_zero()


def test_dirac_self_adjoint_and_square_splits():
    # <Dx, y> = <x, Dy> and |Dx|^2 = |Bx|^2 + |B*x|^2 (ranges of B and B* are orthogonal)
    rng = random.Random(5)
    M = suite()[0][1]
    ops = tuple_for(M, 8, "quotient")
    for s in range(-2, 4):
        b = dirac_block(ops, s)
        D = b.B + b.Bstar
        ip = lambda x, y: sum((v * y.get(k, 0) * b.gram[k] for k, v in x.items()), F(0))
        for _ in range(20):
            x = {k: F(rng.randint(-3, 3)) for k in b.basis}
            y = {k: F(rng.randint(-3, 3)) for k in b.basis}
            assert ip(D.apply(x), y) == ip(x, D.apply(y))
            Dx, Bx, Bsx = D.apply(x), b.B.apply(x), b.Bstar.apply(x)
            assert ip(Dx, Dx) == ip(Bx, Bx) + ip(Bsx, Bsx)


def test_kernel_dims_match_homology():
    for _, M in suite():
        for side in ("quotient", "submodule"):
            ops = tuple_for(M, 8, side)
            for s in range(-M.d, 8 - M.d):
                b = dirac_block(ops, s)
                assert block_kernel_dims(b) == homology_kernel_dims(b)


def test_index_full_shift():
    rep1 = dirac_index(shift_tuple(MonomialSubmodule.zero(1), 10), W=4)
    assert rep1.status == "stable"
    assert (rep1.dim_ker_plus, rep1.dim_ker_minus, rep1.index) == (0, 1, -1)
    rep2 = dirac_index(shift_tuple(MonomialSubmodule.zero(2), 10), W=4)
    assert rep2.index == 1


def test_index_d1_power():
    M = MonomialSubmodule.from_exponents(1, [(2,)])
    rep = dirac_index(tuple_for(M, 10, "quotient"), W=4)
    assert rep.status == "stable"
    assert (rep.dim_ker_plus, rep.dim_ker_minus) == (1, 1)
    assert rep.index == 0
    assert dirac_index(tuple_for(M, 10, "submodule"), W=4).index == -1


def test_index_inconclusive_reports_required_cutoff():
    M = MonomialSubmodule.from_exponents(2, [(1, 1)])
    rep = dirac_index(tuple_for(M, 5, "quotient"), W=6)
    assert rep.status == "inconclusive"
    assert rep.required_N > 5
    again = dirac_index(tuple_for(M, rep.required_N, "quotient"), W=6)
    assert again.status == "stable"


def test_cutoff_error():
    ops = shift_tuple(MonomialSubmodule.zero(2), 4)
    with pytest.raises(CutoffError) as err:
        dirac_block(ops, 3)
    assert err.value.required == 6
    with pytest.raises(ValueError):
        dirac_block(ops, -3)


def test_verify_index_formulas_examples():
    check = verify_index_formulas(MonomialSubmodule.from_exponents(2, [(1, 1)]), 12, 6)
    assert check.passed
    assert check.index_quotient.index == 0 and check.index_submodule.index == 1
    assert (check.K_quotient, check.K_submodule) == (0, 1)
    zero = verify_index_formulas(MonomialSubmodule.zero(3, 2), 10, 6)
    assert zero.passed and zero.index_quotient.index == -2


def test_verify_index_formulas_inconclusive():
    check = verify_index_formulas(MonomialSubmodule.from_exponents(2, [(1, 1)]), 4, 6)
    assert check.status == "inconclusive"
    assert check.checks["index_additivity"] is None
