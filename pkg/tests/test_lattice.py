import random
from fractions import Fraction as F
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dshift.exact import dense_rank
from dshift.lattice import (
    DimensionError,
    MonomialSubmodule,
    Side,
    curvature,
    fiber,
    graded_dims,
    graded_lattice,
    leq,
    minimalize,
    multi_indices,
    shift,
)

from suite import random_ideals, suite


def span_contains(big, small):
    return dense_rank(list(big) + list(small)) == dense_rank(big)


@pytest.mark.parametrize(
    "m, n, expected",
    [((1, 1), (2, 3), True), ((2, 0), (1, 5), False), ((0, 0), (0, 0), True)],
)
def test_leq(m, n, expected):
    assert leq(m, n) is expected


def test_leq_length_mismatch():
    with pytest.raises(DimensionError):
        leq((1, 2), (1, 2, 3))


def test_fiber_examples():
    M = MonomialSubmodule.from_exponents(2, [(1, 1)])
    assert fiber(M, (0, 3)) == []
    assert len(fiber(M, (2, 3))) == 1
    M2 = MonomialSubmodule(2, 2, (((1, 0), ((1, 0),)), ((0, 1), ((1, 1),))))
    assert len(fiber(M2, (1, 1))) == 2
    assert len(fiber(M2, (1, 0))) == 1


def test_fiber_dimension_error():
    with pytest.raises(DimensionError):
        fiber(MonomialSubmodule.zero(2), (1,))


def test_multi_indices_enumeration():
    assert multi_indices(2, 2) == ((2, 0), (1, 1), (0, 2))
    for d in (1, 2, 3, 4):
        for t in range(6):
            pts = multi_indices(d, t)
            assert len(pts) == comb(t + d - 1, d - 1) == len(set(pts))


def test_graded_dims_brute_force():
    # oracle: membership of z^n in <z1 z2> is n >= (1,1)
    M = MonomialSubmodule.from_exponents(2, [(1, 1)])
    members = [n for n in [(a, 4 - a) for a in range(5)] if n[0] >= 1 and n[1] >= 1]
    assert members == [(1, 3), (2, 2), (3, 1)]
    assert graded_dims(M, 4) == (3, 2)
    assert graded_dims(M, 0) == (0, 1)


@pytest.mark.parametrize("d,r", [(1, 1), (2, 2), (3, 1), (3, 3)])
def test_graded_dims_full_space(d, r):
    M = MonomialSubmodule.full(d, r)
    for n in range(6):
        assert graded_dims(M, n) == (r * comb(n + d - 1, d - 1), 0)


def test_graded_dims_sum_invariant():
    for _, M in suite():
        for n in range(10):
            a, b = graded_dims(M, n)
            assert a >= 0 and b >= 0
            assert a + b == M.r * comb(n + M.d - 1, M.d - 1)


def test_fiber_monotone():
    for _, M in suite():
        for n in graded_lattice(M.d, 6):
            here = fiber(M, n)
            for k in range(1, M.d + 1):
                assert span_contains(fiber(M, shift(n, k)), here)


def test_minimalize_examples():
    M = minimalize(MonomialSubmodule.from_exponents(2, [(1, 0), (2, 1)]))
    assert [g for g, _ in M.generators] == [(1, 0)]
    M = minimalize(MonomialSubmodule(2, 2, (((1, 0), ((1, 0),)), ((1, 0), ((0, 1),)))))
    assert len(M.generators) == 1
    assert len(M.generators[0][1]) == 2
    assert minimalize(MonomialSubmodule.zero(3)).generators == ()


def test_minimalize_partial_redundancy():
    # the fiber at (1,1) is C^2 but (1,0) already brings span{(1,1)}
    M = MonomialSubmodule(2, 2, (((1, 0), ((1, 1),)), ((1, 1), ((1, 0), (0, 1)))))
    Mm = minimalize(M)
    assert len(Mm.generators) == 2
    assert len(Mm.generators[1][1]) == 1


@st.composite
def monomial_submodules(draw):
    d = draw(st.integers(1, 3))
    r = draw(st.integers(1, 2))
    gens = []
    for _ in range(draw(st.integers(0, 4))):
        nu = tuple(draw(st.integers(0, 3)) for _ in range(d))
        vec = tuple(F(draw(st.integers(-2, 2))) for _ in range(r))
        if any(vec):
            gens.append((nu, (vec,)))
    return MonomialSubmodule(d, r, tuple(gens))


@settings(max_examples=40, deadline=None)
@given(monomial_submodules(), st.randoms(use_true_random=False))
def test_minimalize_preserves_fibers(M, rnd):
    Mm = minimalize(M)
    for _ in range(200):
        n = tuple(rnd.randint(0, 6) for _ in range(M.d))
        a, b = fiber(M, n), fiber(Mm, n)
        assert a == b  # both are RREF bases of the same span


def test_minimalize_random_ideals_fixed_points():
    rng = random.Random(7)
    for M in random_ideals():
        Mm = minimalize(M)
        assert minimalize(Mm) == Mm
        for _ in range(200):
            n = tuple(rng.randint(0, 6) for _ in range(M.d))
            assert fiber(M, n) == fiber(Mm, n)


def test_curvature_examples():
    zero = MonomialSubmodule.zero(2)
    rep = curvature(zero, Side.QUOTIENT)
    assert rep.stable and rep.K == 1
    assert [h for _, h in rep.hilbert[:4]] == [1, 2, 3, 4]
    M = MonomialSubmodule.from_exponents(2, [(1, 1)])
    assert curvature(M, "quotient").K == 0
    assert curvature(M, "submodule").K == 1


def test_curvature_requires_degree():
    M = MonomialSubmodule.from_exponents(2, [(1, 1)])
    with pytest.raises(ValueError):
        curvature(M, "quotient", max_degree=3)


def test_curvature_d1():
    M = MonomialSubmodule.from_exponents(1, [(2,)])
    assert curvature(M, "quotient").K == 0
    assert curvature(M, "submodule").K == 1


def test_curvature_pure_power():
    # quotient by z1^3 in d=3 has Hilbert function 3n + O(1): second difference 0
    M = MonomialSubmodule.from_exponents(3, [(3, 0, 0)])
    rep = curvature(M, "quotient", max_degree=9)
    assert rep.stable and rep.K == 0


def test_curvature_additivity_suite():
    for _, M in suite():
        q, s = curvature(M, "quotient"), curvature(M, "submodule")
        assert q.stable and s.stable
        assert q.K + s.K == M.r


def test_invalid_submodules():
    with pytest.raises(DimensionError):
        MonomialSubmodule(2, 1, (((1, 1, 1), ((1,),)),))
    with pytest.raises(DimensionError):
        MonomialSubmodule(2, 2, (((1, 1), ((1,),)),))
    with pytest.raises(ValueError):
        MonomialSubmodule(2, 2, (((1, 1), ((1, 1), (2, 2))),))
