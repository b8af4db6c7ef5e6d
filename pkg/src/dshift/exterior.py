"""Exterior algebra of C^d: canonical subset basis and creation operators."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations

Subset = tuple[int, ...]


@lru_cache(maxsize=None)
def exterior_basis(d: int) -> tuple[Subset, ...]:
    """Subsets of {1..d} sorted by cardinality, then lexicographically."""
    if d < 1:
        raise ValueError("d must be positive")
    return tuple(s for j in range(d + 1) for s in combinations(range(1, d + 1), j))


def wedge(i: int, subset: Subset) -> tuple[int, Subset] | None:
    """e_i ^ e_S as (sign, sorted subset), or None when i is already in S."""
    if i in subset:
        return None
    sign = -1 if sum(1 for j in subset if j < i) % 2 else 1
    return sign, tuple(sorted(subset + (i,)))


@lru_cache(maxsize=None)
def creation_matrices(d: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """C_1..C_d as 2^d x 2^d integer matrices in the canonical subset basis.

    Raises ``AssertionError`` if the anticommutation relations fail, which would
    mean the sign convention is broken.
    """
    basis = exterior_basis(d)
    index = {s: i for i, s in enumerate(basis)}
    size = len(basis)
    mats = []
    for i in range(1, d + 1):
        m = [[0] * size for _ in range(size)]
        for col, s in enumerate(basis):
            w = wedge(i, s)
            if w is not None:
                sign, t = w
                m[index[t]][col] = sign
        mats.append(tuple(tuple(row) for row in m))
    mats = tuple(mats)
    assert car_relations_hold(mats), "creation operators violate the CAR"
    return mats


def _mul(a, b):
    n = len(a)
    return [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def _transpose(a):
    return [list(row) for row in zip(*a)]


def car_relations_hold(mats) -> bool:
    """C_i C_j + C_j C_i = 0 and C_i^* C_j + C_j C_i^* = delta_ij, exactly."""
    n = len(mats[0])
    for i, ci in enumerate(mats):
        for j, cj in enumerate(mats):
            a = _mul(ci, cj)
            b = _mul(cj, ci)
            if any(a[x][y] + b[x][y] for x in range(n) for y in range(n)):
                return False
            ct = _transpose(ci)
            a = _mul(ct, cj)
            b = _mul(cj, ct)
            for x in range(n):
                for y in range(n):
                    want = 1 if (i == j and x == y) else 0
                    if a[x][y] + b[x][y] != want:
                        return False
    return True


def star_product(d: int, k: int, j: int) -> dict[tuple[Subset, Subset], Fraction]:
    """Nonzero entries of C_k^* C_j keyed by (row subset, column subset); axes 1-based."""
    basis = exterior_basis(d)
    mats = creation_matrices(d)
    ck = _transpose(mats[k - 1])
    prod = _mul(ck, mats[j - 1])
    return {
        (basis[x], basis[y]): Fraction(prod[x][y])
        for x in range(len(basis))
        for y in range(len(basis))
        if prod[x][y]
    }
