"""Multi-indices and monomial-generated submodules of H^2 (x) C^r.

Multi-indices are plain tuples of non-negative ints.  A monomial submodule is
given by generators ``(nu, fiber)``: the submodule is spanned by the monomials
``z^n (x) zeta`` with ``zeta`` in ``E(n)``, the sum of the fibers of all
generators with ``nu <= n``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterator, Sequence

from .exact import Vector, dense_rank, reduce_modulo, rref, to_fraction

MultiIndex = tuple[int, ...]


class DimensionError(ValueError):
    """Raised when multi-indices or vectors have the wrong length."""


def multi_index(components: Sequence[int]) -> MultiIndex:
    n = tuple(int(c) for c in components)
    if any(c < 0 for c in n):
        raise ValueError(f"multi-index components must be non-negative: {n}")
    return n


def degree(n: MultiIndex) -> int:
    return sum(n)


def leq(m: MultiIndex, n: MultiIndex) -> bool:
    """Componentwise partial order on Z_+^d."""
    if len(m) != len(n):
        raise DimensionError(f"length mismatch: {m} vs {n}")
    return all(a <= b for a, b in zip(m, n))


def unit(d: int, k: int) -> MultiIndex:
    """The unit multi-index e_k (axis ``k`` is 1-based)."""
    if not 1 <= k <= d:
        raise DimensionError(f"axis {k} outside 1..{d}")
    return tuple(1 if i == k - 1 else 0 for i in range(d))


def shift(n: MultiIndex, k: int, by: int = 1) -> MultiIndex:
    return n[: k - 1] + (n[k - 1] + by,) + n[k:]


@lru_cache(maxsize=None)
def _compositions(d: int, t: int) -> tuple[MultiIndex, ...]:
    if d == 1:
        return ((t,),)
    out = []
    for first in range(t, -1, -1):
        for rest in _compositions(d - 1, t - first):
            out.append((first,) + rest)
    return tuple(out)


def multi_indices(d: int, t: int) -> tuple[MultiIndex, ...]:
    """All multi-indices of total degree ``t`` in graded-lex order (z_1 heaviest first)."""
    if t < 0:
        return ()
    return _compositions(d, t)


def graded_lattice(d: int, max_degree: int) -> Iterator[MultiIndex]:
    for t in range(max_degree + 1):
        yield from multi_indices(d, t)


def count_monomials(d: int, t: int) -> int:
    return comb(t + d - 1, d - 1) if t >= 0 else 0


@dataclass(frozen=True)
class MonomialSubmodule:
    """Invariant subspace of the rank-r d-shift generated by ``z^nu (x) E_nu``.

    ``generators`` holds ``(exponent, fiber_basis)`` pairs; each fiber basis is a
    tuple of linearly independent rational r-vectors.  The empty generator list
    is the zero submodule.
    """

    d: int
    r: int
    generators: tuple[tuple[MultiIndex, tuple[Vector, ...]], ...] = ()
    _fiber_cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.d < 1 or self.r < 1:
            raise ValueError("d and r must be positive")
        gens = []
        for exponent, fib in self.generators:
            nu = multi_index(exponent)
            if len(nu) != self.d:
                raise DimensionError(f"exponent {nu} has length {len(nu)}, expected d={self.d}")
            vecs = tuple(tuple(to_fraction(x) for x in v) for v in fib)
            for v in vecs:
                if len(v) != self.r:
                    raise DimensionError(f"fiber vector {v} has length {len(v)}, expected r={self.r}")
            if not vecs:
                raise ValueError(f"generator at {nu} has an empty fiber")
            if dense_rank(vecs) != len(vecs):
                raise ValueError(f"fiber at {nu} is linearly dependent")
            gens.append((nu, vecs))
        object.__setattr__(self, "generators", tuple(gens))

    @classmethod
    def from_exponents(cls, d: int, exponents: Sequence[Sequence[int]], r: int = 1) -> "MonomialSubmodule":
        """Generators with full fiber C^r (the usual monomial ideal when r=1)."""
        full = tuple(tuple(Fraction(int(i == j)) for j in range(r)) for i in range(r))
        return cls(d, r, tuple((tuple(e), full) for e in exponents))

    @classmethod
    def zero(cls, d: int, r: int = 1) -> "MonomialSubmodule":
        return cls(d, r, ())

    @classmethod
    def full(cls, d: int, r: int = 1) -> "MonomialSubmodule":
        return cls.from_exponents(d, [(0,) * d], r)

    @property
    def max_generator_degree(self) -> int:
        return max((degree(nu) for nu, _ in self.generators), default=0)

    def active(self, n: MultiIndex) -> tuple[int, ...]:
        return tuple(i for i, (nu, _) in enumerate(self.generators) if leq(nu, n))

    def fiber_of_active(self, active: tuple[int, ...]) -> list[Vector]:
        cached = self._fiber_cache.get(active)
        if cached is None:
            cached = rref(v for i in active for v in self.generators[i][1])
            self._fiber_cache[active] = cached
        return cached


def fiber(M: MonomialSubmodule, n: Sequence[int]) -> list[Vector]:
    """RREF basis of E(n) = sum of E_k over generators with nu_k <= n."""
    n = multi_index(n)
    if len(n) != M.d:
        raise DimensionError(f"multi-index {n} has length {len(n)}, expected d={M.d}")
    return M.fiber_of_active(M.active(n))


def fiber_dim(M: MonomialSubmodule, n: MultiIndex) -> int:
    return len(M.fiber_of_active(M.active(n)))


def graded_dims(M: MonomialSubmodule, n: int) -> tuple[int, int]:
    """(dim M_n, dim of the orthocomplement in degree n)."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    inside = sum(fiber_dim(M, m) for m in multi_indices(M.d, n))
    return inside, M.r * count_monomials(M.d, n) - inside


def minimalize(M: MonomialSubmodule) -> MonomialSubmodule:
    """Canonical generating set: one RREF fiber per exponent, redundant vectors removed."""
    merged: dict[MultiIndex, list] = {}
    for nu, fib in M.generators:
        merged.setdefault(nu, []).extend(fib)
    order = sorted(merged, key=lambda nu: (degree(nu), tuple(-x for x in nu)))
    kept: list[tuple[MultiIndex, tuple[Vector, ...]]] = []
    for nu in order:
        below = [v for mu, fib in kept if leq(mu, nu) for v in fib]
        new = reduce_modulo(merged[nu], below)
        if new:
            kept.append((nu, tuple(new)))
    return MonomialSubmodule(M.d, M.r, tuple(kept))


class Side(str, enum.Enum):
    SUBMODULE = "submodule"
    QUOTIENT = "quotient"


@dataclass
class CurvatureReport:
    K: int | None
    side: Side
    window: tuple[int, int]
    stable: bool
    hilbert: list[tuple[int, int]]
    differences: list[tuple[int, int]]

    @property
    def status(self) -> str:
        return "exact" if self.stable else "inconclusive"


def hilbert_function(M: MonomialSubmodule, side: Side | str, max_degree: int) -> list[int]:
    side = Side(side)
    pick = 0 if side is Side.SUBMODULE else 1
    return [graded_dims(M, n)[pick] for n in range(max_degree + 1)]


def backward_difference(values: Sequence[int], order: int) -> list[int]:
    """Order-``order`` backward differences; entry i corresponds to index i + order."""
    vals = list(values)
    for _ in range(order):
        vals = [b - a for a, b in zip(vals, vals[1:])]
    return vals


def curvature(M: MonomialSubmodule, side: Side | str = Side.QUOTIENT, max_degree: int | None = None) -> CurvatureReport:
    """Graded curvature: eventual constant of the (d-1)-th difference of the Hilbert function.

    Stable only when the last three sampled differences agree and lie in [0, r].
    """
    side = Side(side)
    required = M.max_generator_degree + M.d + 3
    if max_degree is None:
        max_degree = required
    if max_degree < required:
        raise ValueError(f"max_degree must be at least {required} for this submodule")
    h = hilbert_function(M, side, max_degree)
    diffs = backward_difference(h, M.d - 1)
    start = M.d - 1
    tagged = [(start + i, v) for i, v in enumerate(diffs)]
    tail = [v for _, v in tagged[-3:]]
    window = (max_degree - 2, max_degree)
    stable = len(tail) == 3 and len(set(tail)) == 1 and 0 <= tail[0] <= M.r
    return CurvatureReport(
        K=tail[-1] if stable else None,
        side=side,
        window=window,
        stable=stable,
        hilbert=list(enumerate(h)),
        differences=tagged,
    )
