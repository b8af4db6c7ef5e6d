"""Dirac operator D = B + B^* of a truncated tuple, block by block.

``B = sum_k T_k (x) C_k`` raises polynomial degree and form degree by one, so
``s = (polynomial degree) - (form degree)`` is preserved and D splits into
finite blocks.  Inside a block ``ker D = ker B  cap  ker B^*`` (since
<D^2 x, x> = |Bx|^2 + |B^*x|^2), computed as the exact nullity of the stacked
system, separately on the even and odd form degrees.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exact import SparseMatrix, sparse_nullity, sparse_rank
from .exterior import Subset, car_relations_hold, creation_matrices, exterior_basis, wedge
from .fock import Part, TruncatedOperator, fock_norm_sq, shift_tuple
from .lattice import MonomialSubmodule, Side, curvature, degree

__all__ = [
    "DiracBlock",
    "IndexReport",
    "IndexCheck",
    "block_kernel_dims",
    "car_relations_hold",
    "creation_matrices",
    "dirac_block",
    "dirac_index",
    "exterior_basis",
    "homology_kernel_dims",
    "verify_index_formulas",
]


class CutoffError(ValueError):
    def __init__(self, required: int, got: int):
        super().__init__(f"cutoff N={got} too small for this block; need N >= {required}")
        self.required = required


def _support_maps(ops: Sequence[TruncatedOperator]) -> list[list[dict[int, Fraction]]]:
    """For each T_k, the images of support vectors in support coordinates."""
    support = ops[0].support
    index: dict = {}
    for idx, (n, w) in enumerate(support):
        index.setdefault(n, []).append((idx, w, sum((x * x for x in w), Fraction(0))))
    maps = []
    for T in ops:
        rows = []
        for n, w in support:
            vec = {(n, i): x for i, x in enumerate(w) if x != 0}
            image = T.matrix.apply(vec)
            coords: dict[int, Fraction] = {}
            for m in {key[0] for key in image}:
                for idx, u, uu in index.get(m, ()):
                    num = sum((image.get((m, i), 0) * x for i, x in enumerate(u)), Fraction(0))
                    if num:
                        coords[idx] = num / uu
            rows.append(coords)
        maps.append(rows)
    return maps


@dataclass
class DiracBlock:
    """Block of D on vectors z^n (x) w (x) e_S with |n| - |S| = s.

    Basis keys are ``(form_degree, support_index, subset)``; ``gram`` holds the
    squared norms of the basis vectors.
    """

    s: int
    d: int
    basis: list[tuple[int, int, Subset]]
    gram: dict
    B: SparseMatrix
    Bstar: SparseMatrix

    @property
    def even(self) -> list:
        return [b for b in self.basis if b[0] % 2 == 0]

    @property
    def odd(self) -> list:
        return [b for b in self.basis if b[0] % 2 == 1]

    def b_squared_zero(self) -> bool:
        return (self.B @ self.B).is_zero()


class _TupleData:
    """Cached support maps for a tuple, reused across blocks."""

    def __init__(self, ops: Sequence[TruncatedOperator]):
        if not ops:
            raise ValueError("empty tuple")
        self.ops = list(ops)
        self.d = ops[0].d
        self.N = ops[0].N
        self.support = ops[0].support
        self.maps = _support_maps(ops)
        self.by_degree: dict[int, list[int]] = {}
        self.norm_sq = []
        for idx, (n, w) in enumerate(self.support):
            self.by_degree.setdefault(degree(n), []).append(idx)
            self.norm_sq.append(fock_norm_sq(n) * sum((x * x for x in w), Fraction(0)))


def _as_data(tuple_or_data) -> _TupleData:
    return tuple_or_data if isinstance(tuple_or_data, _TupleData) else _TupleData(tuple_or_data)


def dirac_block(ops, s: int) -> DiracBlock:
    data = _as_data(ops)
    d = data.d
    if s < -d:
        raise ValueError(f"s must be >= -d = {-d}")
    if data.N < s + d + 1:
        raise CutoffError(s + d + 1, data.N)
    subsets_by_size: dict[int, list[Subset]] = {}
    for S in exterior_basis(d):
        subsets_by_size.setdefault(len(S), []).append(S)
    basis, gram = [], {}
    for j in range(d + 1):
        m = s + j
        if m < 0:
            continue
        for idx in data.by_degree.get(m, ()):
            for S in subsets_by_size[j]:
                key = (j, idx, S)
                basis.append(key)
                gram[key] = data.norm_sq[idx]
    cols: dict = {}
    for key in basis:
        j, idx, S = key
        if j == d:
            continue
        col: dict = {}
        for k in range(1, d + 1):
            w = wedge(k, S)
            if w is None:
                continue
            sign, S2 = w
            for idx2, coef in data.maps[k - 1][idx].items():
                tgt = (j + 1, idx2, S2)
                col[tgt] = col.get(tgt, 0) + sign * coef
        cols[key] = col
    B = SparseMatrix(cols)
    star: dict = {}
    for c, col in B.cols.items():
        for r, v in col.items():
            star.setdefault(r, {})[c] = v * gram[r] / gram[c]
    return DiracBlock(s, d, basis, gram, B, SparseMatrix(star))


def block_kernel_dims(block: DiracBlock) -> tuple[int, int]:
    """(dim ker D on even forms, dim ker D on odd forms), exactly."""
    dims = []
    for part in (block.even, block.odd):
        columns = {}
        for key in part:
            col = {("B",) + r: v for r, v in block.B.column(key).items()}
            col.update({("A",) + r: v for r, v in block.Bstar.column(key).items()})
            columns[key] = col
        dims.append(sparse_nullity(columns))
    return dims[0], dims[1]


def homology_kernel_dims(block: DiracBlock) -> tuple[int, int]:
    """Same numbers via dim ker B_j - rank B_{j-1} (finite-dimensional Hodge theory)."""
    by_j: dict[int, list] = {}
    for key in block.basis:
        by_j.setdefault(key[0], []).append(key)
    ranks = {}
    for j, keys in by_j.items():
        ranks[j] = sparse_rank(block.B.column(k) for k in keys)
    even = odd = 0
    for j, keys in by_j.items():
        h = len(keys) - ranks[j] - ranks.get(j - 1, 0)
        if j % 2:
            odd += h
        else:
            even += h
    return even, odd


@dataclass
class IndexReport:
    dim_ker_plus: int
    dim_ker_minus: int
    index: int
    blocks: tuple[int, int]
    window: int
    status: str  # stable | inconclusive
    per_block: list[tuple[int, int, int]] = field(default_factory=list)
    required_N: int | None = None


def dirac_index(ops, W: int | None = None) -> IndexReport:
    """Sum kernel dimensions over blocks s = -d, -d+1, ... until W consecutive empty kernels."""
    data = _as_data(ops)
    d = data.d
    if W is None:
        W = 2 * (d + 1)
    if W < 1:
        raise ValueError("window must be >= 1")
    plus = minus = 0
    run = 0
    per_block = []
    s = -d
    while s + d + 1 <= data.N:
        ke, ko = block_kernel_dims(dirac_block(data, s))
        per_block.append((s, ke, ko))
        plus += ke
        minus += ko
        run = run + 1 if ke == ko == 0 else 0
        if run >= W:
            return IndexReport(plus, minus, plus - minus, (-d, s), W, "stable", per_block)
        s += 1
    required = s + d + (W - run)
    return IndexReport(plus, minus, plus - minus, (-d, s - 1), W, "inconclusive", per_block, required)


def tuple_for(M: MonomialSubmodule, N: int, side: Side | str) -> list[TruncatedOperator]:
    part = Part.RESTRICTED if Side(side) is Side.SUBMODULE else Part.COMPRESSED
    return shift_tuple(M, N, part)


@dataclass
class IndexCheck:
    index_quotient: IndexReport
    index_submodule: IndexReport
    K_quotient: int | None
    K_submodule: int | None
    r: int
    d: int
    checks: dict[str, bool | None]
    status: str  # pass | fail | inconclusive

    @property
    def passed(self) -> bool:
        return self.status == "pass"


def verify_index_formulas(M: MonomialSubmodule, N: int, W: int | None = None, curvature_degree: int | None = None) -> IndexCheck:
    """Cross-check ind D_+ against (-1)^d K on both sides and the additivity over M, M-perp."""
    d, r = M.d, M.r
    sign = -1 if d % 2 else 1
    quot = dirac_index(tuple_for(M, N, Side.QUOTIENT), W)
    sub = dirac_index(tuple_for(M, N, Side.SUBMODULE), W)
    deg = max(N, M.max_generator_degree + d + 3) if curvature_degree is None else curvature_degree
    kq = curvature(M, Side.QUOTIENT, deg)
    ks = curvature(M, Side.SUBMODULE, deg)
    checks: dict[str, bool | None] = {}
    ok_q = quot.status == "stable" and kq.stable
    ok_s = sub.status == "stable" and ks.stable
    checks["quotient_index_vs_curvature"] = (quot.index == sign * kq.K) if ok_q else None
    checks["submodule_index_vs_curvature"] = (sub.index == sign * ks.K) if ok_s else None
    both = quot.status == "stable" and sub.status == "stable"
    checks["index_additivity"] = (quot.index + sub.index == sign * r) if both else None
    if any(v is None for v in checks.values()):
        status = "inconclusive"
    elif all(checks.values()):
        status = "pass"
    else:
        status = "fail"
    return IndexCheck(quot, sub, kq.K, ks.K, r, d, checks, status)
