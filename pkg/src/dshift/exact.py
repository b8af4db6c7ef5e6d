"""Exact rational linear algebra.

Dense helpers operate on short vectors (fiber spaces in C^r, r small).
The sparse matrix and the echelon routines handle the large, very sparse
operators built on truncated Fock spaces.  Hot elimination loops run in
gmpy2 ``mpq`` and hand back :class:`fractions.Fraction` values.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

import gmpy2

Vector = tuple[Fraction, ...]


def to_fraction(x) -> Fraction:
    """Coerce ints, Fractions, mpq and "p/q" strings; floats are refused."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rational literals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if type(x).__name__ == "mpq":
        return Fraction(int(x.numerator), int(x.denominator))
    raise TypeError(f"not an exact rational: {x!r}")


def fraction_str(x: Fraction) -> str:
    x = to_fraction(x)
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# dense, small


def rref(vectors: Iterable[Sequence]) -> list[Vector]:
    """Reduced row-echelon basis of the span of ``vectors`` (zero rows dropped)."""
    rows = [[to_fraction(x) for x in v] for v in vectors]
    if not rows:
        return []
    ncols = len(rows[0])
    pivot_row = 0
    for col in range(ncols):
        sel = next((i for i in range(pivot_row, len(rows)) if rows[i][col] != 0), None)
        if sel is None:
            continue
        rows[pivot_row], rows[sel] = rows[sel], rows[pivot_row]
        piv = rows[pivot_row][col]
        rows[pivot_row] = [x / piv for x in rows[pivot_row]]
        for i in range(len(rows)):
            if i != pivot_row and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[pivot_row])]
        pivot_row += 1
        if pivot_row == len(rows):
            break
    return [tuple(row) for row in rows[:pivot_row]]


def dense_rank(vectors: Iterable[Sequence]) -> int:
    return len(rref(vectors))


def in_span(v: Sequence, basis: Sequence[Sequence]) -> bool:
    return dense_rank(list(basis) + [v]) == dense_rank(basis)


def reduce_modulo(vectors: Sequence[Sequence], basis: Sequence[Sequence]) -> list[Vector]:
    """Canonical complement: RREF of ``vectors`` after clearing the pivots of ``basis``.

    The returned vectors together with ``basis`` span ``span(vectors) + span(basis)``.
    """
    echelon = rref(basis)
    pivots = []
    for row in echelon:
        pivots.append(next(i for i, x in enumerate(row) if x != 0))
    reduced = []
    for v in vectors:
        w = [to_fraction(x) for x in v]
        for col, row in zip(pivots, echelon):
            if w[col] != 0:
                f = w[col]
                w = [a - f * b for a, b in zip(w, row)]
        if any(w):
            reduced.append(w)
    return rref(reduced)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def orthogonal_basis(vectors: Iterable[Sequence]) -> list[Vector]:
    """Gram-Schmidt without normalization, so entries stay rational."""
    out: list[Vector] = []
    for v in vectors:
        w = [to_fraction(x) for x in v]
        for u in out:
            c = dot(w, u) / dot(u, u)
            w = [a - c * b for a, b in zip(w, u)]
        if any(w):
            out.append(tuple(w))
    return out


def orthogonal_complement(basis: Sequence[Sequence], r: int) -> list[Vector]:
    """Orthogonal rational basis of the complement of span(basis) in Q^r."""
    echelon = rref(basis)
    pivots = [next(i for i, x in enumerate(row) if x != 0) for row in echelon]
    free = [c for c in range(r) if c not in pivots]
    null = []
    for fc in free:
        v = [Fraction(0)] * r
        v[fc] = Fraction(1)
        for pc, row in zip(pivots, echelon):
            v[pc] = -row[fc]
        null.append(v)
    return orthogonal_basis(null)


def projection(basis: Sequence[Sequence], r: int) -> tuple[Vector, ...]:
    """Orthogonal projection of Q^r onto span(basis), as an r x r row tuple."""
    ortho = orthogonal_basis(basis)
    mat = [[Fraction(0)] * r for _ in range(r)]
    for u in ortho:
        nu = dot(u, u)
        for i in range(r):
            if u[i] == 0:
                continue
            for j in range(r):
                mat[i][j] += u[i] * u[j] / nu
    return tuple(tuple(row) for row in mat)


# ---------------------------------------------------------------------------
# sparse


class SparseMatrix:
    """Column-major sparse matrix with hashable row/column keys.

    ``cols[c][r]`` is the entry in row ``r``, column ``c``; absent entries are 0.
    """

    __slots__ = ("cols",)

    def __init__(self, cols: Mapping[Hashable, Mapping[Hashable, Fraction]] | None = None):
        self.cols: dict = {}
        if cols:
            for c, col in cols.items():
                clean = {r: v for r, v in col.items() if v != 0}
                if clean:
                    self.cols[c] = clean

    @classmethod
    def identity(cls, keys: Iterable[Hashable]) -> "SparseMatrix":
        return cls({k: {k: Fraction(1)} for k in keys})

    def __repr__(self) -> str:
        return f"SparseMatrix(nnz={self.nnz})"

    @property
    def nnz(self) -> int:
        return sum(len(c) for c in self.cols.values())

    def entry(self, row, col) -> Fraction:
        return self.cols.get(col, {}).get(row, Fraction(0))

    def column(self, col) -> dict:
        return self.cols.get(col, {})

    def apply(self, vec: Mapping[Hashable, Fraction]) -> dict:
        out: dict = {}
        for c, x in vec.items():
            if x == 0:
                continue
            for r, v in self.cols.get(c, {}).items():
                out[r] = out.get(r, 0) + v * x
        return {k: v for k, v in out.items() if v != 0}

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        return SparseMatrix({c: self.apply(col) for c, col in other.cols.items()})

    def _combine(self, other: "SparseMatrix", sign: int) -> "SparseMatrix":
        out = {c: dict(col) for c, col in self.cols.items()}
        for c, col in other.cols.items():
            tgt = out.setdefault(c, {})
            for r, v in col.items():
                tgt[r] = tgt.get(r, 0) + sign * v
        return SparseMatrix(out)

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self._combine(other, 1)

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self._combine(other, -1)

    def __neg__(self) -> "SparseMatrix":
        return self.scale(-1)

    def scale(self, a) -> "SparseMatrix":
        return SparseMatrix({c: {r: a * v for r, v in col.items()} for c, col in self.cols.items()})

    def transpose(self) -> "SparseMatrix":
        out: dict = {}
        for c, col in self.cols.items():
            for r, v in col.items():
                out.setdefault(r, {})[c] = v
        return SparseMatrix(out)

    def restrict_columns(self, keep) -> "SparseMatrix":
        return SparseMatrix({c: col for c, col in self.cols.items() if keep(c)})

    def restrict_rows(self, keep) -> "SparseMatrix":
        return SparseMatrix(
            {c: {r: v for r, v in col.items() if keep(r)} for c, col in self.cols.items()}
        )

    def max_abs(self) -> Fraction:
        return max((abs(v) for col in self.cols.values() for v in col.values()), default=Fraction(0))

    def is_zero(self) -> bool:
        return not self.cols

    def to_dense(self, row_keys: Sequence, col_keys: Sequence) -> list[list[Fraction]]:
        index = {k: i for i, k in enumerate(row_keys)}
        out = [[Fraction(0)] * len(col_keys) for _ in row_keys]
        for j, c in enumerate(col_keys):
            for r, v in self.cols.get(c, {}).items():
                if r in index:
                    out[index[r]][j] = to_fraction(v)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None


def sparse_rank(rows: Iterable[Mapping[Hashable, Fraction]]) -> int:
    """Exact rank of a set of sparse rows over Q.

    Incremental echelon form keyed on the smallest column of each row; column
    keys must be mutually comparable.
    """
    pivots: dict = {}
    for row in rows:
        work = {k: gmpy2.mpq(v.numerator, v.denominator) if isinstance(v, Fraction) else gmpy2.mpq(v)
                for k, v in row.items() if v != 0}
        while work:
            lead = min(work)
            piv = pivots.get(lead)
            if piv is None:
                inv = 1 / work[lead]
                pivots[lead] = {k: v * inv for k, v in work.items()}
                break
            f = work[lead]
            for k, v in piv.items():
                nv = work.get(k, 0) - f * v
                if nv:
                    work[k] = nv
                else:
                    work.pop(k, None)
    return len(pivots)


def sparse_nullity(columns: Mapping[Hashable, Mapping[Hashable, Fraction]]) -> int:
    """Dimension of the kernel of the linear map whose columns are given.

    Computed as (#columns) - rank, the rank taken over the transposed rows so the
    elimination runs along the short side.
    """
    ncols = len(columns)
    rows: dict = {}
    for c, col in columns.items():
        for r, v in col.items():
            if v != 0:
                rows.setdefault(r, {})[c] = v
    # rank(A) = rank(A^T); eliminate on whichever representation is smaller
    if len(rows) <= ncols:
        rank = sparse_rank(rows.values())
    else:
        rank = sparse_rank(columns.values())
    return ncols - rank
