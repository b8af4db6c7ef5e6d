"""Exact truncated models of the d-shift and its restriction/compression.

All operators live on the ambient truncation H_N = span{z^n (x) e_i : |n| <= N}
in the unnormalized monomial basis; basis keys are ``(n, i)`` with ``i`` a
0-based coordinate of C^r.  The Gram matrix is diagonal with entries
``||z^n||^2 = n!/|n|!``.  Restricted and compressed operators are stored as
``P S_k P`` and ``P' S_k P'`` on the ambient space, together with the projection
onto the space they act on, so the identities relating them can be checked
without changing bases.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Sequence

from .exact import SparseMatrix, Vector, orthogonal_basis, orthogonal_complement, projection as fiber_projection
from .exterior import creation_matrices, exterior_basis, star_product
from .lattice import DimensionError, MonomialSubmodule, degree, fiber, graded_lattice, shift

Key = tuple


class Part(str, enum.Enum):
    FULL = "full"
    RESTRICTED = "restricted"
    COMPRESSED = "compressed"


@lru_cache(maxsize=None)
def fock_norm_sq(n: tuple[int, ...]) -> Fraction:
    """||z^n||^2 in the symmetric Fock space: n_1! ... n_d! / |n|!."""
    num = 1
    for c in n:
        num *= factorial(c)
    return Fraction(num, factorial(degree(n)))


def gram(key: Key) -> Fraction:
    return fock_norm_sq(key[0])


def ambient_basis(d: int, r: int, N: int) -> list[Key]:
    return [(n, i) for n in graded_lattice(d, N) for i in range(r)]


def key_degree(key: Key) -> int:
    return degree(key[0])


@dataclass
class TruncatedOperator:
    """Operator on the degree-<=N truncation of H^2 (x) C^r.

    ``space`` is the (ambient) projection onto the subspace the operator acts on:
    the identity for the full shift, P_M for the restriction, 1 - P_M for the
    compression.  ``support`` lists an orthogonal rational basis of that subspace
    as ``(n, w)`` pairs meaning ``z^n (x) w``.
    """

    d: int
    r: int
    N: int
    matrix: SparseMatrix
    space: SparseMatrix
    support: tuple[tuple[tuple[int, ...], Vector], ...]
    part: Part = Part.FULL

    @property
    def basis(self) -> list[Key]:
        return ambient_basis(self.d, self.r, self.N)

    def _check(self, other: "TruncatedOperator"):
        if (self.d, self.r, self.N) != (other.d, other.r, other.N):
            raise DimensionError("operators live on different truncations")

    def _like(self, matrix: SparseMatrix) -> "TruncatedOperator":
        return TruncatedOperator(self.d, self.r, self.N, matrix, self.space, self.support, self.part)

    def __matmul__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        self._check(other)
        return self._like(self.matrix @ other.matrix)

    def __add__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        self._check(other)
        return self._like(self.matrix + other.matrix)

    def __sub__(self, other: "TruncatedOperator") -> "TruncatedOperator":
        self._check(other)
        return self._like(self.matrix - other.matrix)

    def scale(self, a) -> "TruncatedOperator":
        return self._like(self.matrix.scale(a))

    def apply(self, vec: dict) -> dict:
        return self.matrix.apply(vec)

    def interior(self, max_degree: int | None = None) -> SparseMatrix:
        """Columns with source degree <= max_degree (default N-2)."""
        top = self.N - 2 if max_degree is None else max_degree
        return self.matrix.restrict_columns(lambda c: key_degree(c) <= top)

    def support_vectors(self) -> list[dict]:
        return [{(n, i): x for i, x in enumerate(w) if x != 0} for n, w in self.support]

    def support_matrix(self) -> list[list[Fraction]]:
        """Matrix in the orthogonal support basis (components of T b along each b')."""
        vecs = self.support_vectors()
        out = [[Fraction(0)] * len(vecs) for _ in vecs]
        by_degree: dict = {}
        for idx, (n, w) in enumerate(self.support):
            by_degree.setdefault(n, []).append((idx, w))
        for col, v in enumerate(vecs):
            image = self.matrix.apply(v)
            for (m, w_idx_list) in by_degree.items():
                for idx, w in w_idx_list:
                    num = sum((image.get((m, i), 0) * x for i, x in enumerate(w)), Fraction(0))
                    if num:
                        out[idx][col] = num / sum((x * x for x in w), Fraction(0))
        return out


def _identity(d: int, r: int, N: int) -> SparseMatrix:
    return SparseMatrix.identity(ambient_basis(d, r, N))


def projection_matrix(M: MonomialSubmodule, N: int, onto: str = "submodule") -> SparseMatrix:
    """Exact ambient projection onto M (``onto='submodule'``) or its complement."""
    cols: dict = {}
    for n in graded_lattice(M.d, N):
        P = fiber_projection(fiber(M, n), M.r)
        for j in range(M.r):
            col = {}
            for i in range(M.r):
                v = P[i][j]
                if onto != "submodule":
                    v = (1 if i == j else 0) - v
                if v:
                    col[(n, i)] = v
            if col:
                cols[(n, j)] = col
    return SparseMatrix(cols)


def support_basis(M: MonomialSubmodule, N: int, part: Part | str) -> tuple:
    part = Part(part)
    out = []
    eye = [tuple(Fraction(int(i == j)) for j in range(M.r)) for i in range(M.r)]
    for n in graded_lattice(M.d, N):
        if part is Part.FULL:
            vecs = eye
        elif part is Part.RESTRICTED:
            vecs = orthogonal_basis(fiber(M, n))
        else:
            vecs = orthogonal_complement(fiber(M, n), M.r)
        out.extend((n, w) for w in vecs)
    return tuple(out)


def _raw_shift(d: int, r: int, k: int, N: int) -> SparseMatrix:
    cols = {}
    for n in graded_lattice(d, N - 1):
        m = shift(n, k)
        for i in range(r):
            cols[(n, i)] = {(m, i): Fraction(1)}
    return SparseMatrix(cols)


def truncated_shift(M: MonomialSubmodule, k: int, N: int, part: Part | str = Part.FULL) -> TruncatedOperator:
    """Matrix of S_k (full), S_k|M (restricted) or the compression of S_k to M-perp.

    Degree-N vectors are sent to 0.  Axis ``k`` is 1-based.
    """
    part = Part(part)
    if not 1 <= k <= M.d:
        raise DimensionError(f"axis {k} outside 1..{M.d}")
    if N < 1:
        raise ValueError("cutoff N must be at least 1")
    S = _raw_shift(M.d, M.r, k, N)
    if part is Part.FULL:
        space = _identity(M.d, M.r, N)
        mat = S
    else:
        space = projection_matrix(M, N, "submodule" if part is Part.RESTRICTED else "quotient")
        mat = space @ S @ space
    return TruncatedOperator(M.d, M.r, N, mat, space, support_basis(M, N, part), part)


def shift_tuple(M: MonomialSubmodule, N: int, part: Part | str = Part.FULL) -> list[TruncatedOperator]:
    part = Part(part)
    ops = [truncated_shift(M, 1, N, part)]
    for k in range(2, M.d + 1):
        S = _raw_shift(M.d, M.r, k, N)
        first = ops[0]
        mat = S if part is Part.FULL else first.space @ S @ first.space
        ops.append(TruncatedOperator(M.d, M.r, N, mat, first.space, first.support, part))
    return ops


def gram_adjoint(A: SparseMatrix) -> SparseMatrix:
    """G^{-1} A^T G for the diagonal Fock Gram matrix (keys carry the multi-index first)."""
    out: dict = {}
    for c, col in A.cols.items():
        gc = gram(c)
        for r, v in col.items():
            out.setdefault(r, {})[c] = v * gram(r) / gc
    return SparseMatrix(out)


def adjoint(T: TruncatedOperator) -> TruncatedOperator:
    """Hilbert-space adjoint for the Fock inner product."""
    return T._like(gram_adjoint(T.matrix))


def _check_tuple(ops: Sequence[TruncatedOperator]):
    if not ops:
        raise ValueError("empty tuple")
    first = ops[0]
    for T in ops[1:]:
        first._check(T)
        if T.space != first.space:
            raise DimensionError("operators act on different subspaces")


def defect(ops: Sequence[TruncatedOperator]) -> TruncatedOperator:
    """1 - sum A_k A_k^*, the identity being that of the space the tuple acts on."""
    _check_tuple(ops)
    total = ops[0].space
    for A in ops:
        total = total - A.matrix @ gram_adjoint(A.matrix)
    return ops[0]._like(total)


def self_commutator(ops: Sequence[TruncatedOperator], i: int, j: int) -> TruncatedOperator:
    """T_i^* T_j - T_j T_i^* (axes 1-based)."""
    _check_tuple(ops)
    Ti, Tj = ops[i - 1].matrix, ops[j - 1].matrix
    Ti_star = gram_adjoint(Ti)
    return ops[0]._like(Ti_star @ Tj - Tj @ Ti_star)


def commutator(X: SparseMatrix, Y: SparseMatrix) -> SparseMatrix:
    return X @ Y - Y @ X


# ---------------------------------------------------------------------------
# tensor with the exterior algebra


def tensor_exterior(A: SparseMatrix, ext: dict, d: int) -> SparseMatrix:
    """A (x) C where C is given by its nonzero entries {(row subset, col subset): value}."""
    by_col: dict = {}
    for (s_row, s_col), v in ext.items():
        by_col.setdefault(s_col, []).append((s_row, v))
    cols: dict = {}
    for c, col in A.cols.items():
        for s_col, entries in by_col.items():
            out = {}
            for r, a in col.items():
                for s_row, v in entries:
                    out[r + (s_row,)] = a * v
            cols[c + (s_col,)] = out
    return SparseMatrix(cols)


def identity_exterior(d: int) -> dict:
    return {(s, s): Fraction(1) for s in exterior_basis(d)}


def creation_exterior(d: int, k: int) -> dict:
    basis = exterior_basis(d)
    C = creation_matrices(d)[k - 1]
    return {(basis[x], basis[y]): Fraction(C[x][y]) for x in range(len(basis)) for y in range(len(basis)) if C[x][y]}


def dirac_square_defect(ops: Sequence[SparseMatrix], d: int, max_degree: int) -> Fraction:
    """Max entrywise defect of D^2 = F(x)1 + sum (T_k^*T_j - T_jT_k^*)(x)C_k^*C_j.

    Both sides are applied to vectors of polynomial degree <= max_degree.
    """
    stars = [gram_adjoint(T) for T in ops]
    B = SparseMatrix()
    for k, T in enumerate(ops, start=1):
        B = B + tensor_exterior(T, creation_exterior(d, k), d)
    D = B + gram_adjoint(B)
    keep = lambda c: degree(c[0]) <= max_degree
    D_low = D.restrict_columns(keep)
    lhs = D @ D_low
    F = SparseMatrix()
    for T, Ts in zip(ops, stars):
        F = F + T @ Ts
    rhs = tensor_exterior(F.restrict_columns(keep), identity_exterior(d), d)
    for k in range(1, d + 1):
        for j in range(1, d + 1):
            ext = star_product(d, k, j)
            if not ext:
                continue
            Tk_star, Tj = stars[k - 1], ops[j - 1]
            comm = (Tk_star @ Tj - Tj @ Tk_star).restrict_columns(keep)
            rhs = rhs + tensor_exterior(comm, ext, d)
    return (lhs - rhs).max_abs()


# ---------------------------------------------------------------------------
# identities relating the shift, its restriction and its compression


@dataclass
class IdentityReport:
    defects: dict[str, Fraction]
    max_degree: int
    N: int
    status: str

    @property
    def passed(self) -> bool:
        return self.status == "exact" and all(v == 0 for v in self.defects.values())


IDENTITIES = ("commutator_submodule", "commutator_quotient", "defect_submodule", "defect_quotient", "dirac_square")


def verify_identities(M: MonomialSubmodule, N: int) -> IdentityReport:
    """Check the commutator/defect identities and D^2 expansion exactly on degrees <= N-2."""
    top = N - 2
    if N < M.max_generator_degree + 2 or top < 0:
        return IdentityReport({}, top, N, "inconclusive")
    d, r = M.d, M.r
    keep = lambda c: degree(c[0]) <= top
    A = [_raw_shift(d, r, k, N) for k in range(1, d + 1)]
    A_star = [gram_adjoint(a) for a in A]
    P = projection_matrix(M, N, "submodule")
    Q = projection_matrix(M, N, "quotient")
    B = [P @ a @ P for a in A]
    C = [Q @ a @ Q for a in A]
    B_star = [gram_adjoint(b) for b in B]
    C_star = [gram_adjoint(c) for c in C]
    PA = [commutator(P, a) for a in A]
    PA_star = [gram_adjoint(x) for x in PA]

    def low(X: SparseMatrix) -> SparseMatrix:
        return X.restrict_columns(keep)

    P_low, Q_low = low(P), low(Q)
    eq4 = eq5 = Fraction(0)
    for j in range(d):
        for k in range(d):
            inner = A[j] @ A_star[k] - A_star[k] @ A[j]
            lhs = commutator(B[j], B_star[k]) @ P_low
            rhs = -(PA[j] @ (PA_star[k] @ P_low)) + P @ (inner @ P_low)
            eq4 = max(eq4, low(lhs - rhs).max_abs())
            lhs = commutator(C[j], C_star[k]) @ Q_low
            rhs = PA_star[k] @ (PA[j] @ Q_low) + Q @ (inner @ Q_low)
            eq5 = max(eq5, low(lhs - rhs).max_abs())
    delta_A = SparseMatrix.identity(ambient_basis(d, r, N))
    delta_B, delta_C = P, Q
    for k in range(d):
        delta_A = delta_A - A[k] @ A_star[k]
        delta_B = delta_B - B[k] @ B_star[k]
        delta_C = delta_C - C[k] @ C_star[k]
    rhs6 = P @ (delta_A @ P_low)
    for k in range(d):
        rhs6 = rhs6 + PA[k] @ (PA_star[k] @ P_low)
    eq6 = low(delta_B @ P_low - rhs6).max_abs()
    eq7 = low(delta_C @ Q_low - Q @ (delta_A @ Q_low)).max_abs()
    d2 = max(dirac_square_defect(ops, d, top) for ops in (A, B, C))
    defects = dict(zip(IDENTITIES, (eq4, eq5, eq6, eq7, d2)))
    return IdentityReport(defects, top, N, "exact")
