"""Floating-point experiments for submodules generated by homogeneous vector polynomials.

A homogeneous generating set makes M graded, so P_M is block diagonal by total
degree and [P_M, S_k] maps degree n to degree n+1.  Everything here is computed
in Fock-orthonormal coordinates (monomial coefficients scaled by ||z^m||).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg

from .exact import Vector, to_fraction
from .fock import fock_norm_sq
from .lattice import DimensionError, MonomialSubmodule, multi_index, multi_indices
from .schatten import TailFit, fit_tail

RANK_TOL = 1e-10
Polynomial = tuple[tuple[tuple[int, ...], Vector], ...]


class NotHomogeneousError(ValueError):
    pass


def _as_polynomial(terms, d: int, r: int) -> Polynomial:
    items = terms.items() if isinstance(terms, Mapping) else terms
    acc: dict = {}
    for exponent, coeff in items:
        m = multi_index(exponent)
        if len(m) != d:
            raise DimensionError(f"exponent {m} has length {len(m)}, expected d={d}")
        if r == 1 and not isinstance(coeff, (list, tuple)):
            coeff = (coeff,)
        vec = tuple(to_fraction(x) for x in coeff)
        if len(vec) != r:
            raise DimensionError(f"coefficient {vec} has length {len(vec)}, expected r={r}")
        prev = acc.get(m, (0,) * r)
        acc[m] = tuple(a + b for a, b in zip(prev, vec))
    return tuple((m, v) for m, v in sorted(acc.items()) if any(v))


@dataclass(frozen=True)
class HomogeneousGeneratorSet:
    """Generators given as sequences of (exponent, r-vector coefficient)."""

    d: int
    r: int
    generators: tuple[Polynomial, ...]

    def __post_init__(self):
        polys = []
        for idx, g in enumerate(self.generators):
            poly = _as_polynomial(g, self.d, self.r)
            if not poly:
                raise ValueError(f"generator {idx} is zero")
            degs = {sum(m) for m, _ in poly}
            if len(degs) != 1:
                raise NotHomogeneousError(f"generator {idx} is not homogeneous (degrees {sorted(degs)})")
            polys.append(poly)
        object.__setattr__(self, "generators", tuple(polys))

    def degrees(self) -> list[int]:
        return [sum(g[0][0]) for g in self.generators]

    @classmethod
    def from_monomial(cls, M: MonomialSubmodule) -> "HomogeneousGeneratorSet":
        gens = [((nu, v),) for nu, fib in M.generators for v in fib]
        return cls(M.d, M.r, tuple(gens))


def _coords(d: int, r: int, n: int) -> dict:
    return {(m, i): idx for idx, (m, i) in enumerate((m, i) for m in multi_indices(d, n) for i in range(r))}


def graded_subspace_bases(G: HomogeneousGeneratorSet, N: int) -> list[np.ndarray]:
    """Orthonormal basis (columns, Fock-orthonormal coordinates) of M_n for n = 0..N."""
    if N < max(G.degrees(), default=0):
        raise ValueError("N must be at least the largest generator degree")
    bases = []
    for n in range(N + 1):
        index = _coords(G.d, G.r, n)
        columns = []
        for g, deg in zip(G.generators, G.degrees()):
            if deg > n:
                continue
            for a in multi_indices(G.d, n - deg):
                v = np.zeros(len(index))
                for m, coeff in g:
                    mm = tuple(x + y for x, y in zip(m, a))
                    scale = math.sqrt(float(fock_norm_sq(mm)))
                    for i, c in enumerate(coeff):
                        if c:
                            v[index[(mm, i)]] += float(c) * scale
                columns.append(v / np.linalg.norm(v))
        if not columns:
            bases.append(np.zeros((len(index), 0)))
            continue
        A = np.column_stack(columns)
        Q, R, _ = scipy.linalg.qr(A, pivoting=True, mode="economic")
        diag = np.abs(np.diag(R))
        rank = int(np.sum(diag > RANK_TOL))
        bases.append(Q[:, :rank])
    return bases


def shift_block(d: int, r: int, k: int, n: int) -> np.ndarray:
    """S_k from degree n to degree n+1 in orthonormal coordinates."""
    src, dst = _coords(d, r, n), _coords(d, r, n + 1)
    S = np.zeros((len(dst), len(src)))
    for (m, i), j in src.items():
        mm = m[: k - 1] + (m[k - 1] + 1,) + m[k:]
        S[dst[(mm, i)], j] = math.sqrt((m[k - 1] + 1) / (sum(m) + 1))
    return S


@dataclass
class AxisDecay:
    k: int
    singular_values: np.ndarray
    by_degree: list[np.ndarray]
    upper_half_max: float
    fit: TailFit


@dataclass
class DecayReport:
    N: int
    axes: list[AxisDecay]
    dims: list[int] = field(default_factory=list)


def commutator_blocks(G: HomogeneousGeneratorSet, N: int, bases: list[np.ndarray] | None = None):
    """Yield (k, n, block) with block = [P_M, S_k] from degree n to n+1, n <= N-1."""
    if bases is None:
        bases = graded_subspace_bases(G, N)
    proj = [Q @ Q.T for Q in bases]
    for k in range(1, G.d + 1):
        for n in range(N):
            S = shift_block(G.d, G.r, k, n)
            yield k, n, proj[n + 1] @ S - S @ proj[n]


def probe_commutator_decay(G: HomogeneousGeneratorSet, N: int) -> DecayReport:
    """Singular values of the truncated [P_M, S_k] for each axis, grouped by source degree."""
    bases = graded_subspace_bases(G, N)
    per_axis: dict[int, list[np.ndarray]] = {k: [] for k in range(1, G.d + 1)}
    for k, n, block in commutator_blocks(G, N, bases):
        per_axis[k].append(np.linalg.svd(block, compute_uv=False))
    axes = []
    lo = math.ceil(N / 2)
    for k, blocks in per_axis.items():
        allsv = np.sort(np.concatenate(blocks))[::-1] if blocks else np.zeros(0)
        nonzero = allsv[allsv > RANK_TOL]
        upper = [b.max() if b.size else 0.0 for n, b in enumerate(blocks) if n >= lo]
        axes.append(AxisDecay(k, nonzero, blocks, float(max(upper, default=0.0)), fit_tail(nonzero)))
    return DecayReport(N, axes, [Q.shape[1] for Q in bases])


@dataclass
class DecayVerdict:
    verdict: str  # decaying | non-decaying | inconclusive
    cutoffs: tuple[int, ...]
    upper_half_max: dict[int, list[float]]
    per_axis: dict[int, str]
    reports: list[DecayReport] = field(default_factory=list, repr=False)


def _trend(values: Sequence[float]) -> str:
    if all(v <= RANK_TOL for v in values):
        return "decaying"
    diffs = np.diff(values)
    if np.all(diffs < 0):
        return "decaying"
    if np.all(diffs >= 0):
        return "non-decaying"
    return "inconclusive"


def decay_verdict(G: HomogeneousGeneratorSet, cutoffs: Sequence[int] = (8, 10, 12)) -> DecayVerdict:
    """Compactness evidence: the largest singular value sourced from the upper half
    of the truncation must shrink as the cutoff grows (at least three cutoffs)."""
    cutoffs = tuple(sorted(cutoffs))
    if len(cutoffs) < 3:
        raise ValueError("need at least three cutoffs")
    reports = [probe_commutator_decay(G, N) for N in cutoffs]
    maxima = {k: [rep.axes[k - 1].upper_half_max for rep in reports] for k in range(1, G.d + 1)}
    per_axis = {k: _trend(v) for k, v in maxima.items()}
    verdicts = set(per_axis.values())
    if verdicts == {"decaying"}:
        verdict = "decaying"
    elif "non-decaying" in verdicts:
        verdict = "non-decaying"
    else:
        verdict = "inconclusive"
    return DecayVerdict(verdict, cutoffs, maxima, per_axis, reports)
