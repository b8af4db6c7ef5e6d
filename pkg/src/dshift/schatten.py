"""Singular-value spectra of [P_M, S_k] and Schatten-class diagnostics.

For a monomial submodule the commutator maps ``z^n (x) zeta`` to
``z^{n+e_k} (x) (P_{E(n+e_k)} - P_{E(n)}) zeta``, so its singular values are
``sqrt((n_k+1)/(|n|+1))`` with multiplicity ``dim E(n+e_k) - dim E(n)``.  A jump
needs a generator with ``nu_k = n_k + 1``, so only finitely many values of
``n_k`` occur; the other coordinates matter only up to the largest generator
component on that axis, which lets whole families of lattice points be counted
by a binomial instead of enumerated.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exact import to_fraction
from .fock import TruncatedOperator, gram
from .lattice import MonomialSubmodule, fiber_dim, minimalize, shift

REL_TOL = 1e-6
P_MARGIN = 0.1
MIN_FIT_ENTRIES = 32


@dataclass
class SpectrumStream:
    """Coalesced singular values, descending, as exact ``sigma^2`` with multiplicities.

    ``steps`` groups the raw (uncoalesced) values by enumeration step, which for
    commutator spectra is the total degree of the source monomial.
    ``exhausted`` is true when the list is the complete spectrum.  Entries with
    ``sigma^2 >= floor`` are complete (no family beyond the budget reaches them),
    so only those are used for the tail fit.
    """

    entries: list[tuple[Fraction, int]]
    exhausted: bool
    budget: int
    steps: list[list[tuple[Fraction, int]]] = field(default_factory=list, repr=False)
    floor: Fraction = Fraction(0)

    @property
    def sigmas(self) -> np.ndarray:
        return np.sqrt(np.array([float(s) for s, _ in self.entries]))

    @property
    def multiplicities(self) -> np.ndarray:
        return np.array([m for _, m in self.entries], dtype=np.int64)

    @property
    def total_multiplicity(self) -> int:
        return sum(m for _, m in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    @classmethod
    def from_values(cls, values: Sequence, exhausted: bool = False) -> "SpectrumStream":
        """Build from exact sigma^2 values (one step per value, in the given order)."""
        steps = [[(to_fraction(v), 1)] for v in values]
        return cls(coalesce(v for step in steps for v in step), exhausted, len(steps), steps)


def coalesce(pairs) -> list[tuple[Fraction, int]]:
    acc: dict[Fraction, int] = {}
    for s, m in pairs:
        if s != 0 and m:
            acc[s] = acc.get(s, 0) + m
    return sorted(acc.items(), key=lambda e: e[0], reverse=True)


def _jump_types(M: MonomialSubmodule, k: int):
    """Yield (c, fixed, saturated, jump) describing families of jump points.

    ``c`` is the axis-k coordinate; ``fixed`` maps other axes to exact values;
    ``saturated`` lists axes j whose coordinate is free but >= their threshold.
    """
    d = M.d
    gens = M.generators
    others = [j for j in range(d) if j != k - 1]
    cuts = {j: max(nu[j] for nu, _ in gens) for j in others}
    for c in sorted({nu[k - 1] - 1 for nu, _ in gens if nu[k - 1] >= 1}):
        choices = [[(v, False) for v in range(cuts[j])] + [(cuts[j], True)] for j in others]
        for combo in itertools.product(*choices):
            n = [0] * d
            n[k - 1] = c
            sat = []
            for j, (v, is_sat) in zip(others, combo):
                n[j] = v
                if is_sat:
                    sat.append(j)
            n = tuple(n)
            jump = fiber_dim(M, shift(n, k)) - fiber_dim(M, n)
            if jump:
                yield c, n, sat, jump


def commutator_spectrum(M: MonomialSubmodule, k: int, budget: int) -> SpectrumStream:
    """Exact singular values of [P_M, S_k] from source monomials of degree <= budget."""
    if budget < 0:
        raise ValueError("budget must be non-negative")
    if not 1 <= k <= M.d:
        raise ValueError(f"axis {k} outside 1..{M.d}")
    Mm = minimalize(M)
    if not Mm.generators:
        return SpectrumStream([], True, budget, [])
    families = list(_jump_types(Mm, k))
    infinite = any(sat for _, _, sat, _ in families)
    steps: list[list[tuple[Fraction, int]]] = []
    for t in range(budget + 1):
        acc: dict[int, int] = {}
        for c, base, sat, jump in families:
            extra = t - sum(base)
            if extra < 0:
                continue
            s = len(sat)
            count = math.comb(extra + s - 1, s - 1) if s else int(extra == 0)
            if count:
                acc[c] = acc.get(c, 0) + jump * count
        steps.append([(Fraction(c + 1, t + 1), m) for c, m in sorted(acc.items())])
    entries = coalesce(v for step in steps for v in step)
    exhausted = not infinite and budget >= max((sum(b) for _, b, _, _ in families), default=0)
    floor = Fraction(max((c + 1 for c, _, sat, _ in families if sat), default=0), budget + 1)
    return SpectrumStream(entries, exhausted, budget, steps, floor)


def brute_force_spectrum(M: MonomialSubmodule, k: int, budget: int) -> list[tuple[Fraction, int]]:
    """Direct lattice enumeration of the same spectrum (independent check)."""
    from .lattice import graded_lattice

    pairs = []
    for n in graded_lattice(M.d, budget):
        jump = fiber_dim(M, shift(n, k)) - fiber_dim(M, n)
        if jump:
            pairs.append((Fraction(n[k - 1] + 1, sum(n) + 1), jump))
    return coalesce(pairs)


@dataclass
class TailFit:
    alpha: float
    critical_p: float
    residual: float
    status: str  # "fitted" | "finite" | "inconclusive"

    @property
    def compact(self) -> bool | None:
        if self.status == "finite":
            return True
        if self.status != "fitted":
            return None
        return self.alpha < 0


def fit_tail(sigmas: Sequence[float], multiplicities: Sequence[int] | None = None, exhausted: bool = False) -> TailFit:
    """Least-squares slope of log sigma_j against log j over the last half of the entries."""
    s = np.asarray(sigmas, dtype=float)
    m = np.ones(len(s), dtype=np.int64) if multiplicities is None else np.asarray(multiplicities, dtype=np.int64)
    keep = s > 0
    s, m = s[keep], m[keep]
    if exhausted:
        return TailFit(-math.inf, 0.0, 0.0, "finite")
    if len(s) < MIN_FIT_ENTRIES:
        return TailFit(math.nan, math.nan, math.nan, "inconclusive")
    j = np.cumsum(m).astype(float)
    half = len(s) // 2
    x, y = np.log(j[half:]), np.log(s[half:])
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    alpha = float(slope)
    critical = -1.0 / alpha if alpha < -1e-12 else math.inf
    return TailFit(alpha, critical, resid, "fitted")


def tail_exponent(spec: SpectrumStream) -> TailFit:
    keep = [(s, m) for s, m in spec.entries if s >= spec.floor]
    sigmas = np.sqrt(np.array([float(s) for s, _ in keep]))
    return fit_tail(sigmas, [m for _, m in keep], spec.exhausted)


@dataclass
class SchattenReport:
    p: float
    partial_sums: list[float]
    last_increment: float
    relative_increment: float
    verdict: str  # converged | diverging | inconclusive
    fit: TailFit

    @property
    def value(self) -> float:
        return self.partial_sums[-1] if self.partial_sums else 0.0


def _verdict(p: float, rel: float, fit: TailFit) -> str:
    if fit.status == "finite":
        return "converged"
    if fit.status != "fitted":
        return "inconclusive"
    if fit.critical_p >= p - P_MARGIN:
        return "diverging"
    return "converged" if rel < REL_TOL else "inconclusive"


def _step_sums(steps, p: float) -> list[float]:
    sums, total = [], 0.0
    for step in steps:
        total += sum(m * float(s) ** (p / 2) for s, m in step)
        sums.append(total)
    return sums


def schatten_sum(spec: SpectrumStream, p: float) -> SchattenReport:
    """Running sums of mult * sigma^p per enumeration step, with a convergence verdict.

    Converged needs the last relative increment below 1e-6 and a fitted critical
    exponent below ``p - 0.1``; the sums alone cannot tell slow divergence apart.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    fit = tail_exponent(spec)
    if not spec.entries:
        return SchattenReport(p, [0.0], 0.0, 0.0, "converged", TailFit(-math.inf, 0.0, 0.0, "finite"))
    steps = spec.steps or [[e] for e in spec.entries[::-1]]
    sums = _step_sums(steps, p)
    last = sums[-1] - (sums[-2] if len(sums) > 1 else 0.0)
    rel = last / sums[-1] if sums[-1] else 0.0
    return SchattenReport(p, sums, last, rel, _verdict(p, rel, fit), fit)


def number_operator_spectrum(d: int, budget: int) -> SpectrumStream:
    """Eigenvalues 1/(n+1) of (1+N)^{-1} with multiplicity C(n+d-1, d-1)."""
    steps = []
    mult = 1
    for n in range(budget + 1):
        if n:
            mult = mult * (n + d - 1) // n
        steps.append([(Fraction(1, (n + 1) ** 2), mult)])
    entries = [step[0] for step in steps]
    return SpectrumStream(entries, False, budget, steps)


def number_operator_series(d: int, p: float, budget: int = 20000) -> SchattenReport:
    if budget < 1:
        raise ValueError("budget must be >= 1")
    return schatten_sum(number_operator_spectrum(d, budget), p)


def numeric_singular_values(T: TruncatedOperator, max_degree: int | None = None, on_support: bool = True) -> np.ndarray:
    """Singular values of T in Fock-orthonormal coordinates, descending.

    With ``on_support`` the matrix is taken on the orthonormalized support basis
    of the space T acts on; ``max_degree`` keeps only source vectors up to that
    degree (the truncation-exact part).
    """
    if on_support:
        vecs = [{(n, i): x for i, x in enumerate(w) if x != 0} for n, w in T.support]
        norms = [math.sqrt(float(gram((n, 0)) * sum(x * x for x in w))) for n, w in T.support]
        degs = [sum(n) for n, _ in T.support]
    else:
        vecs = [{k: Fraction(1)} for k in T.basis]
        norms = [math.sqrt(float(gram(k))) for k in T.basis]
        degs = [sum(k[0]) for k in T.basis]
    cols = [i for i, dg in enumerate(degs) if max_degree is None or dg <= max_degree]
    A = np.zeros((len(vecs), len(cols)))
    # Orthogonal support vectors within one degree share a Gram factor, so
    # coordinates in the orthonormalized basis are inner products / norms.
    row_index: dict = {}
    for idx, v in enumerate(vecs):
        for key, x in v.items():
            row_index.setdefault(key, []).append((idx, float(x)))
    for jcol, idx in enumerate(cols):
        image = T.matrix.apply(vecs[idx])
        for key, val in image.items():
            g = float(gram(key))
            for ridx, x in row_index.get(key, ()):
                A[ridx, jcol] += g * float(val) * x / norms[ridx]
        A[:, jcol] /= norms[idx]
    if A.size == 0:
        return np.zeros(0)
    if not np.all(np.isfinite(A)):
        raise FloatingPointError("non-finite entries in the orthonormalized matrix")
    try:
        sv = np.linalg.svd(A, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise FloatingPointError(f"SVD failed: {exc}") from exc
    return np.sort(sv)[::-1]
