"""Local densities alpha_p(L) of the automorphism problem ``X^T S X = S``.

Two independent routes:

* closed formulas driven by the Jordan decomposition (``density_odd``,
  ``density_two``);
* ``brute_force_density``, the definitional count
  ``alpha_p = 1/2 * p^(-r n(n-1)/2) * #{X mod p^r : X^T S X = S mod p^r}``.

The brute-force count is organised column by column: column i of X must be
a vector x_i with ``(x_i, x_k) = S[i][k]`` for all k <= i.  This visits
exactly the solutions of the full enumeration, so the count is identical,
but the work is proportional to the number of solutions rather than
``p^(r n^2)``.  The budget check is still expressed in terms of the full
enumeration size so that callers can reason about it.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import InvalidArgument, ResourceLimitError, WrongDispatch
from .exactnum import is_prime
from .jordan import JordanDecomposition, chi, jordan_decompose
from .lattice import GramMatrix

DEFAULT_BUDGET = 2**32


@dataclass(frozen=True)
class DensityBreakdown:
    s: int
    omega: int
    P: Fraction
    E: Fraction
    q: int = 0
    E_factors: tuple[tuple[int, Fraction], ...] = ()


@dataclass(frozen=True)
class LocalDensity:
    p: int
    value: Fraction
    method: str  # "closed_form" or "oracle"
    r: Optional[int] = None
    breakdown: Optional[DensityBreakdown] = field(default=None, compare=False)

    def __post_init__(self):
        if self.value <= 0:
            raise AssertionError(f"local density must be positive, got {self.value}")


def P_factor(p: int, n: int) -> Fraction:
    """prod_{i=1}^{n} (1 - p^(-2i))."""
    out = Fraction(1)
    for i in range(1, n + 1):
        out *= 1 - Fraction(1, p ** (2 * i))
    return out


def omega_exponent(J: JordanDecomposition) -> Fraction:
    """sum_j j n_j ((n_j + 1)/2 + sum_{k>j} n_k)."""
    total = Fraction(0)
    comps = J.components
    for idx, (j, d) in enumerate(comps):
        above = sum(e.rank for _, e in comps[idx + 1 :])
        total += j * d.rank * (Fraction(d.rank + 1, 2) + above)
    return total


def _int_exponent(w: Fraction) -> int:
    if w.denominator != 1:
        raise AssertionError(f"non-integral exponent {w}")
    return int(w)


def density_odd(J: JordanDecomposition) -> LocalDensity:
    p = J.p
    if p == 2:
        raise WrongDispatch("density_odd called with p = 2")
    w = _int_exponent(omega_exponent(J))
    P = Fraction(1)
    E = Fraction(1)
    for _, d in J.components:
        P *= P_factor(p, d.rank // 2)
        c = chi(d, p)
        if c:
            # chi vanishes in odd rank, so p^(-n_j/2) is always an integer power here
            assert d.rank % 2 == 0
            E /= 1 + c * Fraction(1, p ** (d.rank // 2))
    value = Fraction(2) ** (J.s - 1) * Fraction(p) ** w * P * E
    return LocalDensity(p, value, "closed_form", breakdown=DensityBreakdown(J.s, w, P, E))


def density_two(J: JordanDecomposition) -> LocalDensity:
    if J.p != 2:
        raise WrongDispatch(f"density_two called with p = {J.p}")
    n = J.rank
    w = _int_exponent(omega_exponent(J))
    comp = dict(J.components)

    def is_odd(j: int) -> bool:
        return j in comp and comp[j].is_odd_component

    q = 0
    P = Fraction(1)
    for j, d in J.components:
        if d.is_odd_component:
            q += d.rank + 1 if is_odd(j + 1) else d.rank
        P *= P_factor(2, d.even_rank // 2)

    lo, hi = min(comp) - 1, max(comp) + 1
    E = Fraction(1)
    factors = []
    for j in range(lo, hi + 1):
        d = comp.get(j)
        even_rank = d.even_rank if d else 0
        even_chi = d.even_chi if d else 1
        exceptional = d is not None and d.exceptional
        if not is_odd(j - 1) and not is_odd(j + 1) and not exceptional:
            Ej = Fraction(1, 2) * (1 + even_chi * Fraction(1, 2 ** (even_rank // 2)))
        else:
            Ej = Fraction(1, 2)
        factors.append((j, Ej))
        E /= Ej
    value = Fraction(2) ** (n - 1 + w - q) * P * E
    return LocalDensity(2, value, "closed_form", breakdown=DensityBreakdown(J.s, w, P, E, q, tuple(factors)))


def density(S: GramMatrix, p: int) -> LocalDensity:
    J = jordan_decompose(S, p)
    return density_two(J) if p == 2 else density_odd(J)


# ---------------------------------------------------------------- oracle


def enumeration_size(n: int, p: int, r: int) -> int:
    return p ** (r * n * n)


def _all_vectors(n: int, m: int) -> np.ndarray:
    grids = np.meshgrid(*[np.arange(m, dtype=np.int64)] * n, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


class _Counter:
    """Counts X mod m with X^T S X = T mod m (T defaults to S), column by column."""

    def __init__(self, S: GramMatrix, m: int, T: GramMatrix | None = None):
        self.n = S.n
        self.m = m
        self.S = np.array((T or S).entries, dtype=np.int64) % m  # target values
        vecs = _all_vectors(self.n, m)
        Sv = (vecs @ (np.array(S.entries, dtype=np.int64) % m)) % m  # row i is S x_i
        norms = np.einsum("ij,ij->i", Sv, vecs) % m
        self.vecs = vecs
        self.Sv = Sv
        self.by_norm = [np.nonzero(norms == self.S[i, i])[0] for i in range(self.n)]

    def level0(self) -> np.ndarray:
        return self.by_norm[0]

    def count_from(self, first: np.ndarray) -> int:
        """Number of solutions whose first column lies in ``first``."""
        n, m = self.n, self.m
        if n == 1:
            return int(len(first))
        total = 0
        for x0 in first:
            total += self._extend([int(x0)])
        return total

    def _candidates(self, chosen: list[int]) -> np.ndarray:
        i = len(chosen)
        cand = self.by_norm[i]
        mask = np.ones(len(cand), dtype=bool)
        V = self.vecs[cand]
        for k, xk in enumerate(chosen):
            mask &= (V @ self.Sv[xk]) % self.m == self.S[k, i]
        return cand[mask]

    def _extend(self, chosen: list[int]) -> int:
        i = len(chosen)
        n, m = self.n, self.m
        cand = self._candidates(chosen)
        if i == n - 1:
            return int(len(cand))
        if i == n - 2:
            # last two columns at once: count pairs (a, b) with (a, b) = S[i][n-1]
            last = self.by_norm[n - 1]
            V = self.vecs[last]
            mask = np.ones(len(last), dtype=bool)
            for k, xk in enumerate(chosen):
                mask &= (V @ self.Sv[xk]) % m == self.S[k, n - 1]
            last = last[mask]
            if not len(cand) or not len(last):
                return 0
            pair = (self.Sv[cand] @ self.vecs[last].T) % m == self.S[i, n - 1]
            return int(pair.sum())
        return sum(self._extend(chosen + [int(x)]) for x in cand)


def _count_partition(args) -> int:
    entries, m, first = args
    c = _Counter(GramMatrix(entries), m)
    return c.count_from(np.asarray(first, dtype=np.int64))


def count_representations(S: GramMatrix, T: GramMatrix, m: int) -> int:
    """#{X in Mat_n(Z/m) : X^T S X = T mod m} for S, T of equal rank."""
    if S.n != T.n:
        raise InvalidArgument("S and T must have the same rank")
    counter = _Counter(S, m, T)
    return counter.count_from(counter.level0())


def count_automorphs(S: GramMatrix, m: int, jobs: int = 1) -> int:
    """#{X in Mat_n(Z/m) : X^T S X = S mod m}."""
    counter = _Counter(S, m)
    first = counter.level0()
    if jobs <= 1 or len(first) < 2 * jobs:
        return counter.count_from(first)
    parts = np.array_split(first, jobs)
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        results = pool.map(_count_partition, [(S.entries, m, part.tolist()) for part in parts])
        return sum(results)


def brute_force_density(
    S: GramMatrix, p: int, r: int, budget: int = DEFAULT_BUDGET, jobs: int = 1
) -> LocalDensity:
    if not is_prime(p):
        raise InvalidArgument(f"{p} is not a prime")
    if r < 1:
        raise InvalidArgument("precision r must be >= 1")
    n = S.n
    need = enumeration_size(n, p, r)
    if need > budget:
        raise ResourceLimitError(need, budget)
    N = count_automorphs(S, p**r, jobs)
    value = Fraction(N, 2 * p ** (r * n * (n - 1) // 2))
    return LocalDensity(p, value, "oracle", r=r)


def stabilization_precision(S: GramMatrix, p: int) -> int:
    """Smallest r from which the definitional count is constant in r.

    r > max Jordan scale + 2 v_p(2) suffices; it is checked empirically
    against r + 1 in the test suite.
    """
    J = jordan_decompose(S, p)
    top = max(J.scales())
    return top + 1 + (2 if p == 2 else 0)
