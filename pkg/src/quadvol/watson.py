"""Watson moves and reduction to a maximal lattice with square-free determinant.

``E_p(L) = L + (p^-1 L cap p L*)`` and ``F_p(L) = E_p(sqrt(p) L)``.  With L
modelled as Z^n, ``p^-1 L cap p L* = {y/p : S y = 0 mod p^2}``.  Writing
``Lm S R = diag(d)`` (Smith form), those y form ``R diag(p^2/gcd(d_i, p^2)) Z^n``
and so ``E_p(L)`` has basis ``R diag(f_i)`` with ``f_i = 1/p`` if ``p^2 | d_i``
and 1 otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidArgument
from .exactnum import factorize, is_prime
from .lattice import GramMatrix, hermite_basis, is_indefinite, matmul, rational_inverse, smith_form, transpose


@dataclass(frozen=True)
class ReductionStep:
    move: str  # "E" or "F"
    prime: int
    gram_before: GramMatrix
    gram_after: GramMatrix

    def __str__(self) -> str:
        return f"{self.move}_{self.prime}, det {self.gram_before.det} -> {self.gram_after.det}"


def watson_E_basis(S: GramMatrix, p: int) -> tuple[list[list[Fraction]], GramMatrix]:
    """Basis of E_p(L) (columns, in coordinates of L) and its Gram matrix."""
    if not is_prime(p):
        raise InvalidArgument(f"{p} is not a prime")
    d, _, R = smith_form(S.entries)
    n = S.n
    # p E_p(L) = R diag(1 or p) Z^n; a Hermite basis of it keeps entries small
    scale = [1 if di % (p * p) == 0 else p for di in d]
    C = hermite_basis([[R[i][j] * scale[j] for j in range(n)] for i in range(n)])
    B = [[Fraction(C[i][j], p) for j in range(n)] for i in range(n)]
    G = matmul(transpose(B), matmul([[Fraction(x) for x in row] for row in S.entries], B))
    if any(x.denominator != 1 for row in G for x in row):
        raise AssertionError("E_p produced a non-integral lattice")
    return B, GramMatrix([[int(x) for x in row] for row in G])


def watson_E(S: GramMatrix, p: int) -> GramMatrix:
    return watson_E_basis(S, p)[1]


def watson_F(S: GramMatrix, p: int) -> GramMatrix:
    return watson_E(S.scaled(p), p)


def contains_original(B: list[list[Fraction]]) -> bool:
    """L is a sublattice of span(B) iff B^-1 is integral."""
    return all(x.denominator == 1 for row in rational_inverse(B) for x in row)


def step_bound(det: int) -> int:
    fac = factorize(det)
    return sum((e + 1) // 2 for _, e in fac.factors) + fac.omega


def _next_move(S: GramMatrix) -> tuple[str, int] | None:
    d = smith_form(S.entries)[0]
    primes = factorize(S.det).primes
    for p in primes:
        if any(x % (p * p) == 0 for x in d):
            return "E", p
    for p in primes:
        if sum(1 for x in d if x % p == 0) >= 2:
            return "F", p
    return None


def reduce_to_square_free(S: GramMatrix) -> tuple[GramMatrix, list[ReductionStep]]:
    """Embed an indefinite ternary lattice into one with square-free determinant.

    E moves are exhausted (smallest prime first) before any F move; the
    E condition is re-checked after every step.
    """
    if S.n != 3:
        raise InvalidArgument("reduction is only defined for ternary lattices")
    if not is_indefinite(S):
        raise InvalidArgument("reduction needs an indefinite lattice")
    bound = step_bound(S.det)
    steps: list[ReductionStep] = []
    cur = S
    while (move := _next_move(cur)) is not None:
        kind, p = move
        nxt = watson_E(cur, p) if kind == "E" else watson_F(cur, p)
        steps.append(ReductionStep(kind, p, cur, nxt))
        cur = nxt
        if len(steps) > bound:
            raise AssertionError(f"reduction exceeded its step bound {bound}")
    return cur, steps
