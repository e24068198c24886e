"""Integral lattices given by Gram matrices, and their global invariants.

Convention: the Gram matrix holds the bilinear values ``(e_i, e_j)``, with
``(x, y) = (Q(x + y) - Q(x) - Q(y)) / 2``.  A lattice is *even* when every
``(x, x)`` is even, i.e. when all diagonal entries are even.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InvalidArgument
from .exactnum import factorize, hilbert_symbol

Matrix = list[list[int]]


@dataclass(frozen=True)
class GramMatrix:
    entries: tuple[tuple[int, ...], ...]

    def __init__(self, entries: Iterable[Iterable[int]]):
        rows = tuple(tuple(int(x) for x in row) for row in entries)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise InvalidArgument("Gram matrix must be square and nonempty")
        for i in range(n):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise InvalidArgument("Gram matrix must be symmetric")
        object.__setattr__(self, "entries", rows)
        if determinant(rows) == 0:
            raise InvalidArgument("Gram matrix is degenerate")

    @classmethod
    def diag(cls, *values: int) -> "GramMatrix":
        n = len(values)
        return cls([[values[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def n(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def rows(self) -> Matrix:
        return [list(r) for r in self.entries]

    @property
    def det(self) -> int:
        return determinant(self.entries)

    def scaled(self, k: int) -> "GramMatrix":
        return GramMatrix([[k * x for x in row] for row in self.entries])

    def transform(self, P: Sequence[Sequence[int]]) -> "GramMatrix":
        """Gram matrix of the basis given by the columns of P, i.e. P^T S P."""
        return GramMatrix(congruence(self.entries, P))

    def __str__(self) -> str:
        return format_gram(self)


def direct_sum(*grams: GramMatrix) -> GramMatrix:
    n = sum(g.n for g in grams)
    out = [[0] * n for _ in range(n)]
    k = 0
    for g in grams:
        for i in range(g.n):
            for j in range(g.n):
                out[k + i][k + j] = g[i, j]
        k += g.n
    return GramMatrix(out)


# ---------------------------------------------------------------- matrices


def determinant(M: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free elimination."""
    A = [list(r) for r in M]
    n = len(A)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def matmul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


def transpose(A):
    return [list(r) for r in zip(*A)]


def congruence(S, P):
    """P^T S P."""
    return matmul(transpose(P), matmul(S, P))


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_form(M: Sequence[Sequence[int]]) -> tuple[list[int], Matrix, Matrix]:
    """Smith normal form of a nonsingular square integer matrix.

    Returns ``(d, L, R)`` with ``L @ M @ R == diag(d)``, L and R unimodular,
    ``d[0] | d[1] | ...`` and all ``d[i] > 0``.
    """
    A = [list(r) for r in M]
    n = len(A)
    L, R = identity(n), identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        L[i], L[j] = L[j], L[i]

    def swap_cols(i, j):
        for X in (A, R):
            for row in X:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        for X in (A, L):
            X[dst] = [a + q * b for a, b in zip(X[dst], X[src])]

    def add_col(dst, src, q):
        for X in (A, R):
            for row in X:
                row[dst] += q * row[src]

    for t in range(n):
        while True:
            nz = [(abs(A[i][j]), i, j) for i in range(t, n) for j in range(t, n) if A[i][j]]
            if not nz:
                raise InvalidArgument("matrix is singular")
            _, i, j = min(nz)
            swap_rows(t, i)
            swap_cols(t, j)
            p = A[t][t]
            dirty = False
            for i in range(t + 1, n):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    dirty |= A[i][t] != 0
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    dirty |= A[t][j] != 0
            if dirty:
                continue
            bad = next(
                (i for i in range(t + 1, n) for j in range(t + 1, n) if A[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            L[t] = [-x for x in L[t]]
            A[t] = [-x for x in A[t]]
    return [A[i][i] for i in range(n)], L, R


def hermite_basis(C: Sequence[Sequence[int]]) -> Matrix:
    """Lower-triangular Hermite basis of the lattice spanned by the columns of C.

    Diagonal entries are positive and each row's off-diagonal entries are
    reduced into ``[0, diagonal)``.  C must be square and nonsingular.
    """
    A = [list(r) for r in C]
    n = len(A)
    for i in range(n):
        # gcd-combine columns i..n-1 until only column i has a nonzero in row i
        while True:
            nz = [j for j in range(i, n) if A[i][j]]
            if not nz:
                raise InvalidArgument("matrix is singular")
            j = min(nz, key=lambda c: abs(A[i][c]))
            for row in A:
                row[i], row[j] = row[j], row[i]
            done = True
            for j in range(i + 1, n):
                if A[i][j]:
                    q = A[i][j] // A[i][i]
                    for row in A:
                        row[j] -= q * row[i]
                    done &= A[i][j] == 0
            if done:
                break
        if A[i][i] < 0:
            for row in A:
                row[i] = -row[i]
        for j in range(i):
            q = A[i][j] // A[i][i]
            for row in A:
                row[j] -= q * row[i]
    return A


def smith_invariant_factors(S: GramMatrix) -> list[int]:
    return smith_form(S.entries)[0]


def inverse_unimodular(M: Sequence[Sequence[int]]) -> Matrix:
    """Exact inverse of a unimodular integer matrix (raises otherwise)."""
    inv = rational_inverse(M)
    if any(x.denominator != 1 for row in inv for x in row):
        raise InvalidArgument("matrix is not unimodular")
    return [[int(x) for x in row] for row in inv]


def rational_inverse(M: Sequence[Sequence[int | Fraction]]) -> list[list[Fraction]]:
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            raise InvalidArgument("matrix is singular")
        A[c], A[piv] = A[piv], A[c]
        inv = 1 / A[c][c]
        A[c] = [x * inv for x in A[c]]
        for r in range(n):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    return [row[n:] for row in A]


U = GramMatrix([[0, 1], [1, 0]])
V = GramMatrix([[2, 1], [1, 2]])


# ------------------------------------------------------- diagonalization


def rational_diagonal(S: GramMatrix, order: Sequence[int] | None = None) -> list[Fraction]:
    """Diagonal entries of a congruence-diagonalization of S over Q.

    ``order`` permutes the basis first; the result depends on it, but the
    invariants read off from it (signature, Hasse symbols) do not.
    """
    n = S.n
    perm = list(order) if order is not None else list(range(n))
    M = [[Fraction(S[perm[i], perm[j]]) for j in range(n)] for i in range(n)]
    diag = []
    for k in range(n):
        piv = next((i for i in range(k, n) if M[i][i] != 0), None)
        if piv is None:
            # all remaining diagonals vanish; e_i += e_j makes M[i][i] = 2 M[i][j]
            i, j = next((i, j) for i in range(k, n) for j in range(k, n) if M[i][j] != 0)
            for c in range(n):
                M[i][c] += M[j][c]
            for r in range(n):
                M[r][i] += M[r][j]
            piv = i
        M[k], M[piv] = M[piv], M[k]
        for row in M:
            row[k], row[piv] = row[piv], row[k]
        a = M[k][k]
        for i in range(k + 1, n):
            f = M[i][k] / a
            if f:
                for c in range(k, n):
                    M[i][c] -= f * M[k][c]
                for r in range(k, n):
                    M[r][i] -= f * M[r][k]
        diag.append(a)
    return diag


def hasse_from_diagonal(diag: Sequence[Fraction], p: int) -> int:
    e = 1
    for i in range(len(diag)):
        for j in range(i + 1, len(diag)):
            e *= hilbert_symbol(diag[i], diag[j], p)
    return e


@dataclass(frozen=True)
class GlobalInvariants:
    det: int
    signature: tuple[int, int]
    is_even: bool
    hasse: dict[int, int] = field(hash=False)

    def genus_key(self) -> tuple:
        return (self.det, self.signature, self.is_even, tuple(sorted(self.hasse.items())))


def hasse_invariant(S: GramMatrix, p: int, order: Sequence[int] | None = None) -> int:
    return hasse_from_diagonal(rational_diagonal(S, order), p)


def invariants(S: GramMatrix) -> GlobalInvariants:
    diag = rational_diagonal(S)
    r = sum(1 for a in diag if a > 0)
    det = S.det
    primes = sorted(set([2] + factorize(det).primes))
    return GlobalInvariants(
        det=det,
        signature=(r, S.n - r),
        is_even=all(S[i, i] % 2 == 0 for i in range(S.n)),
        hasse={p: hasse_from_diagonal(diag, p) for p in primes},
    )


def signature(S: GramMatrix) -> tuple[int, int]:
    r = sum(1 for a in rational_diagonal(S) if a > 0)
    return r, S.n - r


def is_indefinite(S: GramMatrix) -> bool:
    r, s = signature(S)
    return r >= 1 and s >= 1


# ------------------------------------------------------------- text I/O


def parse_gram(text: str) -> GramMatrix:
    """Parse either ``{"gram": [[...]]}`` JSON or the plain text format.

    Plain text: first line n, then n lines of n integers.
    """
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
            return GramMatrix(data["gram"])
        except (KeyError, TypeError, json.JSONDecodeError) as exc:
            raise InvalidArgument(f"bad JSON Gram matrix: {exc}") from exc
    lines = [ln for ln in stripped.splitlines() if ln.strip()]
    try:
        n = int(lines[0])
        rows = [[int(x) for x in ln.replace(",", " ").split()] for ln in lines[1 : n + 1]]
    except (IndexError, ValueError) as exc:
        raise InvalidArgument(f"bad Gram matrix text: {exc}") from exc
    if len(rows) != n or any(len(r) != n for r in rows) or len(lines) != n + 1:
        raise InvalidArgument(f"expected {n} rows of {n} integers")
    return GramMatrix(rows)


def format_gram(S: GramMatrix) -> str:
    return "\n".join([str(S.n)] + [" ".join(str(x) for x in row) for row in S.entries])


def gram_to_json(S: GramMatrix) -> str:
    return json.dumps({"gram": [list(r) for r in S.entries]})


def compact(S: GramMatrix) -> str:
    """One-line rendering, e.g. ``[[2,0,0],[0,0,1],[0,1,0]]``."""
    return "[" + ",".join("[" + ",".join(str(x) for x in r) + "]" for r in S.entries) + "]"
