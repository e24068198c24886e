"""Jordan decompositions of integral lattices over Z_p.

The lattice is split into ``L = (+)_j L_j`` with ``L_j = N_j(p^j)`` and
``N_j`` unimodular.  Arithmetic is exact: the working matrix stays inside
``Z_(p)`` (rationals with denominators prime to p), so no truncation
precision is needed.

For odd p a component is determined by its rank and the quadratic character
of its determinant.  For p = 2 each ``N_j`` is written as
``N_j^even (+) N_j^odd`` with ``N_j^even`` a sum of U's and at most one V, and
``N_j^odd`` diagonal with at most two units (kept mod 8).  That split is
not unique, so descriptors are put in a canonical form: the
lexicographically first choice whose Conway-Sloane canonical 2-adic symbol
matches the lattice's.  This makes descriptors basis independent.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

from .errors import InvalidArgument
from .exactnum import is_prime, legendre_symbol, nonresidue, unit_residue, valuation
from .lattice import GramMatrix, direct_sum

UNITS_MOD_8 = (1, 3, 5, 7)


@dataclass(frozen=True)
class UnimodularDescriptor:
    """What the local density formulas need to know about one ``N_j``.

    Odd p: ``det_square_class`` is the Legendre symbol of the unit
    determinant.  p = 2: ``even_rank``/``even_chi`` describe ``N_j^even``
    (chi of the zero space is +1) and ``odd_units`` the diagonal odd part.
    """

    rank: int
    det_square_class: int | None = None
    even_rank: int = 0
    even_chi: int = 1
    odd_units: tuple[int, ...] = ()

    @property
    def is_odd_component(self) -> bool:
        return bool(self.odd_units)

    @property
    def exceptional(self) -> bool:
        """N^odd = <e1> + <e2> with e1 = e2 mod 4."""
        u = self.odd_units
        return len(u) == 2 and (u[0] - u[1]) % 4 == 0


@dataclass(frozen=True)
class JordanDecomposition:
    p: int
    components: tuple[tuple[int, UnimodularDescriptor], ...]

    @property
    def rank(self) -> int:
        return sum(d.rank for _, d in self.components)

    @property
    def s(self) -> int:
        """Number of nonzero Jordan components."""
        return len(self.components)

    def scales(self) -> list[int]:
        return [j for j, _ in self.components]

    def component(self, j: int) -> UnimodularDescriptor | None:
        for k, d in self.components:
            if k == j:
                return d
        return None

    def det_valuation(self) -> int:
        return sum(j * d.rank for j, d in self.components)

    def render(self) -> str:
        return render(self)


# ------------------------------------------------------------ local pivoting


@dataclass(frozen=True)
class _Block:
    scale: int
    kind: str  # "unit", "U" or "V"
    unit: Fraction = Fraction(1)


def _local_blocks(S: GramMatrix, p: int) -> list[_Block]:
    """Split S over Z_(p) into 1x1 (and, at p = 2, even 2x2) blocks."""
    n = S.n
    M = [[Fraction(x) for x in row] for row in S.entries]
    active = list(range(n))
    blocks: list[_Block] = []

    def v(x: Fraction) -> int:
        return valuation(x, p)[0] if x else 10**9

    def eliminate_1(i: int) -> None:
        a = M[i][i]
        for k in active:
            if k == i or not M[k][i]:
                continue
            f = M[k][i] / a
            for c in range(n):
                M[k][c] -= f * M[i][c]
            for r in range(n):
                M[r][k] -= f * M[r][i]

    def eliminate_2(i: int, j: int) -> None:
        a, b, c = M[i][i], M[i][j], M[j][j]
        det = a * c - b * b
        for k in active:
            if k in (i, j):
                continue
            x = (c * M[k][i] - b * M[k][j]) / det
            y = (a * M[k][j] - b * M[k][i]) / det
            if not (x or y):
                continue
            for col in range(n):
                M[k][col] -= x * M[i][col] + y * M[j][col]
            for r in range(n):
                M[r][k] -= x * M[r][i] + y * M[r][j]

    while active:
        m = min(v(M[i][j]) for i in active for j in active)
        diag = [i for i in active if v(M[i][i]) == m]
        if diag:
            i = diag[0]
        else:
            i, j = next((i, j) for i in active for j in active if i < j and v(M[i][j]) == m)
            if p == 2:
                eliminate_2(i, j)
                a, b, c = (M[i][i], M[i][j], M[j][j])
                scale = Fraction(2) ** m
                det8 = unit_residue((a / scale) * (c / scale) - (b / scale) ** 2, 8)
                blocks.append(_Block(m, "U" if det8 == 7 else "V"))
                active.remove(i)
                active.remove(j)
                continue
            # e_i += e_j: the new diagonal 2*M[i][j] + (higher terms) keeps valuation m
            for col in range(n):
                M[i][col] += M[j][col]
            for r in range(n):
                M[r][i] += M[r][j]
        eliminate_1(i)
        e, u = valuation(M[i][i], p)
        blocks.append(_Block(e, "unit", u))
        active.remove(i)
    return blocks


# ---------------------------------------------------------- 2-adic symbols


def _det8(nU: int, nV: int, units: tuple[int, ...]) -> int:
    d = (-1) ** nU * 3**nV
    for u in units:
        d *= u
    return d % 8


def _merge_odd_units(nU: int, nV: int, units: list[int]) -> tuple[int, int, list[int]]:
    """Rewrite <u1,u2,u3> as (even binary) + <w> until at most two units remain."""
    units = list(units)
    while len(units) > 2:
        u1, u2, u3 = units[:3]
        # span(e1+e2, e2+e3) is even unimodular with determinant u1u2+u1u3+u2u3
        d = (u1 * u2 + u1 * u3 + u2 * u3) % 8
        w = u1 * u2 * u3 * pow(d, -1, 8) % 8
        if d == 7:
            nU += 1
        else:
            nV += 1
        units = [w] + units[3:]
    while nV >= 2:
        nV -= 2
        nU += 2
    return nU, nV, sorted(units)


def _component_symbol(j: int, rank: int, nU: int, nV: int, units: tuple[int, ...]):
    d = _det8(nU, nV, units)
    sign = 1 if d in (1, 7) else -1
    odd = bool(units)
    oddity = sum(units) % 8 if odd else 0
    return (j, rank, odd, sign, oddity)


def canonical_2adic_symbol(components) -> tuple:
    """Conway-Sloane canonical form of a 2-adic symbol.

    ``components`` is a list of ``(scale, rank, is_odd, sign, oddity)``.
    Oddities are fused within compartments and signs are walked to the
    front of each train.
    """
    comps = sorted(components)
    if not comps:
        return ((), ())
    lo, hi = comps[0][0] - 1, comps[-1][0] + 1
    by_scale = {c[0]: c for c in comps}
    scales = list(range(lo, hi + 1))
    rank = [by_scale[j][1] if j in by_scale else 0 for j in scales]
    odd = [by_scale[j][2] if j in by_scale else False for j in scales]
    sign = [by_scale[j][3] if j in by_scale else 1 for j in scales]
    odty = [by_scale[j][4] if j in by_scale else 0 for j in scales]
    N = len(scales)

    compartment_of: dict[int, int] = {}
    compartments: list[list[int]] = []
    for i in range(N):
        if odd[i]:
            if i > 0 and odd[i - 1]:
                compartments[-1].append(i)
            else:
                compartments.append([i])
            compartment_of[i] = len(compartments) - 1
    comp_oddity = [sum(odty[i] for i in c) % 8 for c in compartments]

    trains: list[list[int]] = [[0]]
    for i in range(1, N):
        if odd[i - 1] or odd[i]:
            trains[-1].append(i)
        else:
            trains.append([i])

    def step(i: int) -> None:
        # elementary walk between positions i and i+1
        sign[i] = -sign[i]
        sign[i + 1] = -sign[i + 1]
        for c in {compartment_of.get(i), compartment_of.get(i + 1)} - {None}:
            comp_oddity[c] = (comp_oddity[c] + 4) % 8

    for train in trains:
        members = [i for i in train if rank[i] > 0]
        for a, b in reversed(list(zip(members, members[1:]))):
            if sign[b] == -1:
                for i in range(a, b):
                    step(i)
    forms = tuple((scales[i], rank[i], odd[i], sign[i]) for i in range(N) if rank[i] > 0)
    fused = tuple((scales[c[0]], comp_oddity[k]) for k, c in enumerate(compartments))
    return forms, fused


def _candidates(rank: int, odd: bool) -> Iterator[tuple[int, tuple[int, ...]]]:
    """(even_chi, odd_units) choices for a component, in canonical order."""
    if not odd:
        yield 1, ()
        yield -1, ()
        return
    k = 1 if rank % 2 else 2
    chis = (1,) if rank == k else (1, -1)
    for chi in chis:
        for units in itertools.combinations_with_replacement(UNITS_MOD_8, k):
            yield chi, units


def _even_blocks(even_rank: int, chi: int) -> tuple[int, int]:
    half = even_rank // 2
    return (half, 0) if chi == 1 or half == 0 else (half - 1, 1)


@lru_cache(maxsize=4096)
def _canonical_2adic(profile: tuple[tuple[int, int, bool], ...], symbol: tuple):
    options = [list(_candidates(rank, odd)) for _, rank, odd in profile]
    for choice in itertools.product(*options):
        comps = []
        for (j, rank, odd), (chi, units) in zip(profile, choice):
            nU, nV = _even_blocks(rank - len(units), chi)
            comps.append(_component_symbol(j, rank, nU, nV, units))
        if canonical_2adic_symbol(comps) == symbol:
            return tuple(
                (j, UnimodularDescriptor(rank=rank, even_rank=rank - len(units), even_chi=chi, odd_units=units))
                for (j, rank, _), (chi, units) in zip(profile, choice)
            )
    raise AssertionError(f"no canonical representative for 2-adic symbol {symbol}")


def two_adic_symbol(J: JordanDecomposition) -> tuple:
    """Canonical 2-adic symbol of a decomposition (a complete Z_2 invariant)."""
    comps = []
    for j, d in J.components:
        nU, nV = _even_blocks(d.even_rank, d.even_chi)
        comps.append(_component_symbol(j, d.rank, nU, nV, d.odd_units))
    return canonical_2adic_symbol(comps)


# ------------------------------------------------------------ public API


def jordan_decompose(S: GramMatrix, p: int, canonical: bool = True) -> JordanDecomposition:
    """Jordan decomposition of S over Z_p.

    With ``canonical=False`` at p = 2 the raw descriptors coming out of the
    pivoting are returned (still a valid decomposition, but basis dependent).
    """
    if not is_prime(p):
        raise InvalidArgument(f"{p} is not a prime")
    blocks = _local_blocks(S, p)
    scales = sorted({b.scale for b in blocks})
    comps = []
    if p != 2:
        for j in scales:
            units = [b.unit for b in blocks if b.scale == j]
            prod = Fraction(1)
            for u in units:
                prod *= u
            cls = legendre_symbol(prod.numerator * prod.denominator, p)
            comps.append((j, UnimodularDescriptor(rank=len(units), det_square_class=cls)))
        return JordanDecomposition(p, tuple(comps))

    raw = []
    for j in scales:
        bs = [b for b in blocks if b.scale == j]
        nU = sum(1 for b in bs if b.kind == "U")
        nV = sum(1 for b in bs if b.kind == "V")
        units = [unit_residue(b.unit, 8) for b in bs if b.kind == "unit"]
        nU, nV, units = _merge_odd_units(nU, nV, units)
        rank = 2 * (nU + nV) + len(units)
        raw.append((j, rank, nU, nV, tuple(units)))
    comps = tuple(
        (j, UnimodularDescriptor(rank=rank, even_rank=2 * (nU + nV), even_chi=1 if nV == 0 else -1, odd_units=units))
        for j, rank, nU, nV, units in raw
    )
    J = JordanDecomposition(2, comps)
    if not canonical:
        return J
    profile = tuple((j, d.rank, d.is_odd_component) for j, d in comps)
    return JordanDecomposition(2, _canonical_2adic(profile, two_adic_symbol(J)))


def chi(desc: UnimodularDescriptor, p: int) -> int:
    """chi of a unimodular component: 0 in odd dimension, +1 if hyperbolic, else -1.

    At p = 2 this is chi of the even part ``N^even`` (rank 0 counts as +1).
    """
    if p == 2:
        return desc.even_chi
    if desc.rank % 2:
        return 0
    half = desc.rank // 2
    return desc.det_square_class * legendre_symbol((-1) ** half, p)


def reconstruct(J: JordanDecomposition) -> GramMatrix:
    """A Gram matrix with exactly this Jordan decomposition."""
    p = J.p
    parts = []
    for j, d in J.components:
        q = p**j
        if p != 2:
            last = 1 if d.det_square_class == 1 else nonresidue(p)
            parts.append(GramMatrix.diag(*([q] * (d.rank - 1) + [q * last])))
            continue
        nU, nV = _even_blocks(d.even_rank, d.even_chi)
        for _ in range(nU):
            parts.append(GramMatrix([[0, q], [q, 0]]))
        for _ in range(nV):
            parts.append(GramMatrix([[2 * q, q], [q, 2 * q]]))
        if d.odd_units:
            parts.append(GramMatrix.diag(*[q * u for u in d.odd_units]))
    return direct_sum(*parts)


def render(J: JordanDecomposition) -> str:
    """Text form, e.g. ``2: [0: U, odd(1)] [1: odd(1)]``."""
    out = []
    for j, d in J.components:
        if J.p == 2:
            nU, nV = _even_blocks(d.even_rank, d.even_chi)
            items = ["U"] * nU + ["V"] * nV
            if d.odd_units:
                items.append("odd(" + ",".join(str(u) for u in d.odd_units) + ")")
            out.append(f"[{j}: {', '.join(items)}]")
        else:
            sgn = "+" if d.det_square_class == 1 else "-"
            out.append(f"[{j}: rank {d.rank}, det {sgn}]")
    return f"{J.p}: " + " ".join(out)
