"""Hirzebruch-Mumford volumes of indefinite ternary lattices.

Two routes to the same exact rational:

``siegel_volume``
    Siegel's formula.  In rank 3 the Gamma factors give ``1/(2 pi^2)`` and
    the Euler product over primes not dividing ``2 det`` is folded into
    ``zeta(2) = pi^2/6``, so the pi's cancel::

        Vol = (2/g_sp) * |d|^2/12 * prod_{p in {2} u {p | d}} (1 - p^-2)/alpha_p

``closed_form_ternary``
    The three-case closed formula for square-free ``d``.  Signs are read
    off global invariants only (Hasse symbols, Legendre symbols), so it
    shares no code path with the Jordan/density route.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .density import DEFAULT_BUDGET, LocalDensity, brute_force_density, density, stabilization_precision
from .errors import PreconditionError, ResourceLimitError, Unsupported
from .exactnum import factorize, legendre_symbol
from .lattice import GramMatrix, GlobalInvariants, invariants


@dataclass(frozen=True)
class PrimeFactor:
    p: int
    alpha: Fraction
    sign: Optional[int] = None


@dataclass(frozen=True)
class VolumeResult:
    volume: Fraction
    g_sp: int
    per_prime: tuple[PrimeFactor, ...]
    method: str  # "siegel" or "closed_form"
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.volume <= 0:
            raise AssertionError(f"volume must be positive, got {self.volume}")

    def sign(self, p: int) -> Optional[int]:
        for f in self.per_prime:
            if f.p == p:
                return f.sign
        return None


def _check_ternary(S: GramMatrix) -> GlobalInvariants:
    if S.n != 3:
        raise Unsupported(f"volumes are only implemented for rank 3, got rank {S.n}")
    inv = invariants(S)
    r, s = inv.signature
    if not (r and s):
        raise Unsupported("volumes need an indefinite lattice")
    return inv


def relevant_primes(det: int) -> list[int]:
    return sorted(set([2] + factorize(det).primes))


def assemble_siegel(det: int, alphas: dict[int, Fraction], g_sp: int = 1) -> Fraction:
    """(2/g_sp) |d|^2/12 prod_p (1 - p^-2)/alpha_p over the given primes."""
    v = Fraction(2, g_sp) * Fraction(det * det, 12)
    for p, a in alphas.items():
        v *= (1 - Fraction(1, p * p)) / a
    return v


def siegel_volume(S: GramMatrix, g_sp: int = 1, gsp_given: bool = False) -> VolumeResult:
    if g_sp < 1:
        raise PreconditionError("g_sp must be a positive integer")
    inv = _check_ternary(S)
    warnings = []
    if not factorize(inv.det).is_square_free() and not gsp_given:
        warnings.append(
            f"|det| = {abs(inv.det)} is not square-free: g_sp = {g_sp} is assumed, not derived"
        )
    dens = {p: density(S, p) for p in relevant_primes(inv.det)}
    vol = assemble_siegel(inv.det, {p: d.value for p, d in dens.items()}, g_sp)
    per = tuple(PrimeFactor(p, d.value) for p, d in dens.items())
    return VolumeResult(vol, g_sp, per, "siegel", tuple(warnings))


def odd_prime_sign(inv: GlobalInvariants, p: int) -> int:
    """+1 iff the rank-2 unimodular part at p | d represents 0.

    With L = L0 + <p e> over Z_p the Hasse symbol is (det L0 / p), so
    chi(L0) = (-det L0 / p) = (-1/p) * hasse_p.
    """
    return legendre_symbol(-1, p) * inv.hasse[p]


def two_adic_sign(inv: GlobalInvariants) -> int:
    """Sign at 2 for odd d: plus iff d = -1 mod 4 with e_2 = 1, or d = 1 mod 4 with e_2 = -1."""
    d4 = inv.det % 4
    e2 = inv.hasse[2]
    return 1 if (d4 == 3 and e2 == 1) or (d4 == 1 and e2 == -1) else -1


def closed_form_ternary(S: GramMatrix, flip_two_adic_sign: bool = False) -> VolumeResult:
    """Closed-form volume for square-free |det|.

    ``flip_two_adic_sign`` inverts the sign rule at 2; it exists only so
    the example checker can be mutation-tested.
    """
    inv = _check_ternary(S)
    d = inv.det
    fac = factorize(d)
    if not fac.is_square_free():
        raise PreconditionError(
            f"|det| = {abs(d)} is not square-free; reduce the lattice first (reduce_to_square_free)"
        )
    w = fac.omega
    per = []
    prod = Fraction(1)
    for p in fac.primes:
        if p == 2:
            continue
        sgn = odd_prime_sign(inv, p)
        prod *= p + sgn
        alpha = 2 * p * (1 - Fraction(1, p * p)) / (1 + sgn * Fraction(1, p))
        per.append(PrimeFactor(p, alpha, sgn))
    if d % 2 == 0:
        if inv.is_even:
            vol = prod / (3 * 2 ** (w + 2))
            alpha2 = Fraction(2**4) * (1 - Fraction(1, 4))
        else:
            vol = prod / 2 ** (w + 3)
            alpha2 = Fraction(2**3)
        per.insert(0, PrimeFactor(2, alpha2))
    else:
        s2 = two_adic_sign(inv)
        if flip_two_adic_sign:
            s2 = -s2
        vol = (2 + s2) * prod / (3 * 2 ** (w + 4))
        alpha2 = 4 * (1 - Fraction(1, 4)) / (1 + s2 * Fraction(1, 2))
        per.insert(0, PrimeFactor(2, alpha2, s2))
    return VolumeResult(vol, 1, tuple(per), "closed_form")


@dataclass
class CrosscheckReport:
    closed_form: Fraction
    siegel: Fraction
    oracle: Optional[Fraction]
    oracle_primes: list[int]
    skipped_primes: list[int]
    alphas: dict[int, dict[str, Fraction]]
    first_disagreement: Optional[int] = None

    @property
    def agree(self) -> bool:
        ok = self.closed_form == self.siegel and self.first_disagreement is None
        return ok and (self.oracle is None or self.oracle == self.siegel)


def crosscheck(S: GramMatrix, budget: int = DEFAULT_BUDGET, jobs: int = 1) -> CrosscheckReport:
    """Compare the closed form, Siegel assembly, and (where affordable) the oracle.

    Oracle densities are taken at the stabilisation precision; primes whose
    enumeration exceeds ``budget`` keep their closed-form density in the
    oracle volume and are listed in ``skipped_primes``.
    """
    cf = closed_form_ternary(S)
    sg = siegel_volume(S)
    cf_alpha = {f.p: f.alpha for f in cf.per_prime}
    alphas: dict[int, dict[str, Fraction]] = {}
    oracle_alpha = {}
    used, skipped = [], []
    first = None
    for f in sg.per_prime:
        p = f.p
        row = {"closed_form": cf_alpha[p], "density": f.alpha}
        try:
            o: LocalDensity = brute_force_density(S, p, stabilization_precision(S, p), budget, jobs)
            row["oracle"] = o.value
            oracle_alpha[p] = o.value
            used.append(p)
        except ResourceLimitError:
            oracle_alpha[p] = f.alpha
            skipped.append(p)
        alphas[p] = row
        if first is None and len(set(row.values())) > 1:
            first = p
    oracle_vol = assemble_siegel(S.det, oracle_alpha) if used else None
    return CrosscheckReport(cf.volume, sg.volume, oracle_vol, used, skipped, alphas, first)
