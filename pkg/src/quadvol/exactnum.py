"""Exact integer/rational helpers and elementary number theory.

Everything here works on Python ints and :class:`fractions.Fraction`, so results
are exact.  Rationals are normalised by ``Fraction`` itself (positive
denominator, lowest terms).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Union

from .errors import InvalidArgument

RationalLike = Union[int, Fraction]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    if n % 3 == 0:
        return n == 3
    f = 5
    while f * f <= n:
        if n % f == 0 or n % (f + 2) == 0:
            return False
        f += 6
    return True


def primes_up_to(n: int) -> list[int]:
    """Sieve of Eratosthenes, inclusive."""
    if n < 2:
        return []
    sieve = bytearray(b"\x01") * (n + 1)
    sieve[:2] = b"\x00\x00"
    for p in range(2, isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = b"\x00" * len(range(p * p, n + 1, p))
    return [i for i, v in enumerate(sieve) if v]


def _require_prime(p: int) -> None:
    if not is_prime(p):
        raise InvalidArgument(f"{p} is not a prime")


def legendre_symbol(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime p, via Euler's criterion."""
    if p == 2 or not is_prime(p):
        raise InvalidArgument(f"legendre_symbol needs an odd prime, got {p}")
    t = pow(a % p, (p - 1) // 2, p)
    return -1 if t == p - 1 else t


@dataclass(frozen=True)
class Factorization:
    sign: int
    factors: tuple[tuple[int, int], ...]

    @property
    def omega(self) -> int:
        """Number of distinct prime divisors."""
        return len(self.factors)

    @property
    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def is_square_free(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    def value(self) -> int:
        n = self.sign
        for p, e in self.factors:
            n *= p**e
        return n


def factorize(n: int) -> Factorization:
    """Trial-division factorisation of a nonzero integer."""
    if n == 0:
        raise InvalidArgument("cannot factorize 0")
    sign = -1 if n < 0 else 1
    m = abs(n)
    factors = []
    p = 2
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors.append((p, e))
        p += 1 if p == 2 else 2
    if m > 1:
        factors.append((m, 1))
    return Factorization(sign, tuple(factors))


def is_square_free(n: int) -> bool:
    return factorize(n).is_square_free()


def omega(n: int) -> int:
    return factorize(n).omega


def valuation(n: RationalLike, p: int) -> tuple[int, Fraction]:
    """Return ``(e, u)`` with ``n = p**e * u`` and u a p-adic unit.

    Works for nonzero rationals; e may be negative.
    """
    if n == 0:
        raise InvalidArgument("valuation of 0 is undefined")
    x = Fraction(n)
    num, den = x.numerator, x.denominator
    e = 0
    while num % p == 0:
        num //= p
        e += 1
    while den % p == 0:
        den //= p
        e -= 1
    return e, Fraction(num, den)


def vp(n: RationalLike, p: int) -> int:
    return valuation(n, p)[0]


def unit_residue(u: Fraction, m: int) -> int:
    """Residue of a p-adic unit rational modulo m (m a power of p)."""
    return u.numerator * pow(u.denominator, -1, m) % m


def _square_class_int(x: Fraction) -> int:
    # num/den and num*den differ by the square den**2
    return x.numerator * x.denominator


def hilbert_symbol(a: RationalLike, b: RationalLike, p: int) -> int:
    """Hilbert symbol (a, b)_p over Q_p; ``p = -1`` selects the real place."""
    if a == 0 or b == 0:
        raise InvalidArgument("Hilbert symbol needs nonzero arguments")
    if p == -1:
        return -1 if (a < 0 and b < 0) else 1
    _require_prime(p)
    alpha, u = valuation(a, p)
    beta, v = valuation(b, p)
    u_int, v_int = _square_class_int(u), _square_class_int(v)
    if p == 2:
        u8, v8 = u_int % 8, v_int % 8
        eps_u, eps_v = (u8 - 1) // 2 % 2, (v8 - 1) // 2 % 2
        om_u, om_v = (u8 * u8 - 1) // 8 % 2, (v8 * v8 - 1) // 8 % 2
        e = eps_u * eps_v + alpha * om_v + beta * om_u
        return -1 if e % 2 else 1
    s = 1
    if (alpha * beta) % 2 and p % 4 == 3:
        s = -s
    if beta % 2:
        s *= legendre_symbol(u_int, p)
    if alpha % 2:
        s *= legendre_symbol(v_int, p)
    return s


def nonresidue(p: int) -> int:
    """Smallest positive quadratic non-residue modulo an odd prime."""
    for a in range(2, p):
        if legendre_symbol(a, p) == -1:
            return a
    raise InvalidArgument(f"no non-residue modulo {p}")


def format_rational(x: RationalLike) -> str:
    """``num/den`` in lowest terms (integers keep the ``/1``)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    return Fraction(text.strip())
