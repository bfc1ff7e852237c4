"""Integer and quadratic-character primitives.

Conventions used throughout the package:

* A fundamental discriminant is a positive integer D > 1 with either
  D = 1 (mod 4) and D squarefree, or D = 4m with m = 2 or 3 (mod 4)
  and m squarefree.  Negative discriminants are out of scope.
* The quadratic character attached to D is the Kronecker symbol
  chi(a) = (D/a); it is completely multiplicative, has period D, and
  vanishes exactly when gcd(a, D) > 1.
* Ranges are half-open [lo, hi) everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

# sigma_3(n) < zeta(3) n^3 must stay below 2^63 for the int64 sieve;
# sigma_1 is memory-bound long before it can overflow.
_SIGMA_LIMIT_BOUND = {1: 200_000_000, 3: 1_900_000}


def kronecker_symbol(a: int, n: int) -> int:
    """Kronecker symbol (a/n), defined for every pair of integers.

    (a/2) is 0 for even a, +1 for a = +-1 (mod 8), -1 for a = +-3 (mod 8);
    (a/0) is 1 for a = +-1 and 0 otherwise.
    """
    if n == 0:
        return 1 if a in (1, -1) else 0
    result = 1
    if n < 0:
        n = -n
        if a < 0:
            result = -result
    if n % 2 == 0:
        if a % 2 == 0:
            return 0
        twos = (n & -n).bit_length() - 1
        n >>= twos
        if twos % 2 == 1 and a % 8 in (3, 5):
            result = -result
    # n is now odd and positive
    if a < 0:
        if n % 4 == 3:
            result = -result
        a = -a
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _is_squarefree(n: int) -> bool:
    if n % 4 == 0:
        return False
    q = 3
    while q * q <= n:
        if n % (q * q) == 0:
            return False
        q += 2
    return True


def is_fundamental_discriminant(d: int) -> bool:
    """True iff d is the discriminant of a real quadratic field (d > 1)."""
    if d <= 1:
        return False
    if d % 4 == 1:
        return _is_squarefree(d)
    if d % 16 in (8, 12):
        return _is_squarefree(d // 4)
    return False


def validate_fundamental_discriminant(d: int) -> int:
    if not is_fundamental_discriminant(d):
        raise ValueError(f"{d} is not a fundamental discriminant of a real quadratic field")
    return d


def squarefree_flags(limit: int) -> np.ndarray:
    """Boolean array f with f[n] true iff n is squarefree, for 0 <= n < limit."""
    flags = np.ones(max(limit, 1), dtype=bool)
    flags[0] = False
    if limit > 4:
        for q in range(2, math.isqrt(limit - 1) + 1):
            flags[q * q :: q * q] = False
    return flags


def enumerate_fundamental_discriminants(lo: int, hi: int) -> list[int]:
    """All fundamental discriminants d with lo <= d < hi, ascending.

    Uses a squarefree sieve rather than per-candidate factorization, so
    ranges up to 10**6 and beyond enumerate in well under a second.
    """
    if hi <= lo or hi <= 2:
        return []
    flags = squarefree_flags(hi)
    d = np.arange(hi, dtype=np.int64)
    odd = (d % 4 == 1) & flags
    m = d >> 2
    even = (d % 16 == 8) | (d % 16 == 12)
    even &= flags[np.minimum(m, hi - 1)]
    mask = odd | even
    mask[: max(lo, 2)] = False
    return [int(x) for x in np.flatnonzero(mask)]


def odd_primes_up_to(x: int) -> list[int]:
    """All odd primes p < x, ascending (2 is excluded)."""
    if x <= 3:
        return []
    sieve = np.ones(x, dtype=bool)
    sieve[:2] = False
    for q in range(2, math.isqrt(x - 1) + 1):
        if sieve[q]:
            sieve[q * q :: q] = False
    sieve[2] = False
    return [int(p) for p in np.flatnonzero(sieve)]


def is_odd_prime(p: int) -> bool:
    if p < 3 or p % 2 == 0:
        return False
    q = 3
    while q * q <= p:
        if p % q == 0:
            return False
        q += 2
    return True


@dataclass(frozen=True)
class SigmaTable:
    """Sieved divisor sums sigma_k(n) for 1 <= n <= limit (k fixed at 1 or 3).

    Immutable after construction; safe to share across worker processes.
    """

    exponent: int
    limit: int
    values: np.ndarray  # int64, values[n] = sigma_k(n), values[0] = 0

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.limit:
            raise IndexError(f"sigma_{self.exponent}({n}) outside table limit {self.limit}")
        return int(self.values[n])

    def __len__(self) -> int:
        return self.limit


def divisor_sigma_sieve(k: int, limit: int) -> SigmaTable:
    """Build a SigmaTable of sigma_k(n) for n <= limit in O(limit log limit) additions."""
    if k not in (1, 3):
        raise ValueError(f"unsupported divisor-sum exponent {k}")
    if limit < 1:
        raise ValueError("sigma sieve limit must be >= 1")
    if limit > _SIGMA_LIMIT_BOUND[k]:
        raise ValueError(
            f"sigma_{k} sieve limit {limit} would overflow 64-bit entries "
            f"(maximum {_SIGMA_LIMIT_BOUND[k]})"
        )
    vals = np.zeros(limit + 1, dtype=np.int64)
    for d in range(1, limit + 1):
        vals[d :: d] += d**k
    vals.setflags(write=False)
    return SigmaTable(exponent=k, limit=limit, values=vals)


def p_adic_valuation(q, p: int) -> int | float:
    """Exponent of the prime p in the rational q; math.inf for q = 0.

    Negative when p divides the reduced denominator.
    """
    q = Fraction(q)
    if q == 0:
        return math.inf
    num = q.numerator
    v = 0
    while num % p == 0:
        num //= p
        v += 1
    if v:
        return v
    den = q.denominator
    while den % p == 0:
        den //= p
        v -= 1
    return v


def smallest_prime_factors(limit: int) -> np.ndarray:
    """spf[n] = smallest prime factor of n for 2 <= n < limit (spf[0:2] = 0)."""
    spf = np.zeros(max(limit, 2), dtype=np.int64)
    for q in range(2, limit):
        if spf[q] == 0:
            spf[q::q] = np.where(spf[q::q] == 0, q, spf[q::q])
    return spf


def character_values(d: int, spf: np.ndarray | None = None) -> np.ndarray:
    """chi_d(a) for 0 <= a <= d as an int8 array, built multiplicatively.

    One Kronecker evaluation per prime below d; everything else follows from
    complete multiplicativity via a smallest-prime-factor table.
    """
    validate_fundamental_discriminant(d)
    if spf is None:
        spf = smallest_prime_factors(d + 1)
    vals = np.zeros(d + 1, dtype=np.int8)
    vals[1] = 1
    for n in range(2, d + 1):
        q = int(spf[n]) if n < len(spf) else n
        if q == n or q == 0:
            vals[n] = kronecker_symbol(d, n)
        else:
            vals[n] = vals[q] * vals[n // q]
    vals.setflags(write=False)
    return vals


@dataclass(frozen=True)
class QuadraticCharacter:
    """The real primitive character a -> (discriminant/a)."""

    discriminant: int

    def __post_init__(self) -> None:
        validate_fundamental_discriminant(self.discriminant)

    def __call__(self, a: int) -> int:
        return kronecker_symbol(self.discriminant, a)

    @lru_cache(maxsize=None)
    def values(self) -> np.ndarray:
        """One full period of character values, indexed 0..D."""
        return character_values(self.discriminant)
