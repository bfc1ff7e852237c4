"""Exact and modular Bernoulli numbers and their character-twisted analogues.

Sign convention: B_1 = -1/2, fixed package-wide.  Everything here is exact:
Fractions on the exact paths, integer residues on the modular paths.  The
twisted Bernoulli number attached to the quadratic character chi mod D is

    B(n, chi) = (1/D) * sum_{j=0}^{n} C(n, j) * B_j * D^j * S_{n-j}

where S_k = sum_{a=1}^{D} chi(a) a^k.  The j = n term always vanishes
because S_0 = 0 for every nontrivial character, so B_{p-1} mod p is never
needed on the modular path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .numtheory import character_values, is_odd_prime, validate_fundamental_discriminant

# Largest dot-product magnitude we allow on the int64 modular paths.
_INT64_BUDGET = 2**62

_exact_cache: list[Fraction] = [Fraction(1), Fraction(-1, 2)]


def bernoulli_exact(n: int) -> Fraction:
    """B_n as an exact rational (B_1 = -1/2)."""
    if n < 0:
        raise ValueError("Bernoulli index must be nonnegative")
    if n % 2 == 1 and n > 1:
        return Fraction(0)
    while len(_exact_cache) <= n:
        m = len(_exact_cache)
        if m % 2 == 1 and m > 1:
            _exact_cache.append(Fraction(0))
            continue
        total = Fraction(0)
        for j in range(m):
            bj = _exact_cache[j]
            if bj:
                total += math.comb(m + 1, j) * bj
        _exact_cache.append(-total / (m + 1))
    return _exact_cache[n]


def warm_bernoulli_cache(n: int = 100) -> None:
    """Fill the exact cache up to B_n; later reads are then lock-free."""
    bernoulli_exact(n - n % 2)


def _modulus_fits_int64(count: int, modulus: int) -> bool:
    return count * modulus * modulus < _INT64_BUDGET


@lru_cache(maxsize=None)
def bernoulli_residues_mod(p: int, modulus: int) -> tuple[int, ...]:
    """B_j mod modulus for 0 <= j <= p - 2, where modulus is a power of p.

    Every division in the recurrence is by j + 1 <= p - 1, hence invertible.
    B_{p-1} is excluded: p divides its denominator.
    """
    n_max = p - 2
    if _modulus_fits_int64(n_max + 2, modulus):
        out = _bernoulli_residues_np(n_max, modulus)
    else:
        out = _bernoulli_residues_py(n_max, modulus)
    return tuple(int(v) for v in out)


def _bernoulli_residues_np(n_max: int, m: int) -> np.ndarray:
    b = np.zeros(n_max + 1, dtype=np.int64)
    b[0] = 1
    if n_max >= 1:
        b[1] = (-pow(2, -1, m)) % m
    # row holds C(n+1, j); start at n = 1 with C(2, .) = (1, 2, 1)
    row = np.array([1, 2, 1], dtype=np.int64)
    for n in range(2, n_max + 1):
        nxt = np.empty(n + 2, dtype=np.int64)
        nxt[0] = 1
        nxt[-1] = 1
        nxt[1:-1] = (row[1:] + row[:-1]) % m
        row = nxt
        if n % 2 == 1:
            continue
        s = int(row[:n] @ b[:n]) % m
        b[n] = (-s * pow(n + 1, -1, m)) % m
    return b


def _bernoulli_residues_py(n_max: int, m: int) -> list[int]:
    b = [0] * (n_max + 1)
    b[0] = 1
    if n_max >= 1:
        b[1] = (-pow(2, -1, m)) % m
    row = [1, 2, 1]
    for n in range(2, n_max + 1):
        row = [1] + [(row[i] + row[i + 1]) % m for i in range(len(row) - 1)] + [1]
        if n % 2 == 1:
            continue
        s = sum(row[j] * b[j] for j in range(n) if b[j]) % m
        b[n] = (-s * pow(n + 1, -1, m)) % m
    return b


@dataclass(frozen=True)
class ModularBernoulliTable:
    """Residues of B_n mod p for even n with 0 <= n <= p - 3, plus B_0 and B_1."""

    prime: int
    residues: tuple[int, ...]  # indexed by n, 0 <= n <= p - 2

    def __getitem__(self, n: int) -> int:
        p = self.prime
        if not (n in (0, 1) or (n % 2 == 0 and 0 <= n <= p - 3)):
            raise ValueError(f"B_{n} mod {p} is outside the table range")
        return self.residues[n]


@lru_cache(maxsize=None)
def bernoulli_mod_table(p: int) -> ModularBernoulliTable:
    """B_n mod p for all even n <= p - 3 (von Staudt-Clausen keeps them integral)."""
    if not is_odd_prime(p):
        raise ValueError(f"{p} is not an odd prime")
    return ModularBernoulliTable(prime=p, residues=bernoulli_residues_mod(p, p))


@dataclass(frozen=True)
class CharacterPowerSums:
    """S_k = sum_{a=1}^{D} chi_D(a) a^k for 0 <= k <= k_max.

    Exact integers when modulus is None, residues otherwise.  S_0 = 0 always.
    """

    discriminant: int
    k_max: int
    modulus: int | None
    sums: tuple[int, ...]

    def __getitem__(self, k: int) -> int:
        return self.sums[k]


# Exact power sums grow on demand per discriminant and are reused heavily by
# the cross-validation gates.
_exact_sums_cache: dict[int, list[int]] = {}


def _exact_power_sums(d: int, k_max: int) -> list[int]:
    sums = _exact_sums_cache.setdefault(d, [])
    if len(sums) > k_max:
        return sums
    chi = character_values(d)
    support = [(a, int(chi[a])) for a in range(1, d + 1) if chi[a]]
    powers = {a: a ** len(sums) for a, _ in support}
    while len(sums) <= k_max:
        sums.append(sum(c * powers[a] for a, c in support))
        for a, _ in support:
            powers[a] *= a
    return sums


def character_power_sums(d: int, k_max: int, modulus: int | None = None) -> CharacterPowerSums:
    """Twisted power sums, exact or reduced mod modulus, in O(D * k_max) multiplies."""
    validate_fundamental_discriminant(d)
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    if modulus is None:
        sums = tuple(_exact_power_sums(d, k_max)[: k_max + 1])
    else:
        chi = character_values(d)
        support = [(a % modulus, int(chi[a])) for a in range(1, d + 1) if chi[a]]
        acc = []
        powers = [1] * len(support)
        for _ in range(k_max + 1):
            acc.append(sum(c * pw for (_, c), pw in zip(support, powers)) % modulus)
            powers = [pw * a % modulus for (a, _), pw in zip(support, powers)]
        sums = tuple(acc)
    return CharacterPowerSums(discriminant=d, k_max=k_max, modulus=modulus, sums=sums)


@lru_cache(maxsize=65536)
def generalized_bernoulli_exact(d: int, n: int) -> Fraction:
    """B(n, chi_d) as an exact rational."""
    validate_fundamental_discriminant(d)
    if n < 1:
        raise ValueError("index must be >= 1")
    sums = _exact_power_sums(d, n)
    total = Fraction(0)
    # j = n contributes nothing (S_0 = 0); odd j > 1 have B_j = 0.
    for j in range(n):
        if j % 2 == 1 and j > 1:
            continue
        bj = bernoulli_exact(j)
        if bj:
            total += math.comb(n, j) * bj * d**j * sums[n - j]
    return total / d


def generalized_bernoulli_mod(d: int, n: int, p: int) -> int:
    """B(n, chi_d) mod p via the modular Bernoulli table.

    Requires p coprime to d (use the exact path otherwise), n even, n <= p - 1.
    """
    validate_fundamental_discriminant(d)
    if not is_odd_prime(p):
        raise ValueError(f"{p} is not an odd prime")
    if d % p == 0:
        raise ValueError(f"modular path needs p coprime to the discriminant ({p} | {d})")
    if n % 2 != 0 or n < 2:
        raise ValueError("index must be a positive even integer")
    if n > p - 1:
        raise ValueError(f"index {n} exceeds p - 1 = {p - 1}")
    bern = bernoulli_residues_mod(p, p)
    sums = character_power_sums(d, n, modulus=p).sums
    total = 0
    for j in range(n):
        if j % 2 == 1 and j > 1:
            continue
        total += math.comb(n, j) % p * bern[j] * pow(d, j, p) * sums[n - j]
    return total * pow(d, -1, p) % p
