"""Special values zeta(1-2m), L(1-2m, chi_D), zeta_D(1-2m).

Three computation routes, all exact rationals:

* Riemann factor:      zeta(1-2m) = -B_{2m} / (2m)
* character factor:    L(1-2m, chi) = -B(2m, chi) / (2m)
* field zeta:          zeta_D(1-2m) = zeta(1-2m) * L(1-2m, chi)

For m = 1, 2 there is also the batch route via Siegel's divisor-sum
formulas, which is subpolynomial per discriminant when D varies:

    zeta_D(-1) = (1/60)  * sum_b sigma_1((D - b^2) / 4)
    zeta_D(-3) = (1/120) * sum_b sigma_3((D - b^2) / 4)

summing over all integers b (positive, negative and zero) with b^2 < D and
b = D (mod 2).  The coefficients are quarantined behind an exact-equality
gate against the twisted-Bernoulli route; call validate_siegel_gate()
before trusting a large batch run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from .bernoulli import bernoulli_exact, generalized_bernoulli_exact, generalized_bernoulli_mod
from .numtheory import (
    SigmaTable,
    divisor_sigma_sieve,
    enumerate_fundamental_discriminants,
    validate_fundamental_discriminant,
)

# zeta_D(1-2m) = (sum of divisor sums) / SIEGEL_DENOMINATOR[m]
SIEGEL_DENOMINATOR = {1: 60, 2: 120}
# L(1-2m, chi) = RIEMANN_RECIPROCAL[m] * zeta_D(1-2m); reciprocal of zeta(-1), zeta(-3)
RIEMANN_RECIPROCAL = {1: -12, 2: 120}

_MASK32 = (1 << 32) - 1


def riemann_zeta_neg(m: int) -> Fraction:
    """zeta(1 - 2m) for m >= 1."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return -bernoulli_exact(2 * m) / (2 * m)


def l_chi_exact(d: int, m: int) -> Fraction:
    """L(1 - 2m, chi_d) for m >= 1."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return -generalized_bernoulli_exact(d, 2 * m) / (2 * m)


def l_chi_mod(d: int, m: int, p: int) -> int:
    """L(1 - 2m, chi_d) mod p; needs p coprime to d.

    The modular recurrence route requires 2m <= p - 1; beyond that the
    value is still p-integral (the conductor is not p), so it is computed
    exactly and reduced.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if 2 * m > p - 1:
        validate_fundamental_discriminant(d)
        if d % p == 0:
            raise ValueError(f"modular reduction needs p coprime to the discriminant ({p} | {d})")
        value = l_chi_exact(d, m)
        if value.denominator % p == 0:
            raise ArithmeticError(f"L(1-{2 * m}, chi_{d}) is not {p}-integral")
        return value.numerator * pow(value.denominator, -1, p) % p
    b = generalized_bernoulli_mod(d, 2 * m, p)
    return (-b * pow(2 * m, -1, p)) % p


def zeta_d_exact(d: int, m: int) -> Fraction:
    """zeta_D(1 - 2m) = zeta(1 - 2m) * L(1 - 2m, chi_D)."""
    return riemann_zeta_neg(m) * l_chi_exact(d, m)


@dataclass(frozen=True)
class SpecialValue:
    """A tagged special value: Riemann zeta, character L, or field zeta."""

    kind: str  # "riemann" | "l_chi" | "zeta_d"
    discriminant: int | None
    m: int
    value: Fraction | int


def special_value(kind: str, m: int, d: int | None = None, mod: int | None = None) -> SpecialValue:
    if kind == "riemann":
        return SpecialValue("riemann", None, m, riemann_zeta_neg(m))
    if d is None:
        raise ValueError(f"{kind} values need a discriminant")
    validate_fundamental_discriminant(d)
    if kind == "l_chi":
        val = l_chi_mod(d, m, mod) if mod is not None else l_chi_exact(d, m)
    elif kind == "zeta_d":
        if mod is not None:
            raise ValueError("zeta_d has no modular route (the Riemann factor is not p-integral)")
        val = zeta_d_exact(d, m)
    else:
        raise ValueError(f"unknown special value kind {kind!r}")
    return SpecialValue(kind, d, m, val)


def _check_sigma(m: int, hi: int, sigma: SigmaTable) -> None:
    k = 2 * m - 1
    if sigma.exponent != k:
        raise ValueError(f"sigma table has exponent {sigma.exponent}, need {k} for m = {m}")
    need = (hi - 1) // 4
    if sigma.limit < need:
        raise ValueError(f"sigma table covers {sigma.limit} < required {need}")


def siegel_divisor_sums(m: int, lo: int, hi: int, sigma: SigmaTable) -> tuple[list[int], list[int]]:
    """(discriminants, divisor sums) for all fundamental D in [lo, hi).

    The sum for D is sum_b sigma_{2m-1}((D - b^2)/4) over b^2 < D with
    b = D (mod 2).  Accumulation is vectorized over D with the int64 values
    split into 32-bit halves, then reassembled into exact Python integers.
    """
    if m not in SIEGEL_DENOMINATOR:
        raise ValueError(f"no divisor-sum formula is pinned for m = {m}")
    _check_sigma(m, hi, sigma)
    discs = enumerate_fundamental_discriminants(lo, hi)
    if not discs:
        return [], []
    span = hi - lo
    acc_lo = np.zeros(span, dtype=np.int64)
    acc_hi = np.zeros(span, dtype=np.int64)
    b = 0
    while b * b + 4 < hi:
        weight = 1 if b == 0 else 2
        start = b * b + 4
        if start < lo:
            start += ((lo - start + 3) // 4) * 4
        sl = slice(start - lo, span, 4)
        ns = (np.arange(start, hi, 4) - b * b) // 4
        vals = sigma.values[ns]
        acc_lo[sl] += weight * (vals & _MASK32)
        acc_hi[sl] += weight * (vals >> 32)
        b += 1
    sums = [(int(acc_hi[d - lo]) << 32) + int(acc_lo[d - lo]) for d in discs]
    return discs, sums


def siegel_divisor_sums_mod(
    m: int, lo: int, hi: int, sigma: SigmaTable, modulus: int
) -> tuple[list[int], np.ndarray]:
    """Divisor sums reduced mod modulus, for valuation-only scans.

    Avoids wide integers entirely; agrees with siegel_divisor_sums modulo
    modulus (tested).  modulus must be modest enough that 2 * sqrt(hi) *
    modulus fits in int64, which every p^k used by the scans satisfies.
    """
    if m not in SIEGEL_DENOMINATOR:
        raise ValueError(f"no divisor-sum formula is pinned for m = {m}")
    _check_sigma(m, hi, sigma)
    if 2 * (math.isqrt(hi) + 1) * modulus >= 2**62:
        raise ValueError("modulus too large for the vectorized accumulator")
    discs = enumerate_fundamental_discriminants(lo, hi)
    span = hi - lo
    acc = np.zeros(span, dtype=np.int64)
    b = 0
    while b * b + 4 < hi:
        weight = 1 if b == 0 else 2
        start = b * b + 4
        if start < lo:
            start += ((lo - start + 3) // 4) * 4
        sl = slice(start - lo, span, 4)
        ns = (np.arange(start, hi, 4) - b * b) // 4
        acc[sl] += weight * (sigma.values[ns] % modulus)
        b += 1
    idx = np.array(discs, dtype=np.int64) - lo if discs else np.zeros(0, dtype=np.int64)
    return discs, acc[idx] % modulus


def siegel_batch(
    m: int, lo: int, hi: int, sigma: SigmaTable | None = None
) -> Iterator[tuple[int, Fraction]]:
    """Yield (D, zeta_D(1-2m)) exactly for every fundamental D in [lo, hi)."""
    if m not in SIEGEL_DENOMINATOR:
        raise ValueError(f"batch evaluation supports m in {{1, 2}}, not m = {m}")
    if sigma is None:
        sigma = divisor_sigma_sieve(2 * m - 1, max((hi - 1) // 4, 1))
    discs, sums = siegel_divisor_sums(m, lo, hi, sigma)
    denom = SIEGEL_DENOMINATOR[m]
    for d, s in zip(discs, sums):
        yield d, Fraction(s, denom)


def l_from_siegel(d: int, m: int, zd: Fraction) -> Fraction:
    """Recover L(1-2m, chi_d) from zeta_D(1-2m) by dividing out the Riemann factor."""
    if m not in RIEMANN_RECIPROCAL:
        raise ValueError(f"no pinned Riemann reciprocal for m = {m}")
    return RIEMANN_RECIPROCAL[m] * zd


_gate_validated: set[int] = set()


def validate_siegel_gate(limit: int = 1000) -> None:
    """Exact-equality gate: divisor-sum route vs twisted-Bernoulli route.

    Checks every fundamental D < limit for both m = 1 and m = 2; raises
    ArithmeticError on the first mismatch.  Must pass before any large
    batch run is trusted.
    """
    if limit in _gate_validated:
        return
    for m in (1, 2):
        for d, zd in siegel_batch(m, 2, limit):
            expected = zeta_d_exact(d, m)
            if zd != expected:
                raise ArithmeticError(
                    f"divisor-sum route disagrees at D={d}, m={m}: {zd} != {expected}"
                )
            if l_from_siegel(d, m, zd) != l_chi_exact(d, m):
                raise ArithmeticError(f"L-value recovery disagrees at D={d}, m={m}")
    _gate_validated.add(limit)
