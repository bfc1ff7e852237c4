"""Index distributions, chi-squared goodness of fit, and conjecture reports.

This is the only module that computes in floating point.  Predictions come
in two flavours:

* limit mode: P(index = r) -> (1/2)^r e^{-1/2} / r!, the large-p limit
  under the heuristic that each tested value vanishes mod p with
  probability 1/p over (p-1)/2 independent trials;
* exact mode: the small-p binomial itself, with T = (p-1)/2 trials of
  success probability 1/p per record.

The chi-squared statistic defaults to the grouping {0}, {1}, {2}, {>=3}
(three degrees of freedom); small-p tables override it with explicit
singleton categories.  Significance is the upper-tail probability of the
chi-squared distribution, Q(df/2, x/2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .irregularity import IndexRecord, IrregularPair


def limit_fraction(r: int) -> float:
    """Limiting fraction of primes with irregularity index r."""
    if r < 0:
        raise ValueError("index must be nonnegative")
    return 0.5**r * math.exp(-0.5) / math.factorial(r)


def exact_index_distribution(p: int, is_d_equal_p: bool = False) -> list[Fraction]:
    """Exact index probabilities at a small prime: binomial over T trials.

    T = (p-1)/2 in general; in the self-conductor case D = p the test range
    halves, so T = (p-1)/4 (p = 1 mod 4 makes that an integer).
    """
    if is_d_equal_p:
        if p % 4 != 1:
            raise ValueError("D = p requires p = 1 (mod 4)")
        trials = (p - 1) // 4
    else:
        trials = (p - 1) // 2
    q = Fraction(1, p)
    return [math.comb(trials, r) * q**r * (1 - q) ** (trials - r) for r in range(trials + 1)]


def significance(statistic: float, df: int) -> float:
    """Upper-tail chi-squared probability Q(df/2, statistic/2)."""
    if statistic < 0:
        raise ValueError("statistic must be nonnegative")
    if df < 1:
        raise ValueError("df must be positive")
    return _regularized_gamma_q(df / 2.0, statistic / 2.0)


def _regularized_gamma_q(a: float, x: float) -> float:
    """Q(a, x) = Gamma(a, x) / Gamma(a): series below a + 1, continued fraction above."""
    if x <= 0.0:
        return 1.0
    log_prefactor = -x + a * math.log(x) - math.lgamma(a)
    if x < a + 1.0:
        term = 1.0 / a
        total = term
        k = a
        while True:
            k += 1.0
            term *= x / k
            total += term
            if abs(term) < abs(total) * 1e-15:
                break
        p = total * math.exp(log_prefactor)
        return min(max(1.0 - p, 0.0), 1.0)
    # Lentz's continued fraction for the upper function
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 1000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            break
    return min(max(math.exp(log_prefactor) * h, 0.0), 1.0)


def group_indices(counts: Sequence[float], tail_from: int | None) -> tuple[list[str], list[float]]:
    """Collapse per-index counts into the chi-squared categories.

    tail_from = t groups everything with index >= t into one class; None
    keeps the given singletons as-is.
    """
    if tail_from is None:
        return [str(r) for r in range(len(counts))], list(counts)
    labels = [str(r) for r in range(tail_from)] + [f">={tail_from}"]
    head = list(counts[:tail_from]) + [0.0] * (tail_from - min(tail_from, len(counts)))
    tail = sum(counts[tail_from:]) if len(counts) > tail_from else 0.0
    return labels, head + [tail]


def chi_squared_statistic(
    observed: Sequence[float], expected: Sequence[float], tail_from: int | None = 3
) -> tuple[float, int]:
    """Goodness-of-fit statistic and degrees of freedom after grouping.

    Inputs are per-index sequences over an exhaustive category set; every
    grouped expected count must be positive.
    """
    _, obs = group_indices(observed, tail_from)
    _, exp = group_indices(expected, tail_from)
    if len(obs) != len(exp):
        raise ValueError("observed and expected category counts differ")
    if any(e <= 0 for e in exp):
        raise ValueError("every grouped category needs a positive expected count")
    stat = sum((o - e) ** 2 / e for o, e in zip(obs, exp))
    return float(stat), len(exp) - 1


@dataclass(frozen=True)
class DistributionTable:
    """Observed vs expected index counts plus the grouped chi-squared test.

    observed/expected/fractions are per-index rows for display; the grouped_*
    triple is what the statistic was computed on (df = len(grouped) - 1).
    """

    population: str
    size: float
    categories: tuple[str, ...]
    observed: tuple[float, ...]
    expected: tuple[float, ...]
    fractions: tuple[float, ...]
    chi_squared: float
    df: int
    significance: float
    grouped_labels: tuple[str, ...]
    grouped_observed: tuple[float, ...]
    grouped_expected: tuple[float, ...]


def _empty_table(population: str) -> DistributionTable:
    return DistributionTable(
        population=population,
        size=0,
        categories=(),
        observed=(),
        expected=(),
        fractions=(),
        chi_squared=0.0,
        df=0,
        significance=1.0,
        grouped_labels=(),
        grouped_observed=(),
        grouped_expected=(),
    )


def _population_label(records: Sequence[IndexRecord]) -> str:
    discs = {rec.discriminant for rec in records}
    return "primes-fixed-D" if len(discs) == 1 else "pairs-varying-D"


def observed_counts(records: Sequence[IndexRecord], r_max: int | None = None) -> list[int]:
    top = max((rec.index for rec in records), default=0)
    if r_max is not None:
        top = max(top, r_max)
    counts = [0] * (top + 1)
    for rec in records:
        counts[rec.index] += 1
    return counts


def expected_counts_limit(size: float, r_max: int) -> list[float]:
    return [size * limit_fraction(r) for r in range(r_max + 1)]


def expected_counts_exact(records: Sequence[IndexRecord], r_max: int) -> list[float]:
    """Sum of per-record binomial probabilities with T = (p-1)/2 trials.

    Uses the uniform trial count for every record, including D = p; that is
    the convention the reference tabulations follow.
    """
    per_prime: dict[int, list[Fraction]] = {}
    totals = [Fraction(0)] * (r_max + 1)
    for rec in records:
        probs = per_prime.get(rec.prime)
        if probs is None:
            probs = exact_index_distribution(rec.prime, is_d_equal_p=False)
            per_prime[rec.prime] = probs
        for r in range(min(r_max + 1, len(probs))):
            totals[r] += probs[r]
    return [float(t) for t in totals]


def build_distribution(
    records: Sequence[IndexRecord],
    prediction: str = "limit",
    tail_from: int | None = 3,
    r_max: int | None = None,
) -> DistributionTable:
    """Distribution table for a homogeneous record stream.

    prediction "limit" uses the limiting fractions with the tail class
    folded so expected counts total the population; "exact" sums the
    per-record small-p binomials (tail_from is then normally None).
    """
    records = list(records)
    if not records:
        return _empty_table("empty")
    if prediction not in ("limit", "exact"):
        raise ValueError(f"unknown prediction mode {prediction!r}")
    size = len(records)
    floor = r_max or 0
    if tail_from is not None:
        floor = max(floor, tail_from)
    elif prediction == "exact":
        # categories must be exhaustive: pad out to the largest trial count
        floor = max(floor, max((rec.prime - 1) // 2 for rec in records))
    counts = observed_counts(records, floor)
    top = len(counts) - 1
    if prediction == "limit":
        expected = expected_counts_limit(size, top)
        fractions = [limit_fraction(r) for r in range(top + 1)]
    else:
        expected = expected_counts_exact(records, top)
        fractions = [e / size for e in expected]
    g_labels, g_obs = group_indices(counts, tail_from)
    _, g_exp = group_indices(expected, tail_from)
    if tail_from is not None:
        # fold the full tail mass so grouped expected counts total the population
        if prediction == "limit":
            g_exp[-1] = size * (1.0 - sum(limit_fraction(r) for r in range(tail_from)))
        else:
            g_exp[-1] = size - sum(g_exp[:-1])
    stat = sum((o - e) ** 2 / e for o, e in zip(g_obs, g_exp))
    df = len(g_obs) - 1
    return DistributionTable(
        population=_population_label(records),
        size=size,
        categories=tuple(str(r) for r in range(top + 1)),
        observed=tuple(float(c) for c in counts),
        expected=tuple(expected),
        fractions=tuple(fractions),
        chi_squared=float(stat),
        df=df,
        significance=significance(float(stat), df),
        grouped_labels=tuple(g_labels),
        grouped_observed=tuple(float(o) for o in g_obs),
        grouped_expected=tuple(float(e) for e in g_exp),
    )


@dataclass(frozen=True)
class AggregateReport:
    """Totals plus per-discriminant averages, each with its own test."""

    totals: DistributionTable
    averages: DistributionTable
    discriminants: int


def aggregate_across_discriminants(
    records: Sequence[IndexRecord],
    prediction: str = "limit",
    tail_from: int | None = 3,
    r_max: int | None = None,
) -> AggregateReport:
    """Apply the averaged-counts methodology next to the plain totals.

    The averages table divides every observed and expected count by the
    number of distinct discriminants and recomputes the statistic on those
    means.  The result is a heuristic: dividing by a constant just rescales
    the statistic, so treat its significance as descriptive only.
    """
    records = list(records)
    totals = build_distribution(records, prediction, tail_from, r_max)
    n_disc = len({rec.discriminant for rec in records})
    if n_disc == 0:
        return AggregateReport(totals=totals, averages=totals, discriminants=0)
    avg_obs = [Fraction(int(o)) / n_disc for o in totals.observed]
    avg_exp = [Fraction(e) / n_disc for e in totals.expected]
    g_obs = [Fraction(int(o)) / n_disc for o in totals.grouped_observed]
    g_exp = [Fraction(e) / n_disc for e in totals.grouped_expected]
    stat = float(sum((o - e) ** 2 / e for o, e in zip(g_obs, g_exp)))
    df = len(g_obs) - 1 if g_obs else 0
    averages = DistributionTable(
        population=totals.population,
        size=totals.size / n_disc,
        categories=totals.categories,
        observed=tuple(avg_obs),
        expected=tuple(avg_exp),
        fractions=totals.fractions,
        chi_squared=stat,
        df=df,
        significance=significance(stat, df) if df else 1.0,
        grouped_labels=totals.grouped_labels,
        grouped_observed=tuple(g_obs),
        grouped_expected=tuple(g_exp),
    )
    return AggregateReport(totals=totals, averages=averages, discriminants=n_disc)


def residue_class_report(
    irregular_primes: Iterable[int], all_odd_primes: Iterable[int], n: int
) -> DistributionTable:
    """Distribution of irregular primes over residue classes mod n.

    Expected count per class is (total irregular) * (share of all odd primes
    living in the class), i.e. the even-spread hypothesis.
    """
    if n < 3:
        raise ValueError("modulus must be at least 3")
    all_primes = sorted(set(all_odd_primes))
    irregular = sorted(set(irregular_primes))
    if not all_primes or not irregular:
        raise ValueError("both prime sets must be nonempty")
    if not set(irregular) <= set(all_primes):
        raise ValueError("irregular primes must be a subset of the reference primes")
    classes = sorted({p % n for p in all_primes})
    total_by_class = {c: 0 for c in classes}
    irregular_by_class = {c: 0 for c in classes}
    for p in all_primes:
        total_by_class[p % n] += 1
    for p in irregular:
        irregular_by_class[p % n] += 1
    total = len(all_primes)
    n_irr = len(irregular)
    observed = [float(irregular_by_class[c]) for c in classes]
    shares = [total_by_class[c] / total for c in classes]
    expected = [n_irr * s for s in shares]
    stat = sum((o - e) ** 2 / e for o, e in zip(observed, expected))
    df = len(classes) - 1
    labels = tuple(str(c) for c in classes)
    return DistributionTable(
        population=f"irregular-primes-mod-{n}",
        size=n_irr,
        categories=labels,
        observed=tuple(observed),
        expected=tuple(expected),
        fractions=tuple(shares),
        chi_squared=float(stat),
        df=df,
        significance=significance(float(stat), df),
        grouped_labels=labels,
        grouped_observed=tuple(observed),
        grouped_expected=tuple(expected),
    )


@dataclass(frozen=True)
class UniformityReport:
    """2m/p ratios against the uniform distribution on (0, 1)."""

    count: int
    bins: int
    histogram: tuple[int, ...]
    chi_squared: float
    df: int
    significance: float
    ks_statistic: float


def ratio_uniformity_report(pairs: Sequence[IrregularPair], bins: int = 10) -> UniformityReport:
    """Equal-width-bin chi-squared and Kolmogorov-Smirnov distance for 2m/p."""
    if bins < 2:
        raise ValueError("need at least two bins")
    if not pairs:
        raise ValueError("no irregular pairs supplied")
    values = sorted(pair.two_m / pair.prime for pair in pairs)
    n = len(values)
    hist = [0] * bins
    for v in values:
        hist[min(int(v * bins), bins - 1)] += 1
    exp = n / bins
    stat = sum((h - exp) ** 2 / exp for h in hist)
    d_plus = max((i + 1) / n - v for i, v in enumerate(values))
    d_minus = max(v - i / n for i, v in enumerate(values))
    return UniformityReport(
        count=n,
        bins=bins,
        histogram=tuple(hist),
        chi_squared=float(stat),
        df=bins - 1,
        significance=significance(float(stat), bins - 1),
        ks_statistic=max(d_plus, d_minus),
    )


def residue_histogram(values: Sequence[int], p: int) -> DistributionTable:
    """Counts of residues mod p against the uniform expectation N/p."""
    if not values:
        raise ValueError("no residues supplied")
    counts = [0] * p
    for v in values:
        counts[v % p] += 1
    n = len(values)
    exp = n / p
    stat = sum((c - exp) ** 2 / exp for c in counts)
    labels = tuple(str(r) for r in range(p))
    observed = tuple(float(c) for c in counts)
    expected = tuple(exp for _ in range(p))
    return DistributionTable(
        population=f"residues-mod-{p}",
        size=n,
        categories=labels,
        observed=observed,
        expected=expected,
        fractions=tuple(1.0 / p for _ in range(p)),
        chi_squared=float(stat),
        df=p - 1,
        significance=significance(float(stat), p - 1),
        grouped_labels=labels,
        grouped_observed=observed,
        grouped_expected=expected,
    )
