"""quadzeta: special values of real quadratic zeta and L-functions.

Exact rational values, modular fast paths, irregularity-index scans, and
the goodness-of-fit statistics used to compare observed index counts with
the even-distribution heuristic.
"""

from .bernoulli import (
    CharacterPowerSums,
    ModularBernoulliTable,
    bernoulli_exact,
    bernoulli_mod_table,
    character_power_sums,
    generalized_bernoulli_exact,
    generalized_bernoulli_mod,
    warm_bernoulli_cache,
)
from .irregularity import (
    IndexRecord,
    IrregularPair,
    chi_irregularity_index,
    classical_irregularity_index,
    d_irregularity_index,
    delta,
    high_valuation_survey,
    irregular_pairs,
    scan_fixed_discriminant,
    scan_fixed_primes,
)
from .lvalues import (
    SpecialValue,
    l_chi_exact,
    l_chi_mod,
    l_from_siegel,
    riemann_zeta_neg,
    siegel_batch,
    special_value,
    validate_siegel_gate,
    zeta_d_exact,
)
from .numtheory import (
    QuadraticCharacter,
    SigmaTable,
    divisor_sigma_sieve,
    enumerate_fundamental_discriminants,
    is_fundamental_discriminant,
    kronecker_symbol,
    odd_primes_up_to,
    p_adic_valuation,
)
from .stats import (
    AggregateReport,
    DistributionTable,
    UniformityReport,
    aggregate_across_discriminants,
    build_distribution,
    chi_squared_statistic,
    exact_index_distribution,
    limit_fraction,
    ratio_uniformity_report,
    residue_class_report,
    residue_histogram,
    significance,
)

__version__ = "0.1.0"

__all__ = [
    "AggregateReport",
    "CharacterPowerSums",
    "DistributionTable",
    "IndexRecord",
    "IrregularPair",
    "ModularBernoulliTable",
    "QuadraticCharacter",
    "SigmaTable",
    "SpecialValue",
    "UniformityReport",
    "aggregate_across_discriminants",
    "bernoulli_exact",
    "bernoulli_mod_table",
    "build_distribution",
    "character_power_sums",
    "chi_irregularity_index",
    "chi_squared_statistic",
    "classical_irregularity_index",
    "d_irregularity_index",
    "delta",
    "divisor_sigma_sieve",
    "enumerate_fundamental_discriminants",
    "exact_index_distribution",
    "generalized_bernoulli_exact",
    "generalized_bernoulli_mod",
    "high_valuation_survey",
    "irregular_pairs",
    "is_fundamental_discriminant",
    "kronecker_symbol",
    "l_chi_exact",
    "l_chi_mod",
    "l_from_siegel",
    "limit_fraction",
    "odd_primes_up_to",
    "p_adic_valuation",
    "ratio_uniformity_report",
    "residue_class_report",
    "residue_histogram",
    "riemann_zeta_neg",
    "scan_fixed_discriminant",
    "scan_fixed_primes",
    "siegel_batch",
    "significance",
    "special_value",
    "validate_siegel_gate",
    "warm_bernoulli_cache",
    "zeta_d_exact",
]
