"""sigma over linear forms: sign scans, Euler-product densities, CRT constructions.

Linear forms are given as text ("30x+1") or as (a, b) pairs. Exact
rationals come back as fractions.Fraction, big integers as int.
"""

from ._signlab import (
    BudgetExceeded,
    ConstructionError,
    DomainError,
    Error,
    HypothesisError,
    RangeError,
    abundancy_target_search,
    admissibility_check,
    beta,
    build_crt,
    build_instance,
    compare_partial_sums,
    factorize,
    heath_brown_bound,
    local_factor,
    omega_bounded_scan,
    parse_form,
    phi,
    phi_dominance_scan,
    predicted_ratio,
    prime_in_ap,
    prime_strings,
    root_count,
    scan_signs,
    sigma,
    simultaneous_check,
    theorem1_min_a,
    theorem1_witnesses,
    theorem3_hunt,
)

__version__ = "0.1.0"
