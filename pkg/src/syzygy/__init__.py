"""Cayley-Hamilton identities from the vanishing of the (m+1)-index generalized
Kronecker delta in m dimensions: symbolic expansion plus numeric oracles."""

from .combinatorics import (
    Pairing,
    Permutation,
    cycle_decomposition,
    enumerate_pairings,
    levi_civita,
    permutations_with_sign,
)
from .errors import (
    DomainError,
    InconsistencyError,
    ResourceLimitError,
    SyzygyError,
    UndefinedSymbolError,
)
from .invariants import (
    InvariantVector,
    generalized_delta_component,
    newton_girard,
    power_sums,
    principal_invariants,
    principal_minors_sum,
    sigma_via_delta,
)
from .symbolic import (
    SymbolicPolynomial,
    TraceMonomial,
    expand_delta_contraction,
    normalize_ch,
    render,
    to_power_sum_basis,
    to_sigma_basis,
)

from .verify import (
    VerificationReport,
    brute_force_delta_contract,
    ch_residual,
    check_delta_vanishes,
    verify_expansion_identity,
)

__version__ = "0.1.0"
