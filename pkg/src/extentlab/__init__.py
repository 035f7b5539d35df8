"""Extent of complex vectors over finite dictionaries.

Library + CLI for computing the extent (squared minimal l1 norm of a
decomposition) via a second-order cone program, analyzing the optimal dual
witnesses, and running seeded experiments over stabilizer dictionaries.
"""

from .dictionary import Dictionary, Word, make_dictionary, maximally_entangled
from .experiments import (
    ExperimentResult,
    add_phi_experiment,
    concentration_experiment,
    improve_single_basis_pair,
    optimality_condition_check,
    overlap_tail_experiment,
    product_multiplicativity_experiment,
)
from .extent import ExtentSolution, extent, fidelity, magic_t_state
from .rng import haar_sample, trial_rng
from .socp import SocpProblem, SocpSolution, SolverOptions, build_extent_socp, check_dual_feasibility, solve
from .stab import (
    AffineForm,
    PauliOperator,
    StabilizerBasisPartition,
    enumerate_stabilizer_states,
    group_into_bases,
    pauli_commutes,
    stabilizer_amplitudes,
    stabilizer_state_count,
)
from .witness import (
    ActiveSet,
    SlacknessReport,
    active_set,
    check_complementary_slackness,
    in_interior,
    in_normal_cone,
    is_extreme_point,
    witness_is_unique,
    word_addition_strictly_decreases,
)

__version__ = "0.1.0"

__all__ = [
    "ActiveSet",
    "AffineForm",
    "Dictionary",
    "ExperimentResult",
    "ExtentSolution",
    "PauliOperator",
    "SlacknessReport",
    "SocpProblem",
    "SocpSolution",
    "SolverOptions",
    "StabilizerBasisPartition",
    "Word",
    "active_set",
    "add_phi_experiment",
    "build_extent_socp",
    "concentration_experiment",
    "check_complementary_slackness",
    "check_dual_feasibility",
    "enumerate_stabilizer_states",
    "extent",
    "fidelity",
    "group_into_bases",
    "haar_sample",
    "improve_single_basis_pair",
    "in_interior",
    "in_normal_cone",
    "is_extreme_point",
    "magic_t_state",
    "make_dictionary",
    "maximally_entangled",
    "optimality_condition_check",
    "overlap_tail_experiment",
    "pauli_commutes",
    "product_multiplicativity_experiment",
    "solve",
    "trial_rng",
    "stabilizer_amplitudes",
    "stabilizer_state_count",
    "witness_is_unique",
    "word_addition_strictly_decreases",
]
