"""Irreducibility of Eaton's Markov chain on finite and discretized models."""
from .finite_model import (Custom, DegenerateModelError, FiniteModel,
                           ModelError, PointMass, PosteriorKernel,
                           UniformOverPositivePrior, WeightedMeasure,
                           build_fpd, marginal, verify_fpd)
from .kernel import (TransitionKernel, build_eaton_kernel, check_reversibility,
                     compare_versions)
from .chains import (ClosedSet, FiniteChain, ReducibilityWitness,
                     brute_force_reducible, closed_set_from_witness,
                     find_closed_sets, is_phi_irreducible, n_step,
                     positivity_digraph, relocate_witness)
from .partition import (PartitionWitness, SupportGraph, brute_force_witness,
                        build_reducible_version, common_support_quick_check,
                        find_partition_witness, validate_witness,
                        witness_from_closed_set)
from .recurrence import (ReturnEstimate, ReturnTimeConfig,
                         exact_return_probability, local_recurrence_report,
                         simulate_return_finite, simulate_return_walk)
from .report import run_pipeline

__version__ = "0.1.0"

__all__ = [
    "Custom",
    "DegenerateModelError",
    "FiniteModel",
    "ModelError",
    "PointMass",
    "PosteriorKernel",
    "UniformOverPositivePrior",
    "WeightedMeasure",
    "build_fpd",
    "marginal",
    "verify_fpd",
    "TransitionKernel",
    "build_eaton_kernel",
    "check_reversibility",
    "compare_versions",
    "ClosedSet",
    "FiniteChain",
    "ReducibilityWitness",
    "brute_force_reducible",
    "closed_set_from_witness",
    "find_closed_sets",
    "is_phi_irreducible",
    "n_step",
    "positivity_digraph",
    "relocate_witness",
    "PartitionWitness",
    "SupportGraph",
    "brute_force_witness",
    "build_reducible_version",
    "common_support_quick_check",
    "find_partition_witness",
    "validate_witness",
    "witness_from_closed_set",
    "ReturnEstimate",
    "ReturnTimeConfig",
    "exact_return_probability",
    "local_recurrence_report",
    "simulate_return_finite",
    "simulate_return_walk",
    "run_pipeline",
]
