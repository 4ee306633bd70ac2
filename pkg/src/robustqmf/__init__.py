"""Quantum minimum finding with an imprecise or adversarial comparator.

Desk-scale simulation: an exact probabilistic model of Grover exponential
search drives pivot-based minimum-finding algorithms against comparators
that may answer arbitrarily on close-by values, plus a hypothesis-selection
pipeline built on the Scheffe test and a reproducible Monte Carlo harness.
"""

from .comparator import ComparatorState, MarkedSet, STRATEGIES
from .grover import (GroverParams, SearchOutcome, qsearch_with_cutoff,
                     sample_measurement, statevector_reference, success_probability)
from .harness import ExperimentConfig, TrialRecord, mix_seed, run_trials, scaling_study
from .instance import FudgeReport, Instance, generate, load_instance, save_instance
from .minfind import (DerivedConstants, PivotTrace, derived_constants,
                      extend_with_dummies, min_select, pivot_qmf, qmf_noiseless,
                      repeated_pivot_qmf, robust_qmf)
from .scheffe import (DiscreteDistribution, HypothesisSet, ScheffeComparatorState,
                      empirical_mass, hypothesis_select, l1_distance, mass,
                      required_samples, scheffe_set, x_value)

__all__ = [
    "ComparatorState", "MarkedSet", "STRATEGIES",
    "GroverParams", "SearchOutcome", "qsearch_with_cutoff", "sample_measurement",
    "statevector_reference", "success_probability",
    "ExperimentConfig", "TrialRecord", "mix_seed", "run_trials", "scaling_study",
    "FudgeReport", "Instance", "generate", "load_instance", "save_instance",
    "DerivedConstants", "PivotTrace", "derived_constants", "extend_with_dummies",
    "min_select", "pivot_qmf", "qmf_noiseless", "repeated_pivot_qmf", "robust_qmf",
    "DiscreteDistribution", "HypothesisSet", "ScheffeComparatorState",
    "empirical_mass", "hypothesis_select", "l1_distance", "mass",
    "required_samples", "scheffe_set", "x_value",
]
