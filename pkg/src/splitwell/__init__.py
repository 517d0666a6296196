"""Barrier insertion in a 1-D infinite square well and binary state discrimination.

The library models a particle in an infinite square well, the sudden
insertion of an impenetrable barrier (nodal or not), the truncated energy
bookkeeping of the resulting compartment expansions, free phase evolution,
and the Bayes cost of discriminating two candidate states when the energy
needed to insert the barrier is read out as a classical side-channel.
"""

from .discrimination import (
    BinaryDetector,
    CostBreakdown,
    GaussianReadout,
    MatchedPairReport,
    Scenario,
    SignalModel,
    combined_cost,
    helstrom_cost,
    matched_pair_probe,
    posterior_update,
    signal_likelihoods,
    split_overlap,
    sweep,
    transition_probability,
)
from .errors import ContractError, DomainError, NumericalError
from .evolution import DensityGrid, density_grid, evolve, evolve_split, slice_norms
from .insertion import (
    InsertionReport,
    SplitState,
    compartment_probability,
    insertion_energy_diagnostics,
    is_nodal,
    midpoint_coefficients_n1,
    split,
)
from .wellbox import (
    BoxState,
    WellGeometry,
    eigenenergy,
    energy_expectation,
    eval_state,
    inner_product,
    quadrature,
)

__version__ = "0.1.0"

__all__ = [
    "BinaryDetector", "BoxState", "ContractError", "CostBreakdown",
    "DensityGrid", "DomainError", "GaussianReadout", "InsertionReport",
    "MatchedPairReport", "NumericalError", "Scenario", "SignalModel",
    "SplitState", "WellGeometry", "combined_cost", "compartment_probability",
    "density_grid", "eigenenergy", "energy_expectation", "eval_state",
    "evolve", "evolve_split", "helstrom_cost", "inner_product",
    "insertion_energy_diagnostics", "is_nodal", "matched_pair_probe",
    "midpoint_coefficients_n1", "posterior_update", "quadrature",
    "signal_likelihoods", "slice_norms", "split", "split_overlap", "sweep",
    "transition_probability",
]
