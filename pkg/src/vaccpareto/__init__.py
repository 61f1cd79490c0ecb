"""Vaccination strategies for heterogeneous SIS models.

Reproduction numbers, endemic equilibria, Pareto and anti-Pareto frontiers of
the (cost, loss) problem, and model equivalences that preserve them.
"""
from .equilibrium import (
    Equilibrium,
    EquilibriumOptions,
    Stability,
    equilibrium_strategy,
    gradient_I,
    infected_fraction,
    integrate_sis,
    linear_stability,
    maximal_equilibrium,
    vector_field,
)
from .equivalence import (
    SiteMapping,
    blow_up,
    lift_strategy,
    permutation_mapping,
    project_strategy,
    reduce,
    verify_equivalence,
)
from .errors import ModelError, NumericalError
from .model import (
    FeatureSpace,
    Kernel,
    SisModel,
    build_block_model,
    build_homogeneous,
    build_multipartite,
    build_perturbed_multipartite,
    irreducibility_class,
    load_model,
    make_model,
    multipartite_prefix_strategy,
    permuted,
    save_model,
    zoo,
)
from .pareto import (
    CostFunction,
    Frontier,
    OptimizerOptions,
    anti_pareto_frontier,
    chord_and_convexity_report,
    cost,
    eradication_cost,
    feasible_region_sample,
    grid_oracle,
    loss_value,
    maximize_loss_at_cost,
    min_cost_at_loss,
    minimize_loss_at_cost,
    pareto_frontier,
    read_frontier_csv,
    write_frontier_csv,
)
from .spectral import basic_R, effective_R, gradient_Re, perron_triple, re_stability_gap

__version__ = "0.1.0"
