"""Groundstates, fidelity per site and order parameters of the bond-alternating Ising chain.

The chain ``H = sum_i (J' S^z_{2i-1} S^z_{2i} + J S^z_{2i} S^z_{2i+1})`` with
``J = cos(theta)``, ``J' = sin(theta)`` is simulated with imaginary-time
evolution of period-4 infinite matrix product states.
"""

__version__ = "0.1.0"

from .errors import (
    BoundaryError,
    BondIsingError,
    ConvergenceError,
    DegenerateStateError,
    InvalidInputError,
    NumericFailure,
)
from .imps import (
    IMPS,
    SIGMA_Z,
    basis_state,
    canonicalize,
    correlation,
    expectation,
    load_state,
    mixed_transfer_eigenvalue,
    normalize,
    product_state,
    random_product_state,
    random_state,
    save_state,
    symmetry_transform,
)
from .model import (
    ModelParams,
    PhaseLabel,
    bond_hamiltonian,
    energy_per_site,
    exact_energy_per_site,
    exact_ground_pair,
    phase_of,
)
from .itebd import EvolutionReport, Schedule, apply_gate, bond_gate, evolve
from .fidelity import (
    DegeneracyReport,
    FidelityRecord,
    cluster_fidelities,
    fidelity_per_site,
    run_campaign,
)
from .orderparams import OrderParameterSet, classify, local_magnetizations, order_parameters
from .oracle import GroundManifold, brute_force_ground, oracle_observables
