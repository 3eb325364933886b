"""Entanglement-optimized hopping patterns for spinless lattice fermions."""
from ._validation import NumericalError
from .concurrence import (
    OneBodyDensity,
    PairCorrelators,
    PairDensityMatrix,
    batch_fitness,
    bond_concurrences,
    concurrence_closed,
    concurrence_spectral,
    correlators,
    fitness,
    one_body_density,
    pair_rho,
    wootters_concurrence,
)
from .estimator import BondConcurrenceTransformer, ConcurrenceOptimizer
from .ga import GaConfig, GenerationStats, RunResult, alternation_score, run_filling_sweep
from .lattice import Bond, BondTable, LatticeSpec, build_bond_table, lattice_from_params
from .oracle import fock_correlators, fock_ground_state, fock_pair_rho
from .spectrum import Spectrum, assemble_hamiltonian, diagonalize

__version__ = "0.1.0"

__all__ = [
    "NumericalError",
    "OneBodyDensity", "PairCorrelators", "PairDensityMatrix",
    "batch_fitness", "bond_concurrences", "concurrence_closed", "concurrence_spectral",
    "correlators", "fitness", "one_body_density", "pair_rho", "wootters_concurrence",
    "BondConcurrenceTransformer", "ConcurrenceOptimizer",
    "GaConfig", "GenerationStats", "RunResult", "alternation_score", "run_filling_sweep",
    "Bond", "BondTable", "LatticeSpec", "build_bond_table", "lattice_from_params",
    "fock_correlators", "fock_ground_state", "fock_pair_rho",
    "Spectrum", "assemble_hamiltonian", "diagonalize",
]
