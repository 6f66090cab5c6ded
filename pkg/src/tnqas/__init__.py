"""Compact ground-state circuits from tensor-network warm-started RL search.

Pipeline: DMRG ground-state MPS -> Riemannian brickwork compilation ->
transpilation to {RX, RY, RZ, CNOT} -> RL architecture search on top.
"""

from .pauli import (
    PauliSum,
    build_heisenberg,
    build_tfim,
    exact_ground_energy,
    fake_minimum_energy,
    parse_hamiltonian_file,
    serialize_hamiltonian,
    to_dense_matrix,
)
from .circuits import Circuit, GateOp
from .simulator import NoiseModel, expectation, run_circuit, run_circuit_noisy, zero_state
from .tensornet import MPS, MPO, DmrgConfig, DmrgSolver, dmrg_ground_state, mpo_from_pauli_sum
from .stiefel import BrickworkLayout, CircuitFitter, UnitaryStack, fit_mps_to_circuit
from .kak import kak_decompose, transpile_stack, zyz_decompose
from .optimize import EnergyEvaluator, optimize_parameters
from .env import EnvConfig, QasEnv, WarmStart, compute_reward, curriculum_update
from .agents import DdqnAgent, DdqnConfig, SaConfig, random_agent_episode, sa_search
from .harness import GroundStateSearch, RunConfig, run_pipeline, run_training, summarize

__version__ = "0.1.0"

__all__ = [
    "PauliSum", "build_tfim", "build_heisenberg", "parse_hamiltonian_file",
    "serialize_hamiltonian", "fake_minimum_energy", "exact_ground_energy",
    "to_dense_matrix",
    "Circuit", "GateOp",
    "NoiseModel", "expectation", "run_circuit", "run_circuit_noisy", "zero_state",
    "MPS", "MPO", "DmrgConfig", "DmrgSolver", "dmrg_ground_state", "mpo_from_pauli_sum",
    "BrickworkLayout", "CircuitFitter", "UnitaryStack", "fit_mps_to_circuit",
    "kak_decompose", "transpile_stack", "zyz_decompose",
    "EnergyEvaluator", "optimize_parameters",
    "EnvConfig", "QasEnv", "WarmStart", "compute_reward", "curriculum_update",
    "DdqnAgent", "DdqnConfig", "SaConfig", "random_agent_episode", "sa_search",
    "GroundStateSearch", "RunConfig", "run_pipeline", "run_training", "summarize",
]
