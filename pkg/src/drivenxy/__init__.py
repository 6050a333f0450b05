"""Entanglement generation and routing in ac-driven anisotropic XY spin networks."""

__version__ = "0.1.0"

from .errors import (ConfigError, DrivenXYError, NumericError, ResourceError,
                     UnsupportedScenarioError)
from .hilbert import (DensityMatrix, PureState, TwoQubitState, apply_pauli, apply_two_site,
                      basis_state, dense_operator, partial_trace, vacuum)
from .model import (DriveProtocol, LabHamiltonian, InteractionHamiltonian, NetworkSpec,
                    PhaseFrame, StaticEdgeHamiltonian, drive_values, excitation_number,
                    hamiltonian_action, interaction_phases, rotate_frame)
from .propagate import (NoiseSpec, StepControl, Trajectory, evolve_lindblad, evolve_pure,
                        expm_oracle)
from .entanglement import ConcurrenceTrace, concurrence, concurrence_trace, concurrences
from .rwa import (EffectiveModel, ResonancePrediction, effective_resonant_model,
                  expansion_coefficient, predict_resonances)
from .router import (RouterSpec, SplitResult, SplitState, build_router_graph,
                     multipartite_target_state, pairwise_concurrence_table, run_split_experiment)
from .config import SweepConfig, load_preset, parse_config
from .sweep import SweepResult, run_decoherence_sweep, run_frequency_sweep

__all__ = [
    "__version__",
    "DrivenXYError", "ConfigError", "ResourceError", "NumericError", "UnsupportedScenarioError",
    "PureState", "DensityMatrix", "TwoQubitState", "basis_state", "vacuum", "apply_pauli",
    "apply_two_site", "partial_trace", "dense_operator",
    "NetworkSpec", "DriveProtocol", "PhaseFrame", "LabHamiltonian", "InteractionHamiltonian",
    "StaticEdgeHamiltonian", "drive_values", "interaction_phases", "rotate_frame",
    "excitation_number", "hamiltonian_action",
    "NoiseSpec", "StepControl", "Trajectory", "evolve_pure", "evolve_lindblad", "expm_oracle",
    "ConcurrenceTrace", "concurrence", "concurrences", "concurrence_trace",
    "EffectiveModel", "ResonancePrediction", "effective_resonant_model",
    "expansion_coefficient", "predict_resonances",
    "RouterSpec", "SplitResult", "SplitState", "build_router_graph", "run_split_experiment",
    "multipartite_target_state", "pairwise_concurrence_table",
    "SweepConfig", "parse_config", "load_preset", "SweepResult", "run_frequency_sweep",
    "run_decoherence_sweep",
]
