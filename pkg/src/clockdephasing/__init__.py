"""Dephasing, fidelity and cooling consequences of imperfectly timed quantum control."""
from .channels import DephasedGateChannel, apply_channel, build_channel, monte_carlo_average
from .circuit import CircuitSpec, empirical_average_fidelity, simulate_noisy_circuit
from .cooling import CoolingConfig, ground_population_after_n
from .metrics import FidelityReport, circuit_fidelity_bound, required_accuracy
from .qcore import SpectralHamiltonian, hermitian_eigendecomposition
from .ticks import Comb, Dirac, Empirical, Exponential, Gaussian, TickDistribution

__version__ = "0.1.0"

__all__ = [
    "Comb", "CircuitSpec", "CoolingConfig", "DephasedGateChannel", "Dirac", "Empirical",
    "Exponential", "FidelityReport", "Gaussian", "SpectralHamiltonian", "TickDistribution",
    "apply_channel", "build_channel", "circuit_fidelity_bound", "empirical_average_fidelity",
    "ground_population_after_n", "hermitian_eigendecomposition", "monte_carlo_average",
    "required_accuracy", "simulate_noisy_circuit",
]
