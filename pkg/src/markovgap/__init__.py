"""Markov gap h(A:B) = S_R(A:B) - I(A:B) for free-fermion lattice states.

The package computes reflected entropy and mutual information of
tripartitioned Gaussian ground states from their covariance matrices,
builds Hofstadter-type lattice models (single layers and time-reversal
paired stacks), and minimizes the Markov gap over Gaussian unitaries
supported near the trisection points of the partition.  A brute-force
statevector oracle validates every Gaussian formula on small systems.
"""

from .errors import (
    ConfigError,
    ConvergenceError,
    GeometryError,
    MarkovGapError,
    NumericError,
)
from .gaussian import (
    CovarianceMatrix,
    entanglement_hamiltonian,
    entropy,
    markov_gap,
    mutual_information,
    reflected_covariance,
    reflected_entropy,
    restrict,
)
from .lattice import Lattice, SmootherSupport, Tripartition, build_tripartition, smoother_support
from .models import (
    BandSolution,
    ModelSpec,
    bloch_hamiltonian,
    chern_number,
    covariance_real_space,
    solve_bands,
    stack,
    time_reversal_pair,
    tr_operator,
)
from .descent import OptimizerConfig, OptimizationReport, optimize

__all__ = [
    "CovarianceMatrix",
    "entanglement_hamiltonian",
    "entropy",
    "mutual_information",
    "reflected_covariance",
    "reflected_entropy",
    "markov_gap",
    "restrict",
    "Lattice",
    "Tripartition",
    "SmootherSupport",
    "build_tripartition",
    "smoother_support",
    "ModelSpec",
    "BandSolution",
    "bloch_hamiltonian",
    "solve_bands",
    "covariance_real_space",
    "stack",
    "time_reversal_pair",
    "chern_number",
    "tr_operator",
    "OptimizerConfig",
    "OptimizationReport",
    "optimize",
    "MarkovGapError",
    "ConfigError",
    "GeometryError",
    "NumericError",
    "ConvergenceError",
]

__version__ = "0.1.0"
