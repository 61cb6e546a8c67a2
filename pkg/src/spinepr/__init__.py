"""Entanglement and EPR criteria for lossy, noisy spin-entangled states.

Modules
-------
qmatrix
    Dense complex-matrix kernel (tensor products, partial transpose/trace,
    Hermitian spectra, expectations).
states
    Werner states, the beam-splitter loss model and Schwinger spin operators.
criteria
    Negativity, variance entanglement criteria and the EPR inference criterion.
gaussian
    Moment-level model of the macroscopic two-mode-squeezed spin state.
sampler
    Monte Carlo outcome sampling with bootstrap error bars.
cli
    ``spinepr`` command-line tool.
"""

from .criteria import (
    CriterionReport,
    InferenceConvention,
    collective_spin_criterion,
    epr_criterion,
    epr_threshold_qubit,
    hofmann_takeuchi_projected,
    negativity,
    negativity_formula,
)
from .errors import ContractViolation, DegenerateError, DimensionError, DomainError
from .qmatrix import DensityMatrix, Observable
from .states import (
    WernerLossParams,
    bell_singlet,
    lossy_state_closed_form,
    lossy_state_dilation,
    project_two_photon,
    werner_state,
)

__version__ = "0.1.0"

__all__ = [
    "ContractViolation",
    "CriterionReport",
    "DegenerateError",
    "DensityMatrix",
    "DimensionError",
    "DomainError",
    "InferenceConvention",
    "Observable",
    "WernerLossParams",
    "bell_singlet",
    "collective_spin_criterion",
    "epr_criterion",
    "epr_threshold_qubit",
    "hofmann_takeuchi_projected",
    "lossy_state_closed_form",
    "lossy_state_dilation",
    "negativity",
    "negativity_formula",
    "project_two_photon",
    "werner_state",
]
