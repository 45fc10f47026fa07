"""Photon correlations of emitters in a 1D waveguide from a truncated wave-function ansatz."""

from .chain import (ChainParams, ChainTrajectory, assemble_chain_two_photon, branch_chain_emission,
                    integrate_chain, propagate_chain_after_emission, solve_chain)
from .correlations import (CorrelationResult, g1_full, g1_leading, g2_full, g2_leading,
                           g2_normalized_from_solution, g2_normalized_steady, mean_photons,
                           pulsed_g2)
from .drive import DriveEnvelope
from .dynamics import (AnsatzSolution, ChainPhotonField, EmitterTrajectory, SinglePhotonField,
                       SystemParams, TwoPhotonAmplitude, assemble_two_photon, branch_single_photon,
                       integrate_emitter, linear_steady_start, propagate_after_emission, solve)
from .exceptions import ConvergenceError, IntegrationError, PhotonCorrError
from .filters import (FilterSpec, FrequencyGrid, filter_transmission, filtered_mean_photons,
                      filtered_pulse, filtered_pulsed_g2, single_photon_efficiency)
from .grid import TimeGrid
from .oracle import DensityState, evolve_density, regression_cw_g2, regression_pulsed_g2

__version__ = "0.1.0"

__all__ = [
    "AnsatzSolution", "ChainParams", "ChainPhotonField", "ChainTrajectory", "ConvergenceError",
    "CorrelationResult", "DensityState", "DriveEnvelope", "EmitterTrajectory", "FilterSpec",
    "FrequencyGrid", "IntegrationError", "PhotonCorrError", "SinglePhotonField", "SystemParams",
    "TimeGrid", "TwoPhotonAmplitude", "assemble_chain_two_photon", "assemble_two_photon",
    "branch_chain_emission", "branch_single_photon", "evolve_density", "filter_transmission",
    "filtered_mean_photons", "filtered_pulse", "filtered_pulsed_g2", "g1_full", "g1_leading",
    "g2_full", "g2_leading", "g2_normalized_from_solution", "g2_normalized_steady",
    "integrate_chain", "integrate_emitter", "linear_steady_start", "mean_photons",
    "propagate_after_emission", "propagate_chain_after_emission", "pulsed_g2",
    "regression_cw_g2", "regression_pulsed_g2", "single_photon_efficiency", "solve",
    "solve_chain",
]
