"""Delay times through a narrowed waveguide.

SI units throughout: metres, hertz, seconds. The file-level tools (configs,
CSV data) use mm/cm, GHz/MHz and ns.
"""

from ._core import (
    SPEED_OF_LIGHT,
    Cutoffs,
    DegenerateInputError,
    DomainError,
    ExperimentConfig,
    GuideGeometry,
    Model,
    NumericError,
    OpticalTime,
    QuadratureSpec,
    ValidationError,
    buttiker_landauer_time,
    cutoff_frequencies,
    gaussian_expected_time,
    group_velocity,
    load_config,
    model_delay,
    optical_expected_time,
    phase_time,
    phase_velocity,
    preset,
    residues,
    run_scenario,
    transfer_matrix_transmission,
    transmission_coefficient,
)

__all__ = [
    "SPEED_OF_LIGHT",
    "Cutoffs",
    "DegenerateInputError",
    "DomainError",
    "ExperimentConfig",
    "GuideGeometry",
    "Model",
    "NumericError",
    "OpticalTime",
    "QuadratureSpec",
    "ValidationError",
    "buttiker_landauer_time",
    "cutoff_frequencies",
    "gaussian_expected_time",
    "group_velocity",
    "load_config",
    "model_delay",
    "optical_expected_time",
    "phase_time",
    "phase_velocity",
    "preset",
    "residues",
    "run_scenario",
    "transfer_matrix_transmission",
    "transmission_coefficient",
]
