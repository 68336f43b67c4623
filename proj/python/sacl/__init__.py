"""Stochastic Allen-Cahn simulations on the flat torus."""

from ._core import (
    __version__,
    action_eps,
    config_echo,
    exact_mcf_path_json,
    energy_report,
    free_energy,
    mcf_sphere_radius,
    noise_strength,
    omega_one,
    optimal_profile,
    rate_sphere_path,
    run_cli,
    selfcheck,
    simulate,
    surface_tension,
)

__all__ = [
    "__version__",
    "action_eps",
    "config_echo",
    "exact_mcf_path_json",
    "energy_report",
    "free_energy",
    "mcf_sphere_radius",
    "noise_strength",
    "omega_one",
    "optimal_profile",
    "rate_sphere_path",
    "run_cli",
    "selfcheck",
    "simulate",
    "surface_tension",
]
