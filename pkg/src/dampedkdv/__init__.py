"""Pseudospectral simulation and diagnostics for the damped KdV equation

    u_t + u u_x + u_xxx + a(x) u = 0

on a periodic box standing in for the real line.
"""

from .airy import airy_propagate, verify_linear_estimates
from .energy import (dissipation_residual, fit_decay, hamiltonian_residual,
                     observability_ratio, record)
from .grid import Field, GridSpec, dealias, make_grid, norms, spectral_derivative
from .integrator import (BlowUpError, SolverConfig, TimeSeries, cfl_suggest, evolve,
                         rhs_nonstiff, simulate, step)
from .mild import Trajectory, duhamel, kpv_norms, picard_map, picard_solve, t_kappa
from .profiles import (damping_from_samples, gaussian, initial_data, make_damping, random_h1,
                       soliton, zero_damping)
from .well import (construct_supercritical, estimate_k0, f_eval, solve_xi2,
                   vitillaro_experiment)

__all__ = [
    "airy_propagate", "verify_linear_estimates",
    "dissipation_residual", "fit_decay", "hamiltonian_residual", "observability_ratio", "record",
    "Field", "GridSpec", "dealias", "make_grid", "norms", "spectral_derivative",
    "BlowUpError", "SolverConfig", "TimeSeries", "cfl_suggest", "evolve", "rhs_nonstiff",
    "simulate", "step",
    "Trajectory", "duhamel", "kpv_norms", "picard_map", "picard_solve", "t_kappa",
    "damping_from_samples", "gaussian", "initial_data", "make_damping", "random_h1", "soliton",
    "zero_damping",
    "construct_supercritical", "estimate_k0", "f_eval", "solve_xi2", "vitillaro_experiment",
]

__version__ = "0.1.0"
