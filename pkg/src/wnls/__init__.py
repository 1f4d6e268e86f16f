"""Split-step simulator for the 1D quintic Schrodinger equation with white-noise dispersion."""

__version__ = "0.1.0"

from .grid import SpatialGrid, StateField, make_grid, transform
from .noise import DispersionPath, StationaryDriverParams, integrated_dispersion, sample_brownian
from .propagator import PropagatorConvention, apply_linear, kernel_apply
from .integrator import EvolveConfig, Trajectory, evolve, evolve_batch, strang_step
from .observables import smoothing_functional, smoothing_bound, stopping_statistics
from .montecarlo import ks_distance, moment, run_ensemble

__all__ = [
    "SpatialGrid", "StateField", "make_grid", "transform",
    "DispersionPath", "StationaryDriverParams", "integrated_dispersion", "sample_brownian",
    "PropagatorConvention", "apply_linear", "kernel_apply",
    "EvolveConfig", "Trajectory", "evolve", "evolve_batch", "strang_step",
    "smoothing_functional", "smoothing_bound", "stopping_statistics",
    "ks_distance", "moment", "run_ensemble",
]
