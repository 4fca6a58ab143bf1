"""Experiment engine: sweeps, landscapes, plot-ready tables and persistence."""

from .emit import VOLATILE_COLUMNS, Format, emit, load, sidecar_path
from .grid import SweepGrid, Task, default_thetas
from .runner import (ChainSummary, Quantity, clear_cache, decay_slope, run_complex_plane,
                     run_landscape, run_localization_length, run_tasks, run_theta_sweep,
                     scaling_fit, summarize)

__all__ = [
    "ChainSummary", "Format", "Quantity", "SweepGrid", "Task", "VOLATILE_COLUMNS",
    "clear_cache", "decay_slope", "default_thetas", "emit", "load", "run_complex_plane",
    "run_landscape", "run_localization_length", "run_tasks", "run_theta_sweep",
    "scaling_fit", "sidecar_path", "summarize",
]
