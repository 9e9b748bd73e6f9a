"""Quantum multi-particle Szilard engine with an (N+1)-level memory."""
from .analysis import Grid, SweepSpec, SweepTable, degenerate_points, sweep, w_over_t, zero_temperature_limit_report
from .config import OPTIMIZE, EngineConfig
from .cycle import CycleReport, run_cycle
from .demon import DemonSpec, MapFamily, default_map, inverse_map, validate_map
from .errors import CapabilityError, DomainError, PrecisionError, SzilardError
from .logscalar import LogScalar
from .optimize import clear_caches, optimize_positions, q1_upper_bound, single_particle_closed_form
from .statmech import (
    SpectrumParams,
    Statistics,
    Well,
    canonical_partition,
    entropy,
    free_energy,
    internal_energy,
    right_count_distribution,
)

__all__ = [
    "CapabilityError", "clear_caches", "CycleReport", "DemonSpec", "DomainError", "EngineConfig", "Grid", "LogScalar",
    "MapFamily", "OPTIMIZE", "PrecisionError", "SpectrumParams", "Statistics", "SweepSpec", "SweepTable",
    "SzilardError", "Well", "canonical_partition", "default_map", "degenerate_points", "entropy",
    "free_energy", "internal_energy", "inverse_map", "optimize_positions", "q1_upper_bound",
    "right_count_distribution", "run_cycle", "single_particle_closed_form", "sweep", "validate_map",
    "w_over_t", "zero_temperature_limit_report",
]
