"""Sliding-mode trajectory tracking for a planar 3R arm.

PD-SMC, terminal SMC and fast terminal SMC with sign or tanh switching,
simulated on a point-mass arm and compared on tracking error, reaching time
and chattering.
"""

from .arm import ArmParams, forward_dynamics, gravity_vector, mass_matrix, total_energy, velocity_product_terms
from .controllers import (ControlLaw, FastTerminalSurface, PDSurface, SwitchingSpec, TerminalSurface,
                          TrackingError, make_laws)
from .metrics import RunMetrics
from .sim import NoiseSpec, SimConfig, SimRecord, run
from .trajectory import ReferenceSpec, reference

__version__ = "0.1.0"

__all__ = [
    "ArmParams", "ControlLaw", "FastTerminalSurface", "NoiseSpec", "PDSurface", "ReferenceSpec",
    "RunMetrics", "SimConfig", "SimRecord", "SwitchingSpec", "TerminalSurface", "TrackingError",
    "forward_dynamics", "gravity_vector", "make_laws", "mass_matrix", "reference", "run",
    "total_energy", "velocity_product_terms",
]
