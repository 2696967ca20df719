"""Desired joint trajectories and initial conditions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SinusoidOffset:
    """``offset + sin_amp * sin(omega t) + cos_amp * cos(omega t)``."""

    offset: float
    sin_amp: float = 0.0
    cos_amp: float = 0.0
    omega: float = 1.0

    def evaluate(self, t: float) -> tuple[float, float, float]:
        w = self.omega
        s, c = math.sin(w * t), math.cos(w * t)
        pos = self.offset + self.sin_amp * s + self.cos_amp * c
        vel = w * (self.sin_amp * c - self.cos_amp * s)
        acc = -w * w * (self.sin_amp * s + self.cos_amp * c)
        return pos, vel, acc


DEFAULT_REFERENCE = (
    SinusoidOffset(0.35, sin_amp=-0.5),
    SinusoidOffset(0.25, cos_amp=0.5),
    SinusoidOffset(0.45, cos_amp=-0.5),
)
DEFAULT_INITIAL = (0.7, 1.5, 0.5)


@dataclass(frozen=True)
class ReferenceSpec:
    joints: tuple[SinusoidOffset, SinusoidOffset, SinusoidOffset] = DEFAULT_REFERENCE
    theta0: tuple[float, float, float] = DEFAULT_INITIAL
    # the arm starts at rest
    theta_dot0: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if len(self.joints) != 3:
            raise ValueError("reference needs exactly three joints")
        for name in ("theta0", "theta_dot0"):
            vals = getattr(self, name)
            if len(vals) != 3 or not all(math.isfinite(v) for v in vals):
                raise ValueError(f"{name} must be three finite numbers")


def reference(t: float, spec: ReferenceSpec = ReferenceSpec()) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Desired position, velocity and acceleration at time ``t``."""
    if t < 0:
        raise ValueError("t must be >= 0")
    rows = [j.evaluate(t) for j in spec.joints]
    pos, vel, acc = (np.array(col) for col in zip(*rows))
    return pos, vel, acc


def initial_error(spec: ReferenceSpec = ReferenceSpec()) -> np.ndarray:
    pos, _, _ = reference(0.0, spec)
    return np.asarray(spec.theta0, dtype=float) - pos
