"""Comparison metrics computed from a :class:`~smc_arm_lab.sim.SimRecord`."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

REACH_TOL = 0.01


@dataclass(frozen=True)
class RunMetrics:
    mse: tuple[float, float, float]
    mse_pooled: float
    reach_time: tuple[Optional[float], Optional[float], Optional[float]]
    sse: tuple[float, float, float]
    chatter: tuple[float, float, float]

    def to_dict(self) -> dict:
        return {
            "mse": list(self.mse),
            "mse_pooled": self.mse_pooled,
            "reach_time": list(self.reach_time),
            "sse": list(self.sse),
            "chatter": list(self.chatter),
        }


def mse(e: np.ndarray) -> tuple[np.ndarray, float]:
    """Per-joint mean of ``e**2`` over all samples, and its mean over joints."""
    e = np.asarray(e, dtype=float)
    if e.size == 0:
        raise ValueError("empty error trace")
    per_joint = np.mean(e**2, axis=0)
    return per_joint, float(np.mean(per_joint))


def reach_time(t: np.ndarray, s: np.ndarray, tol: float = REACH_TOL) -> list[Optional[float]]:
    """First time after which ``|S| <= tol`` holds for every later sample.

    ``None`` marks a joint whose final sample is still outside the band.
    """
    if not tol > 0:
        raise ValueError("tol must be > 0")
    s = np.atleast_2d(np.asarray(s, dtype=float).T).T
    out: list[Optional[float]] = []
    for j in range(s.shape[1]):
        outside = np.flatnonzero(np.abs(s[:, j]) > tol)
        if outside.size == 0:
            out.append(float(t[0]))
        elif outside[-1] == len(t) - 1:
            out.append(None)
        else:
            out.append(float(t[outside[-1] + 1]))
    return out


def steady_state_error(e: np.ndarray, window: float = 0.1) -> np.ndarray:
    """Mean signed error over the trailing ``window`` fraction of samples."""
    e = np.asarray(e, dtype=float)
    count = int(np.ceil(window * len(e)))
    if count < 1 or not 0 < window <= 1:
        raise ValueError("steady-state window is empty")
    return np.mean(e[-count:], axis=0)


def chattering_index(u: np.ndarray) -> np.ndarray:
    """Total variation ``sum |u[k+1] - u[k]|`` per joint."""
    u = np.asarray(u, dtype=float)
    if len(u) < 2:
        raise ValueError("need at least two samples")
    return np.sum(np.abs(np.diff(u, axis=0)), axis=0)


def reaching_violations(s: np.ndarray, tol: float = REACH_TOL) -> np.ndarray:
    """Count samples with ``S * S' >= 0`` while ``|S| > tol``, per joint.

    ``S'`` is the forward difference, which is the direction the held control
    actually pushed the surface over that step.
    """
    s = np.asarray(s, dtype=float)
    ds = np.diff(s, axis=0)
    bad = (s[:-1] * ds >= 0) & (np.abs(s[:-1]) > tol)
    return np.sum(bad, axis=0)


def lyapunov_increases(s: np.ndarray, tol: float = REACH_TOL) -> np.ndarray:
    """Count steps where ``V = S^2 / 2`` grows while ``|S| > tol``."""
    s = np.asarray(s, dtype=float)
    v = 0.5 * s**2
    grew = (np.diff(v, axis=0) > 0) & (np.abs(s[:-1]) > tol)
    return np.sum(grew, axis=0)


def compute(rec, reach_tol: float = REACH_TOL, window: float = 0.1) -> RunMetrics:
    per_joint, pooled = mse(rec.e)
    return RunMetrics(
        mse=tuple(float(x) for x in per_joint),
        mse_pooled=pooled,
        reach_time=tuple(reach_time(rec.t, rec.s, reach_tol)),
        sse=tuple(float(x) for x in steady_state_error(rec.e, window)),
        chatter=tuple(float(x) for x in chattering_index(rec.u)),
    )
