"""Fixed-step closed-loop simulation of the arm under per-joint SMC.

The controller is sampled every ``dt`` and its output is held constant over
the step (zero-order hold) while the plant is integrated with RK4 or
explicit Euler.
"""

from __future__ import annotations

import hashlib
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence

import numpy as np

from .arm import ArmParams, forward_dynamics
from .controllers import ControlLaw, TrackingError, control_terms
from .state_space import affine_terms_joint, decoupling_matrix
from .trajectory import ReferenceSpec, reference

log = logging.getLogger(__name__)

THREADS_ENV = "SMC_ARM_LAB_THREADS"

NOISE_MODES = ("position", "differentiated", "torque")
COUPLING_MODES = ("decoupled", "diagonal")


class SimulationDiverged(RuntimeError):
    def __init__(self, step: int, t: float, what: str):
        super().__init__(f"non-finite {what} at step {step} (t={t:.6g} s)")
        self.step = step
        self.t = t


@dataclass(frozen=True)
class NoiseSpec:
    """Gaussian corruption of the controller's inputs.

    ``position`` adds noise to the measured joint angles; ``differentiated``
    does the same and also feeds the controller a backward-difference velocity
    built from those noisy angles; ``torque`` instead adds a plant-side torque
    disturbance with standard deviation ``sigma`` in N m.
    """

    sigma: float = 1e-3
    seed: int = 0
    mode: Literal["position", "differentiated", "torque"] = "position"

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise ValueError("noise sigma must be finite and >= 0")
        if not (0 <= int(self.seed) < 2**64) or int(self.seed) != self.seed:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.mode not in NOISE_MODES:
            raise ValueError(f"unknown noise mode {self.mode!r}")


@dataclass(frozen=True)
class SimConfig:
    """One closed-loop run.

    ``controllers=None`` runs the arm open loop with zero torque.
    ``coupling='decoupled'`` applies ``tau = M diag(M^-1) u`` so joint ``i``
    sees exactly ``f_i + g_i u_i``; ``'diagonal'`` applies ``tau = u`` and
    leaves the off-diagonal input coupling to the switching term.
    """

    controllers: Optional[tuple[ControlLaw, ControlLaw, ControlLaw]] = None
    arm: ArmParams = field(default_factory=ArmParams)
    reference: ReferenceSpec = field(default_factory=ReferenceSpec)
    t_end: float = 4.5
    dt: float = 5e-4
    integrator: Literal["rk4", "euler"] = "rk4"
    noise: Optional[NoiseSpec] = None
    coupling: Literal["decoupled", "diagonal"] = "decoupled"

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ValueError("dt must be > 0")
        if not (math.isfinite(self.t_end) and self.t_end >= self.dt):
            raise ValueError("t_end must be >= dt")
        if self.integrator not in ("rk4", "euler"):
            raise ValueError(f"unknown integrator {self.integrator!r}")
        if self.coupling not in COUPLING_MODES:
            raise ValueError(f"unknown coupling mode {self.coupling!r}")
        if self.controllers is not None and len(self.controllers) != 3:
            raise ValueError("need one control law per joint")

    @property
    def n_steps(self) -> int:
        return int(math.floor(self.t_end / self.dt + 1e-9))

    def digest(self) -> str:
        return hashlib.sha256(repr(self).encode()).hexdigest()


@dataclass
class SimRecord:
    """Sampled trace of one run; row ``k`` is time ``k * dt``.

    ``u`` is the per-joint control command and ``torque`` the joint torque
    actually applied to the arm.
    """

    t: np.ndarray
    theta: np.ndarray
    theta_dot: np.ndarray
    theta_d: np.ndarray
    e: np.ndarray
    s: np.ndarray
    u: np.ndarray
    u_eq: np.ndarray
    u_s: np.ndarray
    torque: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.t)

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0]) if len(self.t) > 1 else 0.0


def inject_noise(theta, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Return ``theta`` plus i.i.d. N(0, sigma^2) noise; no draw when sigma is 0."""
    theta = np.asarray(theta, dtype=float)
    if sigma == 0:
        return theta.copy()
    return theta + sigma * rng.standard_normal(theta.shape)


def _rk4_step(theta, theta_dot, tau, p, dt):
    k1v, k1a = theta_dot, forward_dynamics(theta, theta_dot, tau, p)
    k2v = theta_dot + 0.5 * dt * k1a
    k2a = forward_dynamics(theta + 0.5 * dt * k1v, k2v, tau, p)
    k3v = theta_dot + 0.5 * dt * k2a
    k3a = forward_dynamics(theta + 0.5 * dt * k2v, k3v, tau, p)
    k4v = theta_dot + dt * k3a
    k4a = forward_dynamics(theta + dt * k3v, k4v, tau, p)
    theta_new = theta + dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
    theta_dot_new = theta_dot + dt / 6.0 * (k1a + 2 * k2a + 2 * k3a + k4a)
    return theta_new, theta_dot_new


def _euler_step(theta, theta_dot, tau, p, dt):
    acc = forward_dynamics(theta, theta_dot, tau, p)
    return theta + dt * theta_dot, theta_dot + dt * acc


def run(config: SimConfig) -> SimRecord:
    """Simulate ``config`` and return the full trace.

    Raises :class:`SimulationDiverged` as soon as any state or control value
    becomes non-finite.
    """
    p = config.arm
    dt = config.dt
    n = config.n_steps
    rows = n + 1
    step = _rk4_step if config.integrator == "rk4" else _euler_step
    noise = config.noise
    rng = np.random.default_rng(noise.seed) if noise is not None else None

    out = {name: np.zeros((rows, 3)) for name in
           ("theta", "theta_dot", "theta_d", "e", "s", "u", "u_eq", "u_s", "torque")}
    t_arr = np.arange(rows) * dt

    theta = np.asarray(config.reference.theta0, dtype=float)
    theta_dot = np.asarray(config.reference.theta_dot0, dtype=float)
    prev_measured = None
    laws = config.controllers

    for k in range(rows):
        t = t_arr[k]
        pos_d, vel_d, acc_d = reference(t, config.reference)

        measured_pos, measured_vel = theta, theta_dot
        torque_noise = None
        if noise is not None and noise.sigma > 0:
            if noise.mode == "torque":
                torque_noise = noise.sigma * rng.standard_normal(3)
            else:
                measured_pos = inject_noise(theta, noise.sigma, rng)
                if noise.mode == "differentiated" and prev_measured is not None:
                    measured_vel = (measured_pos - prev_measured) / dt
                prev_measured = measured_pos

        u = np.zeros(3)
        u_eq = np.zeros(3)
        u_s = np.zeros(3)
        s = np.zeros(3)
        if laws is None:
            tau = np.zeros(3)
        else:
            terms = affine_terms_joint(measured_pos, measured_vel, p)
            for i, law in enumerate(laws):
                err = TrackingError(measured_pos[i] - pos_d[i], measured_vel[i] - vel_d[i])
                u[i], u_eq[i], u_s[i], s[i] = control_terms(law, err, terms.f[i], terms.g[i], acc_d[i])
            if config.coupling == "decoupled":
                tau = decoupling_matrix(terms) @ u
            else:
                tau = u.copy()
        if torque_noise is not None:
            tau = tau + torque_noise

        out["theta"][k] = theta
        out["theta_dot"][k] = theta_dot
        out["theta_d"][k] = pos_d
        out["e"][k] = theta - pos_d
        out["s"][k] = s
        out["u"][k] = u
        out["u_eq"][k] = u_eq
        out["u_s"][k] = u_s
        out["torque"][k] = tau

        if not (np.all(np.isfinite(tau)) and np.all(np.isfinite(u))):
            raise SimulationDiverged(k, t, "control")
        if k == n:
            break
        theta, theta_dot = step(theta, theta_dot, tau, p, dt)
        if not (np.all(np.isfinite(theta)) and np.all(np.isfinite(theta_dot))):
            raise SimulationDiverged(k + 1, t + dt, "state")

    metadata = {
        "config_hash": config.digest(),
        "seed": None if noise is None else int(noise.seed),
    }
    return SimRecord(t=t_arr, metadata=metadata, **out)


def worker_count(requested: Optional[int] = None) -> int:
    """Worker processes for a batch, capped by ``SMC_ARM_LAB_THREADS``."""
    count = requested if requested is not None else (os.cpu_count() or 1)
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            cap = int(raw)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
        if cap < 1:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
        count = min(count, cap)
    return max(count, 1)


def run_many(configs: Sequence[SimConfig], workers: Optional[int] = None) -> list[SimRecord]:
    """Run independent configs, returning records in input order."""
    workers = min(worker_count(workers), max(len(configs), 1))
    if workers <= 1:
        return [run(c) for c in configs]
    log.debug("running %d simulations on %d workers", len(configs), workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, configs))
