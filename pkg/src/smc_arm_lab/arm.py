"""Planar 3R arm dynamics.

Each link is modelled as a point mass sitting at its distal end, so the
only physical parameters are the three masses, the three link lengths and
gravity. Angles follow the usual planar convention: ``theta[0]`` is measured
counterclockwise from the horizontal x-axis, ``theta[1]`` and ``theta[2]``
are relative to the previous link, and gravity acts along -y.

With absolute link angles ``phi_a = theta_1 + ... + theta_a`` and tail masses
``mu_a = m_a + ... + m_3`` the Euler-Lagrange equations collapse to

    M = U (L * cos(phi_a - phi_b)) U^T
    h = U (L * sin(phi_a - phi_b)) phi_dot**2
    G = g U (l * mu * cos(phi))

where ``L[a, b] = l_a l_b mu_max(a, b)`` and ``U`` is the upper-triangular
matrix of ones. ``h`` is the full velocity-product vector; it is split into
the cross-product and squared-velocity parts by expanding ``phi_dot**2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

_UPPER = np.triu(np.ones((3, 3)))

# pairs (j, k) of the cross-product vector [th1'th2', th1'th3', th2'th3']
CROSS_PAIRS = ((0, 1), (0, 2), (1, 2))

SINGULAR_COND = 1e12


class SingularMassMatrixError(np.linalg.LinAlgError):
    """Raised when the mass matrix is numerically singular."""


@dataclass(frozen=True)
class ArmParams:
    """Physical parameters of the arm (defaults: unit masses, links 0.5, 1, 1 m)."""

    m1: float = 1.0
    m2: float = 1.0
    m3: float = 1.0
    l1: float = 0.5
    l2: float = 1.0
    l3: float = 1.0
    g: float = 9.81

    def __post_init__(self):
        for name in ("m1", "m2", "m3", "l1", "l2", "l3"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")
        if not np.isfinite(self.g) or self.g < 0:
            raise ValueError(f"g must be finite and >= 0, got {self.g!r}")

    @property
    def masses(self) -> np.ndarray:
        return np.array([self.m1, self.m2, self.m3])

    @property
    def lengths(self) -> np.ndarray:
        return np.array([self.l1, self.l2, self.l3])

    def scaled(self, mass_factor: float) -> "ArmParams":
        return ArmParams(
            self.m1 * mass_factor, self.m2 * mass_factor, self.m3 * mass_factor,
            self.l1, self.l2, self.l3, self.g,
        )


class VelocityProductTerms(NamedTuple):
    """Velocity-dependent torques, split as B(theta)[th'th'] and D(theta)[th'^2]."""

    coriolis_cross: np.ndarray
    centrifugal_sq: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.coriolis_cross + self.centrifugal_sq


def _as_joint(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {arr.shape}")
    return arr


@lru_cache(maxsize=64)
def _constants(p: ArmParams) -> tuple[np.ndarray, np.ndarray]:
    lengths = p.lengths
    tail = np.cumsum(p.masses[::-1])[::-1]
    idx = np.arange(3)
    lever = np.outer(lengths, lengths) * tail[np.maximum.outer(idx, idx)]
    return lever, p.g * lengths * tail


class _Geometry:
    """Per-configuration quantities shared by M, B, D and G."""

    __slots__ = ("phi", "cos_phi", "lever", "cos_diff", "sin_diff", "weight")

    def __init__(self, theta: np.ndarray, p: ArmParams):
        self.lever, self.weight = _constants(p)
        self.phi = np.cumsum(theta)
        self.cos_phi = np.cos(self.phi)
        diff = self.phi[:, None] - self.phi[None, :]
        self.cos_diff = np.cos(diff)
        self.sin_diff = np.sin(diff)


def _mass(geo: _Geometry) -> np.ndarray:
    return _UPPER @ (geo.lever * geo.cos_diff) @ _UPPER.T


def _velocity_weights(geo: _Geometry) -> np.ndarray:
    # h = W @ phi_dot**2
    return _UPPER @ (geo.lever * geo.sin_diff)


def _gravity(geo: _Geometry) -> np.ndarray:
    return _UPPER @ (geo.weight * geo.cos_phi)


def mass_matrix(theta, p: ArmParams) -> np.ndarray:
    """Joint-space inertia matrix M(theta), symmetric positive definite."""
    geo = _Geometry(_as_joint(theta), p)
    m = _mass(geo)
    return 0.5 * (m + m.T)


def velocity_product_terms(theta, theta_dot, p: ArmParams) -> VelocityProductTerms:
    """Split velocity torques into cross products and squared velocities.

    ``coriolis_cross = B(theta) @ [th1'th2', th1'th3', th2'th3']`` and
    ``centrifugal_sq = D(theta) @ [th1'^2, th2'^2, th3'^2]``.
    """
    theta_dot = _as_joint(theta_dot)
    b, d = velocity_coefficient_matrices(theta, p)
    cross = np.array([theta_dot[j] * theta_dot[k] for j, k in CROSS_PAIRS])
    return VelocityProductTerms(b @ cross, d @ theta_dot**2)


def velocity_coefficient_matrices(theta, p: ArmParams) -> tuple[np.ndarray, np.ndarray]:
    """Return the Coriolis matrix B(theta) and centrifugal matrix D(theta)."""
    w = _velocity_weights(_Geometry(_as_joint(theta), p))
    # phi_dot_k^2 = sum_{j<=k} th_j'^2 + 2 sum_{j<j'<=k} th_j' th_j''
    tail_w = np.cumsum(w[:, ::-1], axis=1)[:, ::-1]
    d = tail_w
    b = 2.0 * np.column_stack([tail_w[:, k] for _, k in CROSS_PAIRS])
    return b, d


def gravity_vector(theta, p: ArmParams) -> np.ndarray:
    """Gravity torques G(theta), the gradient of the potential energy."""
    geo = _Geometry(_as_joint(theta), p)
    return _gravity(geo)


def bias_torques(theta, theta_dot, p: ArmParams) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(M, B[th'th'] + D[th'^2] + G)`` from one geometry evaluation."""
    geo = _Geometry(_as_joint(theta), p)
    phi_dot = np.cumsum(_as_joint(theta_dot))
    m = _mass(geo)
    bias = _velocity_weights(geo) @ phi_dot**2 + _gravity(geo)
    return 0.5 * (m + m.T), bias


def check_conditioning(m: np.ndarray) -> None:
    cond = np.linalg.cond(m)
    if not np.isfinite(cond) or cond > SINGULAR_COND:
        raise SingularMassMatrixError(f"mass matrix condition number {cond:.3e}")


def forward_dynamics(theta, theta_dot, tau, p: ArmParams) -> np.ndarray:
    """Solve ``M theta'' = tau - B[th'th'] - D[th'^2] - G`` for theta''."""
    m, bias = bias_torques(theta, theta_dot, p)
    try:
        return np.linalg.solve(m, _as_joint(tau) - bias)
    except np.linalg.LinAlgError as exc:
        raise SingularMassMatrixError(str(exc)) from exc


def link_positions(theta, p: ArmParams) -> np.ndarray:
    """Cartesian positions of the three point masses, shape (3, 2)."""
    phi = np.cumsum(_as_joint(theta))
    steps = p.lengths[:, None] * np.column_stack([np.cos(phi), np.sin(phi)])
    return np.cumsum(steps, axis=0)


def potential_energy(theta, p: ArmParams) -> float:
    return float(p.g * p.masses @ link_positions(theta, p)[:, 1])


def kinetic_energy(theta, theta_dot, p: ArmParams) -> float:
    qd = _as_joint(theta_dot)
    return float(0.5 * qd @ mass_matrix(theta, p) @ qd)


def total_energy(theta, theta_dot, p: ArmParams) -> float:
    """Mechanical energy; potential is zero with every mass on the x-axis."""
    return kinetic_energy(theta, theta_dot, p) + potential_energy(theta, p)
