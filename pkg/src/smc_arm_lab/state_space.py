"""Per-joint control-affine form  x2i' = f_i(x) + g_i(x) u_i.

The state is interleaved as ``[th1, th1', th2, th2', th3, th3']``. The scalar
input gain ``g_i`` is the diagonal entry ``(M^-1)_ii``; the off-diagonal part
of ``M^-1`` is what :func:`decoupling_matrix` removes in closed loop.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .arm import ArmParams, SingularMassMatrixError, bias_torques, check_conditioning


class AffineTerms(NamedTuple):
    f: np.ndarray
    g: np.ndarray
    mass: np.ndarray
    m_inv: np.ndarray


def to_state(theta, theta_dot) -> np.ndarray:
    x = np.empty(6)
    x[0::2] = theta
    x[1::2] = theta_dot
    return x


def from_state(x) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    if x.shape != (6,):
        raise ValueError(f"state must have shape (6,), got {x.shape}")
    return x[0::2].copy(), x[1::2].copy()


def affine_terms_joint(theta, theta_dot, p: ArmParams, check: bool = False) -> AffineTerms:
    m, bias = bias_torques(theta, theta_dot, p)
    if check:
        check_conditioning(m)
    try:
        m_inv = np.linalg.inv(m)
    except np.linalg.LinAlgError as exc:
        raise SingularMassMatrixError(str(exc)) from exc
    return AffineTerms(-m_inv @ bias, np.diag(m_inv).copy(), m, m_inv)


def affine_terms(x, p: ArmParams) -> AffineTerms:
    """Drift ``f = -M^-1 (B[th'th'] + D[th'^2] + G)`` and gains ``g = diag(M^-1)``."""
    theta, theta_dot = from_state(x)
    return affine_terms_joint(theta, theta_dot, p, check=True)


def decoupling_matrix(terms: AffineTerms) -> np.ndarray:
    """Input map T with ``M^-1 T = diag(g)``, i.e. ``T = M diag(g)``.

    Applying ``tau = T u`` makes each joint see exactly ``f_i + g_i u_i``.
    """
    return terms.mass * terms.g[None, :]
