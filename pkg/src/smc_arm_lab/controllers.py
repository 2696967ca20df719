"""Sliding surfaces, control laws and finite-time settling predictors.

Three surfaces are supported, all written in terms of the tracking error
``e = x - x_d`` and its rate:

    PD              S = e' + lam e
    terminal        S = e' + beta sig(e)^(q/p)
    fast terminal   S = e' + alpha e + beta sig(e)^(q/p)

with ``sig(e)^g = sign(e) |e|^g`` and odd integers ``q < p``. The control is
``u = u_eq + u_s`` where ``u_eq`` cancels the drift and the surface rate and
``u_s`` is a sign or tanh switching term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, NamedTuple, Union

# |e| clamp inside the error-rate coefficient; avoids |e|^(q/p - 1) blow-up
SINGULARITY_EPS = 1e-4


def sig_pow(x: float, gamma: float) -> float:
    """Sign-preserving power ``sign(x) * |x|**gamma``."""
    if x == 0.0:
        return 0.0
    return math.copysign(abs(x) ** gamma, x)


def _check_odd_pair(p: int, q: int) -> None:
    if int(p) != p or int(q) != q:
        raise ValueError("p and q must be integers")
    if q <= 0 or p <= 0 or q >= p:
        raise ValueError(f"need 0 < q < p, got p={p}, q={q}")
    if p % 2 == 0 or q % 2 == 0:
        raise ValueError(f"p and q must both be odd, got p={p}, q={q}")


@dataclass(frozen=True)
class PDSurface:
    lam: float = 1.0

    name = "pdsmc"

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lam must be > 0")

    def value(self, e: float, e_dot: float) -> float:
        return e_dot + self.lam * e

    def rate_coefficient(self, e: float) -> float:
        return self.lam


@dataclass(frozen=True)
class TerminalSurface:
    beta: float = 1.0
    p: int = 5
    q: int = 3

    name = "tsmc"

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be > 0")
        _check_odd_pair(self.p, self.q)

    @property
    def gamma(self) -> float:
        return self.q / self.p

    def value(self, e: float, e_dot: float) -> float:
        return e_dot + self.beta * sig_pow(e, self.gamma)

    def rate_coefficient(self, e: float) -> float:
        mag = max(abs(e), SINGULARITY_EPS)
        return self.beta * self.gamma * mag ** (self.gamma - 1.0)


@dataclass(frozen=True)
class FastTerminalSurface:
    alpha: float = 2.0
    beta: float = 1.0
    p: int = 5
    q: int = 3

    name = "ftsmc"

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be > 0")
        if not self.beta > 0:
            raise ValueError("beta must be > 0")
        _check_odd_pair(self.p, self.q)

    @property
    def gamma(self) -> float:
        return self.q / self.p

    def value(self, e: float, e_dot: float) -> float:
        return e_dot + self.alpha * e + self.beta * sig_pow(e, self.gamma)

    def rate_coefficient(self, e: float) -> float:
        mag = max(abs(e), SINGULARITY_EPS)
        return self.alpha + self.beta * self.gamma * mag ** (self.gamma - 1.0)


SurfaceSpec = Union[PDSurface, TerminalSurface, FastTerminalSurface]


@dataclass(frozen=True)
class SwitchingSpec:
    kind: Literal["sign", "tanh"] = "sign"
    k: float = 1.0
    slope: float = 100.0

    def __post_init__(self):
        if self.kind not in ("sign", "tanh"):
            raise ValueError(f"unknown switching kind {self.kind!r}")
        if not self.k > 0:
            raise ValueError("k must be > 0")
        if self.kind == "tanh" and not self.slope > 0:
            raise ValueError("tanh slope must be > 0")


@dataclass(frozen=True)
class ControlLaw:
    """Surface plus switching law for a single joint."""

    surface: SurfaceSpec
    switching: SwitchingSpec


class TrackingError(NamedTuple):
    e: float
    e_dot: float


def surface(spec: SurfaceSpec, err: TrackingError) -> float:
    return spec.value(err.e, err.e_dot)


def equivalent_control(spec: SurfaceSpec, err: TrackingError, f: float, g: float,
                       accel_ref: float) -> float:
    """Input that holds ``S' = 0`` for the scalar plant ``x'' = f + g u``.

    Includes the reference acceleration, since ``e'' = x'' - x_d''``.
    """
    if not g > 0:
        raise ValueError(f"input gain must be > 0, got {g}")
    return (accel_ref - f - err.e_dot * spec.rate_coefficient(err.e)) / g


def switching_control(sw: SwitchingSpec, s: float) -> float:
    if sw.kind == "sign":
        if s == 0.0:
            return 0.0
        return -sw.k if s > 0 else sw.k
    return -sw.k * math.tanh(sw.slope * s)


class ControlOutput(NamedTuple):
    u: float
    u_eq: float
    u_s: float
    s: float


def control_terms(law: ControlLaw, err: TrackingError, f: float, g: float,
                  accel_ref: float) -> ControlOutput:
    s = surface(law.surface, err)
    u_eq = equivalent_control(law.surface, err, f, g, accel_ref)
    u_s = switching_control(law.switching, s)
    return ControlOutput(u_eq + u_s, u_eq, u_s, s)


def control(law: ControlLaw, err: TrackingError, f: float, g: float, accel_ref: float) -> float:
    return control_terms(law, err, f, g, accel_ref).u


def settling_time_tsmc(beta: float, p: int, q: int, e0: float) -> float:
    """Time for ``e' = -beta sig(e)^(q/p)`` to reach zero from ``e0``."""
    _check_odd_pair(p, q)
    return p * abs(e0) ** ((p - q) / p) / (beta * (p - q))


def settling_time_ftsmc(alpha: float, beta: float, p: int, q: int, e0: float) -> float:
    """Time for ``e' = -alpha e - beta sig(e)^(q/p)`` to reach zero from ``e0``."""
    _check_odd_pair(p, q)
    scale = p / (alpha * (p - q))
    return scale * (math.log(alpha * abs(e0) ** ((p - q) / p) + beta) - math.log(beta))


def finite_time_bound(a: float, b: float, gamma1: float, gamma2: float) -> float:
    """Settling-time bound for ``V' <= -a V^gamma1 - b V^gamma2``."""
    if not (a > 0 and b > 0):
        raise ValueError("a and b must be > 0")
    if not gamma1 > 1:
        raise ValueError(f"gamma1 must be > 1, got {gamma1}")
    if not 0 < gamma2 < 1:
        raise ValueError(f"gamma2 must lie in (0, 1), got {gamma2}")
    return 1.0 / (a * (gamma1 - 1.0)) + 1.0 / (b * (1.0 - gamma2))


FAMILIES = ("pdsmc", "tsmc", "ftsmc")

# k_i keeps the one-step sign jump g_i k_i dt below the 0.01 reach band at
# dt = 5e-4 (peak g = diag(M^-1) over the benchmark workspace is 4.0, 9.8, 5.7)
DEFAULT_GAINS = {
    "alpha": 2.0,
    "beta": 1.0,
    "lam": 1.0,
    "p": 5,
    "q": 3,
    "k": (4.0, 1.6, 2.8),
    "slope": 100.0,
}


def make_surface(family: str, alpha=None, beta=None, lam=None, p=None, q=None) -> SurfaceSpec:
    d = DEFAULT_GAINS
    alpha = d["alpha"] if alpha is None else alpha
    beta = d["beta"] if beta is None else beta
    lam = d["lam"] if lam is None else lam
    p = d["p"] if p is None else p
    q = d["q"] if q is None else q
    if family == "pdsmc":
        return PDSurface(lam)
    if family == "tsmc":
        return TerminalSurface(beta, p, q)
    if family == "ftsmc":
        return FastTerminalSurface(alpha, beta, p, q)
    raise ValueError(f"unknown controller family {family!r}; expected one of {FAMILIES}")


def make_laws(family: str, switching: str = "sign", k=None, slope=None,
              **surface_gains) -> tuple[ControlLaw, ControlLaw, ControlLaw]:
    """Build the three per-joint laws for one controller family."""
    k = DEFAULT_GAINS["k"] if k is None else k
    if isinstance(k, (int, float)):
        k = (float(k),) * 3
    if len(k) != 3:
        raise ValueError("k must be a scalar or a 3-sequence")
    slope = DEFAULT_GAINS["slope"] if slope is None else slope
    surf = make_surface(family, **surface_gains)
    return tuple(ControlLaw(surf, SwitchingSpec(switching, float(kj), slope)) for kj in k)
