"""Exit checks shared by ``paper-suite`` and the test suite.

Each check returns a :class:`CriterionResult`; the simulation-based ones take
already computed records so a suite run does not simulate twice.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Mapping

import numpy as np

from . import arm, metrics
from .controllers import settling_time_ftsmc, settling_time_tsmc
from .sim import SimConfig, SimRecord, run
from .trajectory import ReferenceSpec

SETTLING_REL_TOL = 0.01
MSE_MARGIN = 0.15
FINAL_ERROR_TOL = 1e-3
CHATTER_RATIO = 0.1
NOISY_SSE_TOL = 5e-3


@dataclass(frozen=True)
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str

    @property
    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number}. {self.title}: {self.detail}"

    def to_dict(self) -> dict:
        return {"number": self.number, "title": self.title, "passed": self.passed, "detail": self.detail}


# -- brute-force oracles ---------------------------------------------------

def _sig(x: np.ndarray, gamma: float) -> np.ndarray:
    return np.sign(x) * np.abs(x) ** gamma


def integrate_to_zero(rate: Callable[[np.ndarray], np.ndarray], e0: np.ndarray,
                      h: float = 1e-4, t_max: float = 60.0, floor: float = 1e-9) -> np.ndarray:
    """Fixed-step RK4 on ``e' = rate(e)`` for a batch of starts.

    Returns the first time each component reaches ``|e| < floor`` or crosses
    zero (crossings are located by linear interpolation inside the step).
    """
    e = np.array(e0, dtype=float)
    hit = np.full(e.shape, np.nan)
    active = np.abs(e) >= floor
    hit[~active] = 0.0
    t = 0.0
    while active.any() and t < t_max:
        k1 = rate(e)
        k2 = rate(e + 0.5 * h * k1)
        k3 = rate(e + 0.5 * h * k2)
        k4 = rate(e + h * k3)
        new = e + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        crossed = active & ((np.sign(new) != np.sign(e)) | (np.abs(new) < floor))
        if crossed.any():
            with np.errstate(divide="ignore", invalid="ignore"):
                frac = np.where(np.sign(new) != np.sign(e), e / (e - new), 1.0)
            hit[crossed] = t + h * frac[crossed]
            active &= ~crossed
        e = np.where(active, new, 0.0)
        t += h
    return hit


def jacobian_mass_matrix(theta, p: arm.ArmParams) -> np.ndarray:
    """``sum_i m_i J_i^T J_i`` from point-mass Jacobians; accepts complex angles."""
    phi = np.cumsum(theta)
    lengths = p.lengths
    m = np.zeros((3, 3), dtype=np.result_type(phi, float))
    for i, mass in enumerate(p.masses):
        jac = np.zeros((2, 3), dtype=m.dtype)
        for j in range(i + 1):
            jac[0, j] = -np.sum(lengths[j:i + 1] * np.sin(phi[j:i + 1]))
            jac[1, j] = np.sum(lengths[j:i + 1] * np.cos(phi[j:i + 1]))
        m += mass * jac.T @ jac
    return m


def _complex_step(theta, direction, p: arm.ArmParams, h: float = 1e-30) -> np.ndarray:
    z = np.asarray(theta, dtype=complex) + 1j * h * np.asarray(direction, dtype=float)
    return jacobian_mass_matrix(z, p).imag / h


def mass_matrix_rate(theta, theta_dot, p: arm.ArmParams) -> np.ndarray:
    """``dM/dt`` along ``theta_dot`` by complex-step differentiation."""
    return _complex_step(theta, theta_dot, p)


def christoffel_matrix(theta, theta_dot, p: arm.ArmParams) -> np.ndarray:
    """Coriolis matrix built from Christoffel symbols of ``dM/dtheta``."""
    dm = [_complex_step(theta, e, p) for e in np.eye(3)]
    c = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            c[i, j] = sum(0.5 * (dm[k][i, j] + dm[j][i, k] - dm[i][j, k]) * theta_dot[k]
                          for k in range(3))
    return c


# -- criteria --------------------------------------------------------------

def settling_time_fidelity(seed: int = 2024, draws: int = 20) -> CriterionResult:
    rng = np.random.default_rng(seed)
    alpha = rng.uniform(0.5, 5.0, draws)
    beta = rng.uniform(0.5, 5.0, draws)
    e0 = rng.uniform(0.1, 2.0, draws)
    p, q = 5, 3
    gamma = q / p
    start = time.perf_counter()
    sim_ft = integrate_to_zero(lambda e: -alpha * e - beta * _sig(e, gamma), e0)
    sim_t = integrate_to_zero(lambda e: -beta * _sig(e, gamma), e0)
    pred_ft = np.array([settling_time_ftsmc(a, b, p, q, x) for a, b, x in zip(alpha, beta, e0)])
    pred_t = np.array([settling_time_tsmc(b, p, q, x) for b, x in zip(beta, e0)])
    elapsed = time.perf_counter() - start
    rel_ft = np.max(np.abs(pred_ft - sim_ft) / sim_ft)
    rel_t = np.max(np.abs(pred_t - sim_t) / sim_t)
    ok = bool(rel_ft < SETTLING_REL_TOL and rel_t < SETTLING_REL_TOL and elapsed < 5.0)
    return CriterionResult(
        1, "settling-time formulas vs brute-force integration", ok,
        f"max rel err fast-terminal {rel_ft:.2e}, terminal {rel_t:.2e} (tol 1e-2) over {draws} draws")


def dynamics_validity(seed: int = 2024, configs: int = 1000) -> CriterionResult:
    rng = np.random.default_rng(seed)
    p = arm.ArmParams()
    sym_err = 0.0
    min_eig = np.inf
    skew = 0.0
    grav_err = 0.0
    split_err = 0.0
    for n in range(configs):
        theta = rng.uniform(-np.pi, np.pi, 3)
        m = arm.mass_matrix(theta, p)
        sym_err = max(sym_err, float(np.max(np.abs(m - m.T))))
        min_eig = min(min_eig, float(np.linalg.eigvalsh(m).min()))
        if n < 100:
            qd = rng.uniform(-2.0, 2.0, 3)
            m_dot = mass_matrix_rate(theta, qd, p)
            c = christoffel_matrix(theta, qd, p)
            skew = max(skew, abs(float(qd @ (m_dot - 2 * c) @ qd)))
            split_err = max(split_err, float(np.max(np.abs(
                arm.velocity_product_terms(theta, qd, p).total - c @ qd))))
            grad = np.array([
                (arm.potential_energy(theta + dv, p) - arm.potential_energy(theta - dv, p)) / 2e-6
                for dv in np.eye(3) * 1e-6])
            grav_err = max(grav_err, float(np.max(np.abs(grad - arm.gravity_vector(theta, p)))))

    drift = free_swing_drift()
    ok = (sym_err < 1e-12 and min_eig > 0 and skew < 1e-8 and split_err < 1e-10
          and grav_err < 1e-6 and drift < 1e-6)
    return CriterionResult(
        2, "dynamics validity", bool(ok),
        f"asym {sym_err:.1e}, min eig {min_eig:.3e}, skew {skew:.1e}, "
        f"B+D vs Christoffel {split_err:.1e}, gravity vs grad {grav_err:.1e}, "
        f"energy drift {drift:.1e}")


def free_swing_drift(theta_dot0=(1.0, -0.5, 0.8), g: float = 0.0) -> float:
    """Relative energy drift of a torque-free 4.5 s RK4 run at dt = 5e-4."""
    p = replace(arm.ArmParams(), g=g)
    ref = ReferenceSpec(theta_dot0=tuple(theta_dot0))
    rec = run(SimConfig(controllers=None, arm=p, reference=ref))
    energy = np.array([arm.total_energy(th, qd, p) for th, qd in zip(rec.theta, rec.theta_dot)])
    return float(np.max(np.abs(energy - energy[0])) / abs(energy[0]))


def _pooled(records: Mapping[str, SimRecord]) -> dict[str, float]:
    return {name: metrics.mse(rec.e)[1] for name, rec in records.items()}


def mse_ordering(records: Mapping[str, SimRecord]) -> CriterionResult:
    """``records`` maps pdsmc/tsmc/ftsmc to noise-free sign-switching runs."""
    m = _pooled(records)
    margin = (m["tsmc"] - m["ftsmc"]) / m["tsmc"]
    ok = m["ftsmc"] < m["tsmc"] < m["pdsmc"] and margin >= MSE_MARGIN
    return CriterionResult(
        3, "pooled MSE ordering FTSMC < TSMC < PDSMC", bool(ok),
        f"ftsmc {m['ftsmc']:.4f}, tsmc {m['tsmc']:.4f}, pdsmc {m['pdsmc']:.4f}; "
        f"ftsmc below tsmc by {100 * margin:.1f}% (need >= 15%)")


def _reach_key(value):
    return np.inf if value is None else value


def finite_time_tracking(studies: Mapping[str, Mapping[str, SimRecord]]) -> CriterionResult:
    """``studies`` maps a switching label to its pdsmc/tsmc/ftsmc records."""
    final_ok = True
    reach_ok = True
    notes = []
    for label, records in studies.items():
        final = np.abs(records["ftsmc"].e[-1])
        final_ok &= bool(np.all(final < FINAL_ERROR_TOL))
        reach = {name: metrics.reach_time(r.t, r.s) for name, r in records.items()}
        for j in range(3):
            ft = _reach_key(reach["ftsmc"][j])
            others = [_reach_key(reach[o][j]) for o in ("tsmc", "pdsmc")]
            reach_ok &= all(ft < o for o in others)
        fmt = lambda xs: "/".join("-" if x is None else f"{x:.3f}" for x in xs)
        notes.append(f"{label}: max|e(T)| {final.max():.1e}, reach ftsmc {fmt(reach['ftsmc'])} "
                     f"tsmc {fmt(reach['tsmc'])} pdsmc {fmt(reach['pdsmc'])}")
    detail = ("final error " + ("ok" if final_ok else "too large") + ", reach-time ordering "
              + ("ok" if reach_ok else "violated") + "; " + "; ".join(notes))
    return CriterionResult(4, "finite-time tracking and earliest reaching", final_ok and reach_ok, detail)


def chattering_reduction(sign_rec: SimRecord, tanh_rec: SimRecord) -> CriterionResult:
    sign_tv = metrics.chattering_index(sign_rec.u)
    tanh_tv = metrics.chattering_index(tanh_rec.u)
    ratio = tanh_tv / sign_tv
    ok = bool(np.all(tanh_tv <= CHATTER_RATIO * sign_tv))
    return CriterionResult(
        5, "tanh switching cuts chattering >= 10x", ok,
        "tanh/sign total variation per joint " + ", ".join(f"{r:.2e}" for r in ratio))


def disturbance_rejection(records: Mapping[str, SimRecord]) -> CriterionResult:
    m = _pooled(records)
    sse = np.abs(metrics.steady_state_error(records["ftsmc"].e))
    ok = m["ftsmc"] < m["tsmc"] < m["pdsmc"] and bool(np.all(sse < NOISY_SSE_TOL))
    return CriterionResult(
        6, "disturbance rejection under measurement noise", bool(ok),
        f"pooled MSE ftsmc {m['ftsmc']:.4f}, tsmc {m['tsmc']:.4f}, pdsmc {m['pdsmc']:.4f}; "
        f"ftsmc |sse| max {sse.max():.1e} (tol 5e-3)")


def reaching_condition(records: Mapping[str, SimRecord]) -> CriterionResult:
    counts = {name: metrics.reaching_violations(r.s) for name, r in records.items()}
    total = int(sum(int(c.sum()) for c in counts.values()))
    return CriterionResult(
        7, "reaching condition S*S' < 0 outside |S| <= 0.01", total == 0,
        ", ".join(f"{n} {c.tolist()}" for n, c in counts.items()) + " violations")


def compare_trees(a, b, patterns=("*.csv", "*.json")) -> list[str]:
    """Relative paths whose bytes differ (or exist on one side only)."""
    a, b = Path(a), Path(b)
    names = set()
    for pat in patterns:
        names |= {p.relative_to(a) for p in a.rglob(pat)}
        names |= {p.relative_to(b) for p in b.rglob(pat)}
    diffs = []
    for rel in sorted(names):
        pa, pb = a / rel, b / rel
        if not (pa.exists() and pb.exists()) or pa.read_bytes() != pb.read_bytes():
            diffs.append(str(rel))
    return diffs


def determinism(first_dir, second_dir) -> CriterionResult:
    diffs = compare_trees(first_dir, second_dir)
    count = sum(1 for _ in Path(first_dir).rglob("*.csv")) + sum(1 for _ in Path(first_dir).rglob("*.json"))
    return CriterionResult(
        8, "byte-identical outputs across runs", not diffs and count > 0,
        f"{count} files compared, {len(diffs)} differ" + (f" (first: {diffs[0]})" if diffs else ""))
