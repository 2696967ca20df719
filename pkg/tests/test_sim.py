import math

import numpy as np
import pytest

from smc_arm_lab import arm, traces
from smc_arm_lab.controllers import make_laws
from smc_arm_lab.state_space import affine_terms_joint, decoupling_matrix
from smc_arm_lab.sim import (
    THREADS_ENV, NoiseSpec, SimConfig, SimulationDiverged, inject_noise, run, run_many, worker_count,
)
from smc_arm_lab.trajectory import ReferenceSpec


def short(**kwargs):
    kwargs.setdefault("t_end", 0.5)
    return SimConfig(**kwargs)


class TestNoise:
    def test_zero_sigma_is_identity(self):
        theta = np.array([0.1, 0.2, 0.3])
        rng = np.random.default_rng(0)
        np.testing.assert_array_equal(inject_noise(theta, 0.0, rng), theta)

    def test_statistics(self):
        sigma, n = 1e-3, 1_000_000
        rng = np.random.default_rng(7)
        draws = inject_noise(np.zeros(n), sigma, rng)
        assert abs(draws.mean()) < 4 * sigma / math.sqrt(n)
        assert draws.std() == pytest.approx(sigma, rel=0.01)

    def test_plant_state_untouched(self):
        theta = np.array([0.1, 0.2, 0.3])
        inject_noise(theta, 0.5, np.random.default_rng(1))
        np.testing.assert_array_equal(theta, [0.1, 0.2, 0.3])

    @pytest.mark.parametrize("kwargs", [dict(sigma=-1.0), dict(seed=-1), dict(seed=2**64), dict(mode="velocity")])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            NoiseSpec(**kwargs)


class TestConfig:
    @pytest.mark.parametrize("kwargs", [dict(dt=0.0), dict(dt=1.0, t_end=0.5), dict(integrator="rk45"),
                                        dict(coupling="full")])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            SimConfig(**kwargs)

    def test_row_count(self):
        assert len(run(SimConfig(t_end=0.0105, dt=1e-3))) == 11
        assert SimConfig().n_steps + 1 == 9001


class TestRun:
    def test_uniform_timestamps(self):
        rec = run(short(controllers=make_laws("tsmc")))
        np.testing.assert_allclose(np.diff(rec.t), 5e-4, rtol=1e-9)
        assert rec.t[0] == 0.0 and len(rec) == 1001

    def test_free_swing_energy(self):
        p = arm.ArmParams(g=0.0)
        rec = run(SimConfig(arm=p, reference=ReferenceSpec(theta_dot0=(0.8, 0.1, -0.6))))
        energy = [arm.total_energy(a, b, p) for a, b in zip(rec.theta, rec.theta_dot)]
        assert np.ptp(energy) / energy[0] < 1e-6
        np.testing.assert_array_equal(rec.u, 0.0)

    def test_ftsmc_sign_final_error(self, ftsmc_sign_run):
        assert np.all(np.abs(ftsmc_sign_run.e[-1]) < 1e-3)
        assert np.all(np.isfinite(ftsmc_sign_run.u))

    def test_error_column_is_true_state_minus_reference(self, ftsmc_sign_run):
        rec = ftsmc_sign_run
        np.testing.assert_array_equal(rec.e, rec.theta - rec.theta_d)
        np.testing.assert_allclose(rec.theta_d[0], (0.35, 0.75, -0.05))

    def test_zero_order_hold(self):
        # one coarse step from rest: the held torque must match the sampled command
        cfg = SimConfig(controllers=make_laws("ftsmc"), t_end=0.02, dt=0.01)
        rec = run(cfg)
        terms = affine_terms_joint(rec.theta[0], rec.theta_dot[0], cfg.arm)
        np.testing.assert_allclose(rec.torque[0], decoupling_matrix(terms) @ rec.u[0])

    def test_deterministic_with_noise(self):
        cfg = short(controllers=make_laws("ftsmc", "tanh"), noise=NoiseSpec(1e-3, seed=7))
        a, b = run(cfg), run(cfg)
        assert traces.trace_csv(a) == traces.trace_csv(b)
        assert a.metadata == b.metadata and a.metadata["seed"] == 7

    def test_seed_changes_trace(self):
        base = short(controllers=make_laws("ftsmc", "tanh"))
        a = run(base.__class__(**{**base.__dict__, "noise": NoiseSpec(1e-3, seed=1)}))
        b = run(base.__class__(**{**base.__dict__, "noise": NoiseSpec(1e-3, seed=2)}))
        assert not np.array_equal(a.theta, b.theta)

    @pytest.mark.parametrize("mode", ["position", "differentiated", "torque"])
    def test_noise_modes_run(self, mode):
        rec = run(short(controllers=make_laws("ftsmc", "tanh"), noise=NoiseSpec(1e-3, 3, mode)))
        assert np.all(np.isfinite(rec.theta))

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_divergence_reported(self):
        cfg = SimConfig(controllers=make_laws("ftsmc", k=1e150), t_end=0.05)
        with pytest.raises(SimulationDiverged, match="step"):
            run(cfg)

    def test_diagonal_coupling_diagnostic_runs(self):
        rec = run(short(controllers=make_laws("ftsmc"), coupling="diagonal"))
        np.testing.assert_array_equal(rec.torque, rec.u)


@pytest.mark.parametrize("integrator,dt,lo,hi", [("rk4", 0.01, 8, 32), ("euler", 0.002, 1.5, 3)])
def test_integrator_order(integrator, dt, lo, hi):
    ref = ReferenceSpec(theta_dot0=(0.5, -0.3, 0.2))

    def final(step):
        return run(SimConfig(reference=ref, t_end=1.0, dt=step, integrator=integrator)).theta[-1]

    base = final(dt / 8)
    ratio = np.abs(final(dt) - base).max() / np.abs(final(dt / 2) - base).max()
    assert lo <= ratio <= hi


class TestParallel:
    def test_env_cap(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV, "2")
        assert worker_count(8) == 2
        monkeypatch.setenv(THREADS_ENV, "zero")
        with pytest.raises(ValueError):
            worker_count(4)

    def test_order_preserved(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV, "2")
        cfgs = [short(controllers=make_laws(f), t_end=0.05) for f in ("pdsmc", "tsmc", "ftsmc")]
        parallel = run_many(cfgs, workers=2)
        serial = [run(c) for c in cfgs]
        for a, b in zip(parallel, serial):
            np.testing.assert_array_equal(a.u, b.u)
