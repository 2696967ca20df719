import json

import numpy as np
import pytest

from smc_arm_lab import plots, traces
from smc_arm_lab.config import ConfigError, example_config, load_config, parse_config
from smc_arm_lab.controllers import make_laws
from smc_arm_lab.sim import SimConfig, run


@pytest.fixture(scope="module")
def small_run():
    return run(SimConfig(controllers=make_laws("ftsmc", "tanh"), t_end=0.2))


class TestTrace:
    def test_header_and_line_endings(self, small_run, tmp_path):
        path = traces.write_trace(small_run, tmp_path / "trace.csv")
        raw = path.read_bytes()
        assert raw.startswith(b"t,th1,th2,th3,th1d,th2d,th3d,e1,e2,e3,S1,S2,S3,u1,u2,u3\n")
        assert b"\r" not in raw
        assert raw.count(b"\n") == len(small_run) + 1

    def test_exact_round_trip(self, small_run, tmp_path):
        path = traces.write_trace(small_run, tmp_path / "trace.csv")
        cols = traces.read_trace(path)
        np.testing.assert_array_equal(cols["t"], small_run.t)
        for j in range(3):
            np.testing.assert_array_equal(cols[f"th{j + 1}"], small_run.theta[:, j])
            np.testing.assert_array_equal(cols[f"th{j + 1}d"], small_run.theta_d[:, j])
            np.testing.assert_array_equal(cols[f"e{j + 1}"], small_run.e[:, j])
            np.testing.assert_array_equal(cols[f"S{j + 1}"], small_run.s[:, j])
            np.testing.assert_array_equal(cols[f"u{j + 1}"], small_run.u[:, j])

    def test_bad_header(self, tmp_path):
        path = tmp_path / "x.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError, match="header"):
            traces.read_trace(path)


class TestConfig:
    def test_example_round_trips(self):
        scenario = parse_config(example_config())
        assert [c.family for c in scenario.controllers] == ["pdsmc", "tsmc", "ftsmc"]
        assert scenario.base == SimConfig(controllers=None)

    @pytest.mark.parametrize("doc,key", [
        ({"bogus": 1}, "bogus"),
        ({"arm": {"m1": 1.0, "mass": 2.0}}, "mass"),
        ({"controller": [{"family": "ftsmc", "gain": 3}]}, "gain"),
        ({"sim": {"dt": 1e-3, "solver": "rk4"}}, "solver"),
        ({"noise": {"sigma": 1e-3, "std": 1}}, "std"),
    ])
    def test_unknown_keys(self, doc, key):
        with pytest.raises(ConfigError, match=key):
            parse_config(doc)

    @pytest.mark.parametrize("doc", [
        {"arm": {"m1": -1.0}},
        {"sim": {"dt": 0}},
        {"sim": {"dt": "fast"}},
        {"controller": [{"family": "ftsmc", "p": 4}]},
        {"controller": [{"family": "ftsmc", "k": [1, 2]}]},
        {"controller": []},
        {"controller": [{"family": "ftsmc"}, {"family": "ftsmc"}]},
        {"noise": {"sigma": -1}},
        {"output": {"plots": "yes"}},
        [],
    ])
    def test_invalid_values(self, doc):
        with pytest.raises(ConfigError):
            parse_config(doc)

    def test_load_errors(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "missing.json")
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        with pytest.raises(ConfigError, match="invalid JSON"):
            load_config(bad)

    def test_noise_and_gains(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"controller": [{"name": "fast", "family": "ftsmc", "switching": "tanh",
                                                    "k": 2.0, "slope": 50}],
                                    "noise": {"sigma": 2e-3, "seed": 11}}))
        scenario = load_config(path)
        cfg = scenario.config_for(scenario.controllers[0])
        assert cfg.noise.sigma == 2e-3 and cfg.noise.seed == 11
        assert all(law.switching.k == 2.0 and law.switching.kind == "tanh" for law in cfg.controllers)


def test_svg_chart_is_well_formed(small_run, tmp_path):
    import xml.etree.ElementTree as ET

    paths = plots.comparison_figures({"ftsmc": small_run}, tmp_path)
    assert len(paths) == 5
    for p in paths:
        root = ET.parse(p).getroot()
        assert root.tag.endswith("svg")


def test_envelope_keeps_extremes():
    x = np.arange(100_000.0)
    y = np.sin(x)
    y[12345] = 50.0
    xs, ys = plots._envelope(x, y)
    assert len(xs) <= 2 * plots.MAX_BUCKETS and ys.max() == 50.0
