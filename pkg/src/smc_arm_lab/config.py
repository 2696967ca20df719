"""Strict JSON scenario configs.

A config is one JSON object with the sections ``arm``, ``reference``,
``controller`` (a list), ``sim``, ``noise`` and ``output``; every section is
optional and falls back to the benchmark setup with the default gains::

    {
      "name": "benchmark",
      "arm": {"m1": 1.0, "m2": 1.0, "m3": 1.0, "l1": 0.5, "l2": 1.0, "l3": 1.0, "g": 9.81},
      "reference": {
        "joints": [{"offset": 0.35, "sin_amp": -0.5, "cos_amp": 0.0, "omega": 1.0}, ...],
        "theta0": [0.7, 1.5, 0.5],
        "theta_dot0": [0.0, 0.0, 0.0]
      },
      "controller": [
        {"name": "ftsmc", "family": "ftsmc", "switching": "sign",
         "alpha": 2.0, "beta": 1.0, "p": 5, "q": 3, "k": [4.0, 1.6, 2.8]},
        {"family": "tsmc"}
      ],
      "sim": {"t_end": 4.5, "dt": 0.0005, "integrator": "rk4", "coupling": "decoupled"},
      "noise": {"sigma": 0.001, "seed": 7, "mode": "position"},
      "output": {"dir": "out", "plots": true}
    }

Unknown keys and out-of-range values raise :class:`ConfigError`; nothing is
silently defaulted.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Optional

from .arm import ArmParams
from .controllers import DEFAULT_GAINS, FAMILIES, ControlLaw, make_laws
from .sim import NoiseSpec, SimConfig
from .trajectory import ReferenceSpec, SinusoidOffset

TOP_KEYS = {"name", "arm", "reference", "controller", "sim", "noise", "output"}
ARM_KEYS = {"m1", "m2", "m3", "l1", "l2", "l3", "g"}
REFERENCE_KEYS = {"joints", "theta0", "theta_dot0"}
JOINT_KEYS = {"offset", "sin_amp", "cos_amp", "omega"}
CONTROLLER_KEYS = {"name", "family", "switching", "alpha", "beta", "lam", "p", "q", "k", "slope"}
SIM_KEYS = {"t_end", "dt", "integrator", "coupling"}
NOISE_KEYS = {"sigma", "seed", "mode"}
OUTPUT_KEYS = {"dir", "plots"}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ControllerEntry:
    name: str
    family: str
    laws: tuple[ControlLaw, ControlLaw, ControlLaw]
    settings: dict = field(default_factory=dict, compare=False)


@dataclass(frozen=True)
class Scenario:
    name: str
    base: SimConfig
    controllers: tuple[ControllerEntry, ...]
    output_dir: Path = Path("out")
    plots: bool = True

    def config_for(self, entry: ControllerEntry) -> SimConfig:
        return replace(self.base, controllers=entry.laws)


def _check_keys(obj: Any, allowed: set[str], where: str) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object, got {type(obj).__name__}")
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown key {unknown[0]!r}")
    return obj


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{where}: must be finite")
    return float(value)


def _triple(value: Any, where: str) -> tuple[float, float, float]:
    if not isinstance(value, list) or len(value) != 3:
        raise ConfigError(f"{where}: expected a list of three numbers")
    return tuple(_number(v, f"{where}[{i}]") for i, v in enumerate(value))


def _build(factory, where: str, **kwargs):
    try:
        return factory(**kwargs)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _parse_arm(obj) -> ArmParams:
    obj = _check_keys(obj, ARM_KEYS, "arm")
    return _build(ArmParams, "arm", **{k: _number(v, f"arm.{k}") for k, v in obj.items()})


def _parse_reference(obj) -> ReferenceSpec:
    obj = _check_keys(obj, REFERENCE_KEYS, "reference")
    kwargs = {}
    if "joints" in obj:
        joints = obj["joints"]
        if not isinstance(joints, list) or len(joints) != 3:
            raise ConfigError("reference.joints: expected a list of three objects")
        parsed = []
        for i, j in enumerate(joints):
            where = f"reference.joints[{i}]"
            j = _check_keys(j, JOINT_KEYS, where)
            if "offset" not in j:
                raise ConfigError(f"{where}: missing key 'offset'")
            parsed.append(_build(SinusoidOffset, where,
                                 **{k: _number(v, f"{where}.{k}") for k, v in j.items()}))
        kwargs["joints"] = tuple(parsed)
    for key in ("theta0", "theta_dot0"):
        if key in obj:
            kwargs[key] = _triple(obj[key], f"reference.{key}")
    return _build(ReferenceSpec, "reference", **kwargs)


def _parse_controller(obj, index: int) -> ControllerEntry:
    where = f"controller[{index}]"
    obj = _check_keys(obj, CONTROLLER_KEYS, where)
    family = obj.get("family")
    if family not in FAMILIES:
        raise ConfigError(f"{where}.family: expected one of {list(FAMILIES)}, got {family!r}")
    switching = obj.get("switching", "sign")
    if switching not in ("sign", "tanh"):
        raise ConfigError(f"{where}.switching: expected 'sign' or 'tanh', got {switching!r}")
    gains: dict[str, Any] = {}
    for key in ("alpha", "beta", "lam", "slope"):
        if key in obj:
            gains[key] = _number(obj[key], f"{where}.{key}")
    for key in ("p", "q"):
        if key in obj:
            value = obj[key]
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{where}.{key}: expected an integer, got {value!r}")
            gains[key] = value
    if "k" in obj:
        k = obj["k"]
        gains["k"] = _number(k, f"{where}.k") if not isinstance(k, list) else _triple(k, f"{where}.k")
    name = obj.get("name", family if switching == "sign" else f"{family}-{switching}")
    if not isinstance(name, str) or not name:
        raise ConfigError(f"{where}.name: expected a non-empty string")
    laws = _build(make_laws, where, family=family, switching=switching, **gains)
    settings = {"family": family, "switching": switching, **gains}
    return ControllerEntry(name, family, laws, settings)


def _parse_noise(obj) -> Optional[NoiseSpec]:
    if obj is None:
        return None
    obj = _check_keys(obj, NOISE_KEYS, "noise")
    kwargs: dict[str, Any] = {}
    if "sigma" in obj:
        kwargs["sigma"] = _number(obj["sigma"], "noise.sigma")
    if "seed" in obj:
        seed = obj["seed"]
        if isinstance(seed, bool) or not isinstance(seed, int):
            raise ConfigError(f"noise.seed: expected an integer, got {seed!r}")
        kwargs["seed"] = seed
    if "mode" in obj:
        kwargs["mode"] = obj["mode"]
    return _build(NoiseSpec, "noise", **kwargs)


def default_controllers(switching: str = "sign") -> list[dict]:
    return [{"family": f, "switching": switching} for f in FAMILIES]


def parse_config(doc: Any, base_dir: Optional[Path] = None) -> Scenario:
    doc = _check_keys(doc, TOP_KEYS, "config")
    name = doc.get("name", "scenario")
    if not isinstance(name, str) or not name:
        raise ConfigError("name: expected a non-empty string")

    arm = _parse_arm(doc["arm"]) if "arm" in doc else ArmParams()
    ref = _parse_reference(doc["reference"]) if "reference" in doc else ReferenceSpec()

    sim_obj = _check_keys(doc.get("sim", {}), SIM_KEYS, "sim")
    sim_kwargs: dict[str, Any] = {}
    for key in ("t_end", "dt"):
        if key in sim_obj:
            sim_kwargs[key] = _number(sim_obj[key], f"sim.{key}")
    for key in ("integrator", "coupling"):
        if key in sim_obj:
            sim_kwargs[key] = sim_obj[key]
    noise = _parse_noise(doc.get("noise"))
    base = _build(SimConfig, "sim", arm=arm, reference=ref, noise=noise, **sim_kwargs)

    raw_controllers = doc.get("controller", default_controllers())
    if not isinstance(raw_controllers, list) or not raw_controllers:
        raise ConfigError("controller: expected a non-empty list")
    entries = tuple(_parse_controller(c, i) for i, c in enumerate(raw_controllers))
    seen: set[str] = set()
    for entry in entries:
        if entry.name in seen:
            raise ConfigError(f"controller: duplicate name {entry.name!r}")
        seen.add(entry.name)

    out_obj = _check_keys(doc.get("output", {}), OUTPUT_KEYS, "output")
    out_dir = out_obj.get("dir", "out")
    if not isinstance(out_dir, str) or not out_dir:
        raise ConfigError("output.dir: expected a non-empty string")
    plots = out_obj.get("plots", True)
    if not isinstance(plots, bool):
        raise ConfigError("output.plots: expected true or false")
    out_path = Path(out_dir)
    if base_dir is not None and not out_path.is_absolute():
        out_path = base_dir / out_path
    return Scenario(name, base, entries, out_path, plots)


def load_config(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return parse_config(doc)


def default_scenario(switching: str = "sign") -> Scenario:
    return parse_config({"controller": default_controllers(switching)})


def example_config() -> dict:
    """The default scenario written out in full."""
    return {
        "name": "default",
        "arm": {"m1": 1.0, "m2": 1.0, "m3": 1.0, "l1": 0.5, "l2": 1.0, "l3": 1.0, "g": 9.81},
        "reference": {
            "joints": [
                {"offset": 0.35, "sin_amp": -0.5, "cos_amp": 0.0, "omega": 1.0},
                {"offset": 0.25, "sin_amp": 0.0, "cos_amp": 0.5, "omega": 1.0},
                {"offset": 0.45, "sin_amp": 0.0, "cos_amp": -0.5, "omega": 1.0},
            ],
            "theta0": [0.7, 1.5, 0.5],
            "theta_dot0": [0.0, 0.0, 0.0],
        },
        "controller": [
            {"family": f, "switching": "sign",
             **{k: (list(v) if isinstance(v, tuple) else v) for k, v in DEFAULT_GAINS.items()}}
            for f in FAMILIES
        ],
        "sim": {"t_end": 4.5, "dt": 5e-4, "integrator": "rk4", "coupling": "decoupled"},
        "noise": None,
        "output": {"dir": "out", "plots": True},
    }
