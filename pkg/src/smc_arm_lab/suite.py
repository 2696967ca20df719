"""The three reproduction studies and their report.

``sign``         noise-free, sign switching
``tanh``         noise-free, tanh switching
``disturbance``  tanh switching with Gaussian noise on the measured angles

Every study runs PD-SMC, TSMC and FTSMC with the default gains on the default
arm and reference.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from . import acceptance, metrics, plots, traces
from .controllers import FAMILIES, make_laws
from .sim import NoiseSpec, SimConfig, SimRecord, run, run_many

log = logging.getLogger(__name__)

STUDIES = ("sign", "tanh", "disturbance")
DEFAULT_SEED = 7
DEFAULT_SIGMA = 1e-3


@dataclass
class SuiteResult:
    records: dict[str, dict[str, SimRecord]]
    metrics: dict[str, dict[str, metrics.RunMetrics]]
    criteria: list[acceptance.CriterionResult]
    out_dir: Path

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.criteria)


def study_configs(base: Optional[SimConfig] = None, seed: int = DEFAULT_SEED,
                  sigma: float = DEFAULT_SIGMA) -> dict[str, dict[str, SimConfig]]:
    base = base or SimConfig()
    out: dict[str, dict[str, SimConfig]] = {}
    for study in STUDIES:
        switching = "sign" if study == "sign" else "tanh"
        noise = NoiseSpec(sigma=sigma, seed=seed) if study == "disturbance" else None
        out[study] = {f: replace(base, controllers=make_laws(f, switching), noise=noise)
                      for f in FAMILIES}
    return out


def comparison_rows(named: dict[str, metrics.RunMetrics]) -> list[dict]:
    rows = []
    for name, m in named.items():
        row = {"controller": name, "mse_pooled": m.mse_pooled}
        for j in range(3):
            row[f"reach_time{j + 1}"] = m.reach_time[j]
        for j in range(3):
            row[f"sse{j + 1}"] = m.sse[j]
        for j in range(3):
            row[f"chatter{j + 1}"] = m.chatter[j]
        rows.append(row)
    return rows


def _cell(value) -> str:
    if value is None:
        return "not-reached"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def comparison_csv(named: dict[str, metrics.RunMetrics]) -> str:
    rows = comparison_rows(named)
    header = list(rows[0])
    lines = [",".join(header)] + [",".join(_cell(r[h]) for h in header) for r in rows]
    return "\n".join(lines) + "\n"


def comparison_text(named: dict[str, metrics.RunMetrics]) -> str:
    def reach(x):
        return "   n/r" if x is None else f"{x:6.3f}"

    lines = [f"{'controller':<14} {'pooled MSE':>11}  {'reach time [s]':^22}  "
             f"{'steady-state error [rad]':^32}  {'chattering (TV of u)':^32}"]
    for name, m in named.items():
        lines.append(
            f"{name:<14} {m.mse_pooled:11.5f}  " + " ".join(reach(x) for x in m.reach_time)
            + "  " + " ".join(f"{x:10.2e}" for x in m.sse)
            + "  " + " ".join(f"{x:10.4g}" for x in m.chatter))
    return "\n".join(lines) + "\n"


def write_run(rec: SimRecord, m: metrics.RunMetrics, out_dir: Path, extra: dict | None = None) -> None:
    traces.write_trace(rec, out_dir / "trace.csv")
    info = {"config_hash": rec.metadata["config_hash"], "seed": rec.metadata["seed"]}
    if extra:
        info.update(extra)
    traces.write_metrics(m, out_dir / "metrics.json", info)


def run_paper_suite(out_dir, seed: int = DEFAULT_SEED, sigma: float = DEFAULT_SIGMA,
                    workers: Optional[int] = None, plots_enabled: bool = True) -> SuiteResult:
    out_dir = Path(out_dir)
    configs = study_configs(seed=seed, sigma=sigma)
    flat = [(s, f, c) for s, per in configs.items() for f, c in per.items()]
    log.info("running %d simulations", len(flat))
    recs = run_many([c for _, _, c in flat], workers)

    records: dict[str, dict[str, SimRecord]] = {s: {} for s in STUDIES}
    computed: dict[str, dict[str, metrics.RunMetrics]] = {s: {} for s in STUDIES}
    for (study, family, _), rec in zip(flat, recs):
        records[study][family] = rec
        m = metrics.compute(rec)
        computed[study][family] = m
        write_run(rec, m, out_dir / study / family, {"study": study, "controller": family})

    for study in STUDIES:
        (out_dir / study / "comparison.csv").write_text(comparison_csv(computed[study]))
        if plots_enabled:
            plots.comparison_figures(records[study], out_dir / study / "plots", joint=0)
            for j in (1, 2):
                tracking = [("reference", records[study]["ftsmc"].t, records[study]["ftsmc"].theta_d[:, j])]
                tracking += [(f, r.t, r.theta[:, j]) for f, r in records[study].items()]
                plots.write_chart(out_dir / study / "plots" / f"tracking_joint{j + 1}.svg", tracking,
                                  f"Joint {j + 1} position tracking", ylabel="angle [rad]")
    if plots_enabled:
        plots.all_joint_figures(records["tanh"]["ftsmc"], out_dir / "tanh" / "plots", "ftsmc")

    criteria = evaluate(records, out_dir, configs)
    write_report(out_dir, computed, criteria, seed, sigma)
    return SuiteResult(records, computed, criteria, out_dir)


def evaluate(records, out_dir: Path, configs) -> list[acceptance.CriterionResult]:
    results = [
        acceptance.settling_time_fidelity(),
        acceptance.dynamics_validity(),
        acceptance.mse_ordering(records["sign"]),
        acceptance.finite_time_tracking({"sign": records["sign"], "tanh": records["tanh"]}),
        acceptance.chattering_reduction(records["sign"]["ftsmc"], records["tanh"]["ftsmc"]),
        acceptance.disturbance_rejection(records["disturbance"]),
        acceptance.reaching_condition(records["sign"]),
    ]
    # in-process rerun of the noisy FTSMC case; the test suite also compares two full runs
    rerun = run(configs["disturbance"]["ftsmc"])
    emitted = (out_dir / "disturbance" / "ftsmc" / "trace.csv").read_text()
    same = traces.trace_csv(rerun) == emitted
    results.append(acceptance.CriterionResult(
        8, "byte-identical outputs across runs", same,
        "re-simulated noisy FTSMC trace " + ("matches" if same else "differs from") + " emitted CSV"))
    return results


def write_report(out_dir: Path, computed, criteria, seed: int, sigma: float) -> None:
    doc = {
        "seed": seed,
        "noise_sigma": sigma,
        "studies": {s: {f: m.to_dict() for f, m in per.items()} for s, per in computed.items()},
        "criteria": [c.to_dict() for c in criteria],
    }
    (out_dir / "report.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    parts = [f"# Benchmark suite report\n\nnoise sigma {sigma:g} rad, seed {seed}\n"]
    for study, per in computed.items():
        parts.append(f"\n## {study}\n\n```\n{comparison_text(per)}```\n")
    parts.append("\n## Acceptance\n\n")
    parts.extend(f"- {c.line}\n" for c in criteria)
    (out_dir / "report.md").write_text("".join(parts))
