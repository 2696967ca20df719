"""Command-line experiment runner: ``run``, ``compare`` and ``paper-suite``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import metrics, plots, suite
from .arm import SingularMassMatrixError
from .config import ConfigError, ControllerEntry, Scenario, default_scenario, example_config, load_config
from .controllers import FAMILIES, make_laws
from .sim import NoiseSpec, SimulationDiverged, run, run_many

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGED = 3
EXIT_IO = 4
EXIT_ACCEPTANCE = 5

log = logging.getLogger("smc_arm_lab")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON scenario file")
    p.add_argument("--controller", choices=FAMILIES)
    p.add_argument("--switching", choices=("sign", "tanh"))
    p.add_argument("--noise-sigma", type=float, help="measurement noise std [rad]")
    p.add_argument("--seed", type=int, help="noise seed (unsigned 64-bit)")
    p.add_argument("--dt", type=float, help="step size [s]")
    p.add_argument("--t-end", type=float, help="simulated time [s]")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--coupling", choices=("decoupled", "diagonal"),
                   help="input coupling mode; 'diagonal' is a diagnostic")
    p.add_argument("--no-plots", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="smc-arm-lab", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one controller")
    _add_common(p_run)
    p_cmp = sub.add_parser("compare", help="simulate and tabulate several controllers")
    _add_common(p_cmp)

    p_suite = sub.add_parser("paper-suite", help="run the sign, tanh and disturbance studies")
    p_suite.add_argument("--out", type=Path, default=Path("paper_suite"))
    p_suite.add_argument("--seed", type=int, default=suite.DEFAULT_SEED)
    p_suite.add_argument("--noise-sigma", type=float, default=suite.DEFAULT_SIGMA)
    p_suite.add_argument("--no-plots", action="store_true")
    p_suite.add_argument("--strict", action="store_true",
                         help="exit with status 5 when any acceptance check fails")

    p_ex = sub.add_parser("example-config", help="print the default scenario as JSON")
    p_ex.add_argument("--out", type=Path)
    return parser


def apply_overrides(scenario: Scenario, args, single: bool) -> Scenario:
    base = scenario.base
    try:
        if args.dt is not None:
            base = replace(base, dt=args.dt)
        if args.t_end is not None:
            base = replace(base, t_end=args.t_end)
        if args.coupling is not None:
            base = replace(base, coupling=args.coupling)
        if args.noise_sigma is not None or args.seed is not None:
            noise = base.noise or NoiseSpec()
            if args.noise_sigma is not None:
                noise = replace(noise, sigma=args.noise_sigma)
            if args.seed is not None:
                noise = replace(noise, seed=args.seed)
            base = replace(base, noise=noise)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    entries = list(scenario.controllers)
    if args.controller is not None:
        matching = [e for e in entries if e.family == args.controller]
        if not matching:
            matching = [ControllerEntry(args.controller, args.controller, make_laws(args.controller))]
        entries = matching
    if single:
        entries = entries[:1]
    if args.switching is not None:
        switched = []
        for e in entries:
            settings = {**e.settings, "switching": args.switching}
            gains = {k: v for k, v in settings.items() if k not in ("family", "switching")}
            laws = make_laws(e.family, args.switching, **gains)
            switched.append(ControllerEntry(e.name, e.family, laws, settings))
        entries = switched
    out_dir = args.out if args.out is not None else scenario.output_dir
    plots_on = scenario.plots and not args.no_plots
    return replace(scenario, base=base, controllers=tuple(entries), output_dir=out_dir, plots=plots_on)


def _scenario(args, single: bool) -> Scenario:
    scenario = load_config(args.config) if args.config else default_scenario()
    return apply_overrides(scenario, args, single)


def cmd_run(args) -> int:
    scenario = _scenario(args, single=True)
    entry = scenario.controllers[0]
    rec = run(scenario.config_for(entry))
    m = metrics.compute(rec)
    out = scenario.output_dir
    suite.write_run(rec, m, out, {"controller": entry.name})
    if scenario.plots:
        plots.comparison_figures({entry.name: rec}, out / "plots")
        plots.all_joint_figures(rec, out / "plots", entry.name)
    print(suite.comparison_text({entry.name: m}), end="")
    print(f"wrote {out / 'trace.csv'}")
    return EXIT_OK


def cmd_compare(args) -> int:
    scenario = _scenario(args, single=False)
    if len(scenario.controllers) < 2:
        raise ConfigError("compare needs at least two controllers")
    recs = run_many([scenario.config_for(e) for e in scenario.controllers])
    named_recs = {}
    named = {}
    for entry, rec in zip(scenario.controllers, recs):
        m = metrics.compute(rec)
        suite.write_run(rec, m, scenario.output_dir / entry.name, {"controller": entry.name})
        named_recs[entry.name] = rec
        named[entry.name] = m
    (scenario.output_dir / "comparison.csv").write_text(suite.comparison_csv(named))
    if scenario.plots:
        plots.comparison_figures(named_recs, scenario.output_dir / "plots")
    print(suite.comparison_text(named), end="")
    return EXIT_OK


def cmd_paper_suite(args) -> int:
    try:
        NoiseSpec(sigma=args.noise_sigma, seed=args.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    result = suite.run_paper_suite(args.out, seed=args.seed, sigma=args.noise_sigma,
                                   plots_enabled=not args.no_plots)
    for study, per in result.metrics.items():
        print(f"== {study}")
        print(suite.comparison_text(per), end="")
    for c in result.criteria:
        print(c.line)
    print(f"report: {result.out_dir / 'report.md'}")
    if args.strict and not result.passed:
        return EXIT_ACCEPTANCE
    return EXIT_OK


def cmd_example_config(args) -> int:
    text = json.dumps(example_config(), indent=2) + "\n"
    if args.out:
        args.out.write_text(text)
    else:
        print(text, end="")
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "compare": cmd_compare,
    "paper-suite": cmd_paper_suite,
    "example-config": cmd_example_config,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SimulationDiverged, SingularMassMatrixError) as exc:
        print(f"simulation aborted: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
