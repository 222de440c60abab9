"""Command line entry point.

::

    braitenberg3a run CONFIG [--out DIR] [--force]
    braitenberg3a preset NAME [--alpha X] [--model KIND] [--out DIR] [--force] [--print-config]
    braitenberg3a check CONFIG
    braitenberg3a sweep CONFIG --param alpha --values 0 1 3 [--out DIR] [--jobs N] [--force]

Exit codes: 0 success, 2 invalid configuration, 3 singular closed loop
(or step-size underflow), 4 I/O failure.
"""

from __future__ import annotations

import argparse
import copy
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import yaml

from .analysis import sup_norm_gap, time_to_abs_x, trajectory_metrics
from .controller import SingularState
from .dynamics import alpha_admissible
from .integrate import Termination, integrate
from .output import format_report, paths_svg, trajectory_csv
from .scenario import PRESETS, ConfigError, Scenario, load_scenario, parse_scenario, preset

log = logging.getLogger("braitenberg3a")

EXIT_OK, EXIT_CONFIG, EXIT_SINGULAR, EXIT_IO = 0, 2, 3, 4

_PARAM_ALIASES = {
    "alpha": "vehicle.alpha",
    "delta": "vehicle.delta",
    "wheelbase": "vehicle.wheelbase",
    "gain_k": "vehicle.gain_k",
    "sigma_x": "field.sigma_x",
    "sigma_y": "field.sigma_y",
    "amplitude": "field.amplitude",
}


def simulate(scn: Scenario):
    """Integrate every run of ``scn``; returns ``(trajectories, report, exit_code)``."""
    trajs = {}
    report = {"scenario.name": scn.name, "scenario.initial_pose": list(scn.initial_pose)}
    code = EXIT_OK
    for label, kind, cfg in scn.run_configs():
        key = f"run.{label}"
        report[f"{key}.model"] = kind.value
        report[f"{key}.alpha"] = cfg.alpha
        adm = alpha_admissible(scn.field, cfg)
        report[f"{key}.alpha_admissible"] = adm.ok
        report[f"{key}.alpha_margin"] = adm.margin
        try:
            tr = integrate(scn.initial_pose, kind, scn.field, cfg, scn.integrator)
        except SingularState as exc:
            report[f"{key}.termination"] = Termination.SINGULARITY_ABORT.value
            report[f"{key}.error"] = str(exc)
            code = EXIT_SINGULAR
            continue
        trajs[label] = tr
        m = trajectory_metrics(tr, scn.integrator.source_radius, scn.dt)
        report[f"{key}.termination"] = tr.termination.value
        report[f"{key}.samples"] = len(tr)
        report[f"{key}.t_end"] = float(tr.t[-1])
        report[f"{key}.final_pose"] = [float(v) for v in tr.final_state]
        report[f"{key}.time_to_ball"] = m.time_to_ball
        report[f"{key}.time_to_abs_x_below_0.1"] = time_to_abs_x(tr, 0.1)
        report[f"{key}.path_length"] = m.path_length
        report[f"{key}.max_lateral_overshoot"] = m.max_lateral_overshoot
        report[f"{key}.oscillation_amplitudes"] = m.oscillation_amplitudes
        if tr.termination in (Termination.SINGULARITY_ABORT, Termination.STEP_FAILURE):
            code = EXIT_SINGULAR
    labels = list(trajs)
    for i in range(len(labels)):
        for j in range(i + 1, len(labels)):
            a, b = labels[i], labels[j]
            key = f"compare.{a}.{b}"
            report[f"{key}.sup_norm_gap"] = sup_norm_gap(trajs[a], trajs[b], scn.dt)
            report[f"{key}.time_to_ball_delta"] = (
                report[f"run.{b}.time_to_ball"] - report[f"run.{a}.time_to_ball"]
            )
            report[f"{key}.path_length_delta"] = report[f"run.{b}.path_length"] - report[f"run.{a}.path_length"]
    return trajs, report, code


def run_scenario(scn: Scenario, out_dir, force: bool = False) -> int:
    """Validate, simulate and write outputs of ``scn`` into ``out_dir``."""
    problems = scn.check_admissible()
    if problems and not force:
        for p in problems:
            log.warning("%s (use --force to run anyway)", p)
        return EXIT_CONFIG
    trajs, report, code = simulate(scn)
    files = {}
    if "csv" in scn.formats:
        for label, tr in trajs.items():
            files[f"{label}.csv"] = trajectory_csv(tr)
    if "report" in scn.formats:
        files["report.txt"] = format_report(report)
    if "svg" in scn.formats and trajs:
        files["paths.svg"] = paths_svg(trajs)
    try:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, text in files.items():
            with open(out / name, "w", newline="") as fh:
                fh.write(text)
    except OSError as exc:
        log.error("cannot write outputs to %s: %s", out_dir, exc)
        return EXIT_IO
    if code == EXIT_SINGULAR:
        log.error("closed loop became singular; see %s", Path(out_dir) / "report.txt")
    return code


def _set_path(d: dict, path: str, value):
    keys = _PARAM_ALIASES.get(path, path).split(".")
    node = d
    for k in keys[:-1]:
        node = node.setdefault(k, {})
    node[keys[-1]] = value
    if keys[-1] in ("alpha",):
        for r in d.get("runs") or []:
            r.pop(keys[-1], None)


def _sweep_job(args):
    base, param, value, out_dir, force = args
    d = copy.deepcopy(base)
    _set_path(d, param, value)
    d["name"] = f"{d.get('name', 'scenario')}_{param}_{value!r}"
    try:
        scn = parse_scenario(d)
    except ConfigError as exc:
        log.error("invalid config for %s=%r: %s", param, value, exc)
        return EXIT_CONFIG
    return run_scenario(scn, out_dir, force)


def sweep(config_path, param: str, values, out_dir, jobs: int | None = None, force: bool = False) -> int:
    scn = load_scenario(config_path)
    base = scn.to_dict()
    tasks = [(base, param, v, str(Path(out_dir) / f"{param}_{v!r}"), force) for v in values]
    if jobs == 1:
        codes = [_sweep_job(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            codes = list(ex.map(_sweep_job, tasks))
    return max(codes, default=EXIT_OK)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="braitenberg3a", description=__doc__.split("\n\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a scenario file")
    r.add_argument("config")
    r.add_argument("--out", default="out")
    r.add_argument("--force", action="store_true", help="run even if alpha breaks the gradient bound")

    pr = sub.add_parser("preset", help="run a figure preset")
    pr.add_argument("name", choices=sorted(PRESETS))
    pr.add_argument("--alpha", type=float)
    pr.add_argument("--model", choices=["ode", "dae", "wheel_exact"])
    pr.add_argument("--out")
    pr.add_argument("--force", action="store_true")
    pr.add_argument("--print-config", action="store_true", help="print the preset as YAML and exit")

    c = sub.add_parser("check", help="validate a scenario file without running it")
    c.add_argument("config")

    s = sub.add_parser("sweep", help="run a scenario for several values of one parameter")
    s.add_argument("config")
    s.add_argument("--param", required=True)
    s.add_argument("--values", required=True, nargs="+", type=float)
    s.add_argument("--out", default="sweep")
    s.add_argument("--jobs", type=int)
    s.add_argument("--force", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        if args.command == "run":
            return run_scenario(load_scenario(args.config), args.out, args.force)
        if args.command == "preset":
            scn = preset(args.name, alpha=args.alpha, model=args.model)
            if args.print_config:
                sys.stdout.write(scn.dumps())
                return EXIT_OK
            return run_scenario(scn, args.out or os.path.join("out", args.name), args.force)
        if args.command == "check":
            scn = load_scenario(args.config)
            problems = scn.check_admissible()
            for msg in problems:
                log.warning(msg)
            print(yaml.safe_dump(scn.to_dict(), sort_keys=False), end="")
            return EXIT_CONFIG if problems else EXIT_OK
        if args.command == "sweep":
            return sweep(args.config, args.param, args.values, args.out, args.jobs, args.force)
    except ConfigError as exc:
        log.error("invalid configuration: %s", exc)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
