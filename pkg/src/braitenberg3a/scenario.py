"""Scenario configuration: YAML schema, validation and figure presets.

A scenario file looks like::

    field:
      profile: gaussian
      amplitude: 1.0
      sigma_x: 0.05
      sigma_y: 0.1
    vehicle:
      delta: 0.25
      wheelbase: 0.25
      gain_k: 1.0
      alpha: 3.0
    model: ode                 # ode | dae | wheel_exact
    initial_pose: [-6.0, 1.0, 0.0]
    integrator:
      method: rk45             # rk45 | rk4
      step: 0.01
      rel_tol: 1.0e-08
      abs_tol: 1.0e-10
      t_max: 1000.0
      source_radius: 0.05
      max_step: 0.25           # adaptive step cap
    runs:                      # optional; each run may override alpha and/or model
      - {label: classical, alpha: 0.0}
      - {label: dynamic, alpha: 3.0}
    outputs:
      formats: [csv, report, svg]
      dt: 0.01                 # resampling step for metrics

The stimulus value at the source is taken from ``field.amplitude`` so that the
wheel drive vanishes there.
"""

from __future__ import annotations

import copy
import math
from dataclasses import asdict, dataclass, field as dc_field

import yaml

from .controller import VehicleConfig
from .dynamics import ModelKind, alpha_admissible
from .field import PROFILES, ParabolicStimulus
from .integrate import IntegratorConfig, Method

__all__ = ["ConfigError", "RunSpec", "Scenario", "PRESETS", "preset", "load_scenario", "parse_scenario"]

FORMATS = ("csv", "report", "svg")


class ConfigError(ValueError):
    """Scenario configuration is malformed or violates an invariant."""


@dataclass(frozen=True)
class RunSpec:
    label: str
    alpha: float | None = None
    model: ModelKind | None = None


@dataclass
class Scenario:
    field: ParabolicStimulus = dc_field(default_factory=ParabolicStimulus)
    vehicle: VehicleConfig = dc_field(default_factory=VehicleConfig)
    model: ModelKind = ModelKind.ODE
    initial_pose: tuple = (-6.0, 1.0, 0.0)
    integrator: IntegratorConfig = dc_field(default_factory=IntegratorConfig)
    runs: list = dc_field(default_factory=lambda: [RunSpec("run")])
    formats: tuple = FORMATS
    dt: float = 0.01
    name: str = "scenario"

    def run_configs(self):
        """Yield ``(label, model, VehicleConfig)`` for every run."""
        for r in self.runs:
            cfg = self.vehicle
            if r.alpha is not None:
                cfg = VehicleConfig(cfg.delta, cfg.wheelbase, cfg.gain_k, r.alpha, cfg.s_top)
            yield r.label, r.model or self.model, cfg

    def check_admissible(self):
        """Return messages for runs whose positive alpha breaks the gradient bound."""
        msgs = []
        for label, _, cfg in self.run_configs():
            adm = alpha_admissible(self.field, cfg)
            if cfg.alpha > 0 and not adm.ok:
                msgs.append(
                    f"run {label!r}: alpha={cfg.alpha} violates 0 < alpha < 1/max|grad S| "
                    f"= {cfg.alpha + adm.margin:.6g}"
                )
        return msgs

    def to_dict(self) -> dict:
        runs = []
        for r in self.runs:
            d = {"label": r.label}
            if r.alpha is not None:
                d["alpha"] = float(r.alpha)
            if r.model is not None:
                d["model"] = r.model.value
            runs.append(d)
        ic = asdict(self.integrator)
        ic["method"] = self.integrator.method.value
        return {
            "name": self.name,
            "field": {
                "profile": self.field.profile.kind,
                "amplitude": float(self.field.amplitude),
                "sigma_x": float(self.field.sigma_x),
                "sigma_y": float(self.field.sigma_y),
            },
            "vehicle": {
                "delta": float(self.vehicle.delta),
                "wheelbase": float(self.vehicle.wheelbase),
                "gain_k": float(self.vehicle.gain_k),
                "alpha": float(self.vehicle.alpha),
            },
            "model": self.model.value,
            "initial_pose": [float(v) for v in self.initial_pose],
            "integrator": {k: (float(v) if not isinstance(v, str) else v) for k, v in ic.items()},
            "runs": runs,
            "outputs": {"formats": list(self.formats), "dt": float(self.dt)},
        }

    def dumps(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)


def _section(d, key):
    sec = d.get(key, {})
    if not isinstance(sec, dict):
        raise ConfigError(f"'{key}' must be a mapping")
    return sec


def _number(sec, key, where, default):
    v = sec.get(key, default)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{where}.{key} must be a finite number, got {v!r}")
    return float(v)


def _unknown(sec, allowed, where):
    extra = set(sec) - set(allowed)
    if extra:
        raise ConfigError(f"unknown keys in {where}: {sorted(extra)}")


def parse_scenario(d) -> Scenario:
    """Build a validated :class:`Scenario` from a nested mapping."""
    if not isinstance(d, dict):
        raise ConfigError("scenario must be a mapping at top level")
    _unknown(d, ["name", "field", "vehicle", "model", "initial_pose", "integrator", "runs", "outputs"], "scenario")
    defaults = Scenario()
    try:
        fs = _section(d, "field")
        _unknown(fs, ["profile", "amplitude", "sigma_x", "sigma_y"], "field")
        kind = str(fs.get("profile", "gaussian")).lower()
        if kind not in PROFILES:
            raise ConfigError(f"field.profile must be one of {sorted(PROFILES)}, got {kind!r}")
        profile = PROFILES[kind](_number(fs, "amplitude", "field", 1.0))
        fld = ParabolicStimulus(profile, _number(fs, "sigma_x", "field", 0.05), _number(fs, "sigma_y", "field", 0.1))

        vs = _section(d, "vehicle")
        _unknown(vs, ["delta", "wheelbase", "gain_k", "alpha", "s_top"], "vehicle")
        s_top = _number(vs, "s_top", "vehicle", fld.amplitude)
        if s_top != fld.amplitude:
            raise ConfigError(
                f"vehicle.s_top={s_top} must equal field.amplitude={fld.amplitude} so that F vanishes at the source"
            )
        veh = VehicleConfig(
            _number(vs, "delta", "vehicle", 0.25),
            _number(vs, "wheelbase", "vehicle", 0.25),
            _number(vs, "gain_k", "vehicle", 1.0),
            _number(vs, "alpha", "vehicle", 3.0),
            s_top,
        )

        model = ModelKind.parse(d.get("model", "ode"))

        pose = d.get("initial_pose", list(defaults.initial_pose))
        if not isinstance(pose, (list, tuple)) or len(pose) != 3:
            raise ConfigError("initial_pose must be a list [x, y, theta]")
        pose = tuple(_number({"v": v}, "v", "initial_pose", 0.0) for v in pose)

        ics = _section(d, "integrator")
        _unknown(ics, ["method", "step", "rel_tol", "abs_tol", "t_max", "source_radius", "max_step"], "integrator")
        base = IntegratorConfig()
        icfg = IntegratorConfig(
            Method(str(ics.get("method", base.method.value)).lower()),
            _number(ics, "step", "integrator", base.step),
            _number(ics, "rel_tol", "integrator", base.rel_tol),
            _number(ics, "abs_tol", "integrator", base.abs_tol),
            _number(ics, "t_max", "integrator", base.t_max),
            _number(ics, "source_radius", "integrator", base.source_radius),
            _number(ics, "max_step", "integrator", base.max_step),
        )

        raw_runs = d.get("runs") or [{"label": "run"}]
        if not isinstance(raw_runs, list):
            raise ConfigError("runs must be a list")
        runs = []
        for i, r in enumerate(raw_runs):
            if not isinstance(r, dict) or "label" not in r:
                raise ConfigError(f"runs[{i}] must be a mapping with a 'label'")
            _unknown(r, ["label", "alpha", "model"], f"runs[{i}]")
            label = str(r["label"])
            if not label or any(c in label for c in "/\\"):
                raise ConfigError(f"runs[{i}].label {label!r} is not a valid file stem")
            alpha = _number(r, "alpha", f"runs[{i}]", 0.0) if "alpha" in r else None
            if alpha is not None and alpha < 0:
                raise ConfigError(f"runs[{i}].alpha must be nonnegative")
            runs.append(RunSpec(label, alpha, ModelKind.parse(r["model"]) if "model" in r else None))
        if len({r.label for r in runs}) != len(runs):
            raise ConfigError("run labels must be unique")

        outs = _section(d, "outputs")
        _unknown(outs, ["formats", "dt"], "outputs")
        formats = tuple(outs.get("formats", FORMATS))
        bad = [f for f in formats if f not in FORMATS]
        if bad:
            raise ConfigError(f"unknown output formats {bad}; choose from {list(FORMATS)}")
        dt = _number(outs, "dt", "outputs", 0.01)
        if dt <= 0:
            raise ConfigError("outputs.dt must be positive")
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc

    return Scenario(fld, veh, model, pose, icfg, runs, formats, dt, str(d.get("name", "scenario")))


def load_scenario(path) -> Scenario:
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
    return parse_scenario(data)


_PRESET_INTEGRATOR = {"t_max": 1000.0}

PRESETS = {
    "fig1": {
        "name": "fig1",
        "vehicle": {"delta": 0.25, "wheelbase": 0.25, "alpha": 3.0},
        "initial_pose": [-6.0, 1.0, 0.0],
        "runs": [{"label": "wheel_exact", "model": "wheel_exact"}, {"label": "dae", "model": "dae"}],
    },
    "fig2": {
        "name": "fig2",
        "initial_pose": [-6.0, 0.0, 0.0],
        "runs": [{"label": "classical", "alpha": 0.0}, {"label": "dynamic", "alpha": 3.0}],
    },
    "fig3a": {
        "name": "fig3a",
        "initial_pose": [-6.0, 1.0, 0.0],
        "runs": [{"label": "classical", "alpha": 0.0}, {"label": "dynamic", "alpha": 3.0}],
    },
    "fig3b": {
        "name": "fig3b",
        "initial_pose": [-2.0, 1.0, math.atan(-0.5)],
        "runs": [{"label": "classical", "alpha": 0.0}, {"label": "dynamic", "alpha": 3.0}],
    },
}


def preset(name: str, alpha: float | None = None, model=None) -> Scenario:
    """Figure scenario ``fig1``, ``fig2``, ``fig3a`` or ``fig3b``.

    ``alpha`` replaces the stimulus-rate gain of every run that uses one;
    ``model`` replaces the formulation of runs that do not pin their own.
    """
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; available: {sorted(PRESETS)}")
    d = copy.deepcopy(PRESETS[name])
    d["integrator"] = dict(_PRESET_INTEGRATOR)
    if model is not None:
        d["model"] = ModelKind.parse(model).value
    if alpha is not None:
        d.setdefault("vehicle", {})["alpha"] = float(alpha)
        for r in d["runs"]:
            if r.get("alpha", 1.0) != 0.0:
                r["alpha"] = float(alpha)
    return parse_scenario(d)
