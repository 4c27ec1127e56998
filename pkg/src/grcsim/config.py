"""Run configuration files and the built-in presets.

A run config is ``[section]`` / ``key = value`` text with sections

    [run]          preset, family, name, duration, dt, substeps, integrator,
                   controller, seed, band, rmse_start, saturate_u1,
                   strict_pressure, tracked
    [plant]        file (parameter file, relative to this config) and any
                   parameter of the family as an override
    [gains]        k, epsilon, gamma, delta, chi0 (one value or one per subsystem)
    [limits]       u1, u2, u3 as "min, max"
    [trajectory]   kind = quintic | step | velocity_script, plus its keys
    [disturbance]  kind, magnitude (4 values), t_on, frequency, bandwidth, tones
    [initial]      x1, x2
    [pid]          k_p, k_i, k_d, clamp, tune_setpoint, tune_relay

``preset = NAME`` in ``[run]`` starts from that preset; every other key
overrides the preset's value.  A ``[trajectory]`` whose ``kind`` differs from
the preset's replaces the whole section, and so does a ``[plant]`` section
when the family changes.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .kvfile import ConfigError, Entry, as_bool, as_float, as_int, parse_kv
from .plants.disturbance import DisturbanceProfile
from .plants.io import default_params, load_params, params_from_entries
from .reference import QuinticSegment, StepReference, VelocityScript, load_velocity_script
from .sim import PidGains, SimConfig
from .types import GainSet, PlantFamily, SaturationLimits, subsystem_count

PRESETS = ("eda-quintic", "hda-velocity", "pda-step", "universal-step", "hda-cylinder-quintic")

_KEYS = {
    "run": {"preset", "family", "name", "duration", "dt", "substeps", "integrator", "controller", "seed",
            "band", "rmse_start", "saturate_u1", "strict_pressure", "tracked"},
    "plant": None,  # checked against the family's parameter names
    "gains": {"k", "epsilon", "gamma", "delta", "chi0"},
    "limits": {"u1", "u2", "u3"},
    "trajectory": {"kind", "x0", "xf", "T", "t0", "value", "t_on", "file", "times", "velocities",
                   "gear_ratio", "wheel_radius"},
    "disturbance": {"kind", "magnitude", "t_on", "frequency", "bandwidth", "tones"},
    "initial": {"x1", "x2"},
    "pid": {"k_p", "k_i", "k_d", "clamp", "tune_setpoint", "tune_relay"},
}


@dataclass(frozen=True)
class _Source:
    name: str
    base_dir: Path | None


def _floats(entry: Entry, key: str, src: _Source) -> tuple[float, ...]:
    parts = [p.strip() for p in entry.value.split(",")]
    try:
        return tuple(float(p) for p in parts if p)
    except ValueError:
        raise ConfigError(f"{src.name}:{entry.line}: {key} expects comma-separated numbers, got {entry.value!r}") from None


def _per_subsystem(entry: Entry, key: str, n: int, src: _Source) -> tuple[float, ...]:
    vals = _floats(entry, key, src)
    if len(vals) == 1:
        return vals * n
    if len(vals) != n:
        raise ConfigError(f"{src.name}:{entry.line}: {key} needs 1 or {n} values, got {len(vals)}")
    return vals


def preset_text(name: str) -> str:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}")
    return (resources.files("grcsim") / "data" / f"{name}.cfg").read_text(encoding="utf-8")


def _preset_dir() -> Path:
    return Path(str(resources.files("grcsim") / "data"))


def _merge(base: dict, over: dict) -> dict:
    merged = {sec: dict(entries) for sec, entries in base.items()}
    for sec, entries in over.items():
        replace = False
        if sec == "trajectory" and "kind" in entries and "kind" in merged.get(sec, {}):
            replace = entries["kind"].value != merged[sec]["kind"].value
        if replace or sec not in merged:
            merged[sec] = dict(entries)
        else:
            merged[sec].update(entries)
    return merged


def _check_keys(sections: dict, src: _Source) -> None:
    for sec, entries in sections.items():
        if sec not in _KEYS:
            line = min((e.line for e in entries.values()), default=0)
            raise ConfigError(f"{src.name}:{line}: unknown section [{sec}]")
        allowed = _KEYS[sec]
        if allowed is None:
            continue
        for key, entry in entries.items():
            if key not in allowed:
                raise ConfigError(f"{src.name}:{entry.line}: unknown key {key!r} in [{sec}]")


def _required(entries: dict, key: str, section: str, src: _Source) -> Entry:
    if key not in entries:
        raise ConfigError(f"{src.name}: missing required key {key!r} in [{section}]")
    return entries[key]


def _trajectory(entries: dict, src: _Source, sources: dict):
    kind_entry = _required(entries, "kind", "trajectory", src)
    kind = kind_entry.value
    f = {k: as_float(e, k, src.name) for k, e in entries.items()
         if k in ("x0", "xf", "T", "t0", "value", "t_on", "gear_ratio", "wheel_radius")}
    try:
        if kind == "quintic":
            for key in ("xf", "T"):
                _required(entries, key, "trajectory", src)
            return QuinticSegment(f.get("x0", 0.0), f["xf"], f["T"], f.get("t0", 0.0))
        if kind == "step":
            _required(entries, "value", "trajectory", src)
            return StepReference(f["value"], f.get("t_on", 0.0), f.get("x0", 0.0))
        if kind == "velocity_script":
            scale = f.get("gear_ratio", 1.0) / f.get("wheel_radius", 1.0)
            if "file" in entries:
                base = sources.get("trajectory", src).base_dir or Path.cwd()
                script = load_velocity_script(base / entries["file"].value, f.get("x0", 0.0))
            else:
                times = _floats(_required(entries, "times", "trajectory", src), "times", src)
                vels = _floats(_required(entries, "velocities", "trajectory", src), "velocities", src)
                script = VelocityScript(times, vels, f.get("x0", 0.0))
            return VelocityScript(script.times, tuple(v * scale for v in script.velocities), script.x0)
    except (ValueError, OSError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{src.name}:{kind_entry.line}: invalid trajectory: {exc}") from None
    raise ConfigError(f"{src.name}:{kind_entry.line}: unknown trajectory kind {kind!r}")


def build_config(sections: dict, src: _Source, sources: dict | None = None) -> SimConfig:
    """Validated SimConfig from merged sections."""
    sources = sources or {}
    _check_keys(sections, src)
    run = sections.get("run", {})
    family_entry = _required(run, "family", "run", src)
    try:
        family = PlantFamily.parse(family_entry.value)
    except ValueError as exc:
        raise ConfigError(f"{src.name}:{family_entry.line}: {exc}") from None
    n = subsystem_count(family)

    plant = dict(sections.get("plant", {}))
    if "file" in plant:
        base = sources.get("plant", src).base_dir or Path.cwd()
        path = base / plant.pop("file").value
        fam, params = load_params(path)
        if fam is not family:
            raise ConfigError(f"{path}: parameter file is for {fam.value}, run is {family.value}")
    else:
        params = default_params(family)
    params = params_from_entries(family, plant, src.name, base=params)

    gains = sections.get("gains", {})
    gvals = {}
    for key in ("k", "epsilon", "gamma", "delta"):
        gvals[key] = _per_subsystem(_required(gains, key, "gains", src), key, n, src)
    try:
        gain_set = GainSet(gvals["k"], gvals["epsilon"], gvals["gamma"], gvals["delta"])
    except ValueError as exc:
        # point at the offending key when the message names one
        named = [k for k in ("epsilon", "gamma", "delta", "k") if str(exc).startswith(k + " ")]
        line = gains[named[0]].line if named else min(gains[k].line for k in ("k", "epsilon", "gamma", "delta"))
        raise ConfigError(f"{src.name}:{line}: {exc}") from None
    chi0 = _per_subsystem(gains["chi0"], "chi0", n, src) if "chi0" in gains else 0.0

    lim_sec = sections.get("limits", {})
    limits = []
    for j in range(1, n):
        entry = _required(lim_sec, f"u{j}", "limits", src)
        vals = _floats(entry, f"u{j}", src)
        if len(vals) != 2:
            raise ConfigError(f"{src.name}:{entry.line}: u{j} expects 'min, max'")
        try:
            limits.append(SaturationLimits(*vals))
        except ValueError as exc:
            raise ConfigError(f"{src.name}:{entry.line}: {exc}") from None
    extra = [k for k in lim_sec if k not in {f"u{j}" for j in range(1, n)}]
    if extra:
        raise ConfigError(f"{src.name}:{lim_sec[extra[0]].line}: {family.value} has no control {extra[0]}")

    trajectory = _trajectory(_required_section(sections, "trajectory", src), src, sources)

    dist = sections.get("disturbance", {})
    dkw = {}
    if "kind" in dist:
        dkw["kind"] = dist["kind"].value
    if "magnitude" in dist:
        dkw["magnitude"] = _floats(dist["magnitude"], "magnitude", src)
    for key in ("t_on", "frequency", "bandwidth"):
        if key in dist:
            dkw[key] = as_float(dist[key], key, src.name)
    if "tones" in dist:
        dkw["tones"] = as_int(dist["tones"], "tones", src.name)
    try:
        disturbance = DisturbanceProfile(**dkw)
    except ValueError as exc:
        line = min((e.line for e in dist.values()), default=0)
        raise ConfigError(f"{src.name}:{line}: {exc}") from None

    init = sections.get("initial", {})
    x0 = (as_float(init["x1"], "x1", src.name) if "x1" in init else 0.0,
          as_float(init["x2"], "x2", src.name) if "x2" in init else 0.0)

    pid_sec = sections.get("pid", {})
    pid = None
    if all(k in pid_sec for k in ("k_p", "k_i", "k_d")):
        pid = PidGains(*(as_float(pid_sec[k], k, src.name) for k in ("k_p", "k_i", "k_d")),
                       as_float(pid_sec["clamp"], "clamp", src.name) if "clamp" in pid_sec else float("inf"))

    kw = {}
    for key in ("duration", "dt", "band", "rmse_start"):
        if key in run:
            kw[key] = as_float(run[key], key, src.name)
    for key in ("substeps", "seed"):
        if key in run:
            kw[key] = as_int(run[key], key, src.name)
    for key in ("saturate_u1", "strict_pressure"):
        if key in run:
            kw[key] = as_bool(run[key], key, src.name)
    for key in ("integrator", "controller", "name", "tracked"):
        if key in run:
            kw[key] = run[key].value.lower() if key != "name" else run[key].value
    if "duration" not in kw:
        raise ConfigError(f"{src.name}: missing required key 'duration' in [run]")
    try:
        return SimConfig(family=family, params=params, gains=gain_set, limits=tuple(limits),
                         trajectory=trajectory, disturbance=disturbance, chi0=chi0, x0=x0, pid=pid, **kw)
    except ValueError as exc:
        line = min((e.line for e in run.values()), default=0)
        raise ConfigError(f"{src.name}:{line}: {exc}") from None


def _required_section(sections, name, src):
    if name not in sections:
        raise ConfigError(f"{src.name}: missing [{name}] section")
    return sections[name]


def parse_config_text(text: str, source: str = "<config>", base_dir: Path | None = None) -> SimConfig:
    src = _Source(source, base_dir)
    sections = parse_kv(text, source)
    _check_keys(sections, src)
    sources = {sec: src for sec in sections}
    run = sections.get("run", {})
    if "preset" in run:
        name = run["preset"].value
        try:
            base_text = preset_text(name)
        except ConfigError as exc:
            raise ConfigError(f"{source}:{run['preset'].line}: {exc}") from None
        base = parse_kv(base_text, f"preset {name}")
        base_src = _Source(f"preset {name}", _preset_dir())
        if "family" in run and "family" in base["run"] and run["family"].value != base["run"]["family"].value:
            base.pop("plant", None)
        for sec in ("plant", "trajectory"):
            if "file" not in sections.get(sec, {}):
                sources[sec] = base_src
        sections = _merge(base, sections)
        sections["run"].pop("preset", None)
    return build_config(sections, src, sources)


def parse_config(path: str | Path) -> SimConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read ({exc.strerror})") from exc
    return parse_config_text(text, str(path), path.parent)


def load_preset(name: str) -> SimConfig:
    return parse_config_text(preset_text(name), f"preset {name}", _preset_dir())


def preset_pid_tuning(name: str) -> tuple[float, float]:
    """(setpoint, relay amplitude) recorded for the preset's PID tuning run."""
    sec = parse_kv(preset_text(name), f"preset {name}").get("pid", {})
    if "tune_setpoint" not in sec or "tune_relay" not in sec:
        raise ConfigError(f"preset {name} has no PID tuning record")
    return as_float(sec["tune_setpoint"], "tune_setpoint", name), as_float(sec["tune_relay"], "tune_relay", name)
