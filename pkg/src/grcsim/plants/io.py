"""Plant parameter files: one ``[family]`` section of SI ``key = value`` lines."""

from __future__ import annotations

from dataclasses import fields
from importlib import resources
from pathlib import Path

from ..kvfile import ConfigError, Entry, as_float, parse_kv
from ..types import PlantFamily
from .models import params_type


def params_from_entries(family: PlantFamily, entries: dict[str, Entry], source: str, base=None):
    cls = params_type(family)
    known = {f.name for f in fields(cls)}
    values = {} if base is None else {f.name: getattr(base, f.name) for f in fields(cls)}
    for key, entry in entries.items():
        if key not in known:
            raise ConfigError(f"{source}:{entry.line}: unknown {family.value} parameter {key!r}")
        values[key] = as_float(entry, key, source)
    try:
        return cls(**values)
    except ValueError as exc:
        line = min((e.line for e in entries.values()), default=0)
        raise ConfigError(f"{source}:{line}: {exc}") from None


def parse_params(text: str, source: str = "<params>"):
    sections = parse_kv(text, source)
    if len(sections) != 1:
        raise ConfigError(f"{source}: expected exactly one [family] section")
    (name, entries), = sections.items()
    try:
        family = PlantFamily.parse(name)
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    return family, params_from_entries(family, entries, source)


def load_params(path: str | Path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read ({exc.strerror})") from exc
    return parse_params(text, str(path))


def default_params_path(family: PlantFamily):
    return resources.files("grcsim.plants") / "data" / f"{family.value}.cfg"


def default_params(family: PlantFamily):
    ref = default_params_path(family)
    return parse_params(ref.read_text(encoding="utf-8"), f"{family.value}.cfg")[1]


def format_params(family: PlantFamily, params) -> str:
    lines = [f"[{family.value}]"]
    lines += [f"{f.name} = {getattr(params, f.name)!r}" for f in fields(params)]
    return "\n".join(lines) + "\n"
