"""Line-oriented ``[section]`` / ``key = value`` files with line-numbered errors.

configparser drops line numbers, which the config error messages need.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Entry:
    value: str
    line: int


def parse_kv(text: str, source: str = "<config>") -> dict[str, dict[str, Entry]]:
    sections: dict[str, dict[str, Entry]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip().lower()
            if not current:
                raise ConfigError(f"{source}:{lineno}: empty section name")
            sections.setdefault(current, {})
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        if current is None:
            raise ConfigError(f"{source}:{lineno}: key outside of any [section]")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}: missing key")
        if key in sections[current]:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r} in [{current}]")
        sections[current][key] = Entry(value, lineno)
    return sections


def read_kv(path: str | Path) -> dict[str, dict[str, Entry]]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read ({exc.strerror})") from exc
    return parse_kv(text, str(path))


def as_float(entry: Entry, key: str, source: str) -> float:
    try:
        return float(entry.value)
    except ValueError:
        raise ConfigError(f"{source}:{entry.line}: {key} expects a number, got {entry.value!r}") from None


def as_int(entry: Entry, key: str, source: str) -> int:
    try:
        return int(entry.value)
    except ValueError:
        raise ConfigError(f"{source}:{entry.line}: {key} expects an integer, got {entry.value!r}") from None


def as_bool(entry: Entry, key: str, source: str) -> bool:
    v = entry.value.lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{source}:{entry.line}: {key} expects true/false, got {entry.value!r}")
