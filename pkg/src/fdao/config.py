"""``key = value`` text files with ``#`` comments, used for run configs and plans."""
from __future__ import annotations

import hashlib
from pathlib import Path


class ConfigError(ValueError):
    pass


def parse_kv(text: str, source: str = "<config>") -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        if key in out:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def read_kv(path) -> dict[str, str]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    return parse_kv(text, str(path))


def config_hash(kv: dict[str, str]) -> str:
    canon = "\n".join(f"{k}={kv[k]}" for k in sorted(kv))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def get_float(kv: dict[str, str], key: str, default: float | None = None) -> float:
    if key not in kv:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return float(kv[key])
    except ValueError:
        raise ConfigError(f"key {key!r}: {kv[key]!r} is not a number") from None


def get_int(kv: dict[str, str], key: str, default: int | None = None) -> int:
    if key not in kv:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return int(kv[key])
    except ValueError:
        raise ConfigError(f"key {key!r}: {kv[key]!r} is not an integer") from None


def get_params(kv: dict[str, str], prefix: str, names) -> tuple[float, ...]:
    return tuple(get_float(kv, f"{prefix}.{name}") for name in names)


def get_list(kv: dict[str, str], key: str) -> list[float]:
    try:
        return [float(s) for s in kv[key].replace(",", " ").split()]
    except ValueError:
        raise ConfigError(f"key {key!r}: {kv[key]!r} is not a list of numbers") from None
