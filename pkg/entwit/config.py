"""Runtime settings read from the environment (and an optional .env file)"""

import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, TypeVar

from dotenv import load_dotenv

from .exceptions import ConfigError

T = TypeVar("T")

DEFAULT_DENSE_GATE = 14
DEFAULT_DENSITY_GATE = 10
DEFAULT_ENUM_GATE = 14
DEFAULT_Z_THRESHOLD = 3.0
DEFAULT_SHOTS = 10_000
DEFAULT_RAW_CAP = 1_000_000


def _read(name: str, cast: Callable[[str], T], default: T) -> T:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return cast(raw.strip())
    except ValueError as e:
        raise ConfigError(f"Invalid value for {name}: {raw!r}") from e


@dataclass(frozen=True)
class Settings:
    threads: int = 1
    dense_gate: int = DEFAULT_DENSE_GATE
    density_gate: int = DEFAULT_DENSITY_GATE
    enum_gate: int = DEFAULT_ENUM_GATE
    z_threshold: float = DEFAULT_Z_THRESHOLD
    shots: int = DEFAULT_SHOTS
    raw_cap: int = DEFAULT_RAW_CAP
    log_dir: Path = Path.home() / ".entwit" / "logs"

    def __post_init__(self):
        for name in ("threads", "dense_gate", "density_gate", "enum_gate", "shots", "raw_cap"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.z_threshold < 0:
            raise ConfigError(f"z_threshold must be non-negative, got {self.z_threshold}")

    @classmethod
    def from_env(cls) -> "Settings":
        """Build settings from ENTWIT_* variables, loading .env first"""
        load_dotenv()
        defaults = cls()
        return cls(
            threads=_read("ENTWIT_THREADS", int, defaults.threads),
            dense_gate=_read("ENTWIT_DENSE_GATE", int, defaults.dense_gate),
            density_gate=_read("ENTWIT_DENSITY_GATE", int, defaults.density_gate),
            enum_gate=_read("ENTWIT_ENUM_GATE", int, defaults.enum_gate),
            z_threshold=_read("ENTWIT_Z_THRESHOLD", float, defaults.z_threshold),
            shots=_read("ENTWIT_SHOTS", int, defaults.shots),
            raw_cap=_read("ENTWIT_RAW_CAP", int, defaults.raw_cap),
            log_dir=_read("ENTWIT_LOG_DIR", Path, defaults.log_dir),
        )

    def with_overrides(self, **changes) -> "Settings":
        """Return a copy with the non-None keyword values applied"""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})
