"""Shared configuration for the HTTP service and the CLI (TOML file)."""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import tomli

#: Accept threshold calibrated at the equal-error point of the bundled
#: synthetic corpus (see tests/test_acceptance.py); override per deployment.
DEFAULT_THRESHOLD = 6.1


@dataclass(frozen=True)
class AppConfig:
    data_dir: Path = Path("gesturekit-data")
    default_threshold: float = DEFAULT_THRESHOLD
    rotation_invariant: bool = True
    mse_cutoff_fraction: float = 0.05
    port: int = 8710

    def __post_init__(self):
        object.__setattr__(self, "data_dir", Path(self.data_dir))
        if self.default_threshold <= 0:
            raise ValueError("default_threshold must be positive")
        if not 0.0 < self.mse_cutoff_fraction <= 1.0:
            raise ValueError("mse_cutoff_fraction must be in (0, 1]")
        if not 1 <= self.port <= 65535:
            raise ValueError("port must be a valid TCP port")


_FIELDS = ("data_dir", "default_threshold", "rotation_invariant", "mse_cutoff_fraction", "port")


def load_config(path) -> AppConfig:
    """Load an AppConfig from a TOML file; unknown keys are an error."""
    raw = tomli.loads(Path(path).read_text())
    unknown = set(raw) - set(_FIELDS)
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return replace(AppConfig(), **raw)
