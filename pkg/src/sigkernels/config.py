"""Kernel/run configuration: validation, fingerprints, and the config file format.

A run is configured by a flat key-value text file with section headers
mirrored one-to-one by CLI flags (flags override the file):

    [kernel]
    family = "rbf"          # linear | rbf | exponential
    bandwidth = 1.0
    scale = 1.0
    method = "dp"           # dp (exact truncated) | pde (untruncated)
    level = 4               # truncation, dp only
    dyadic_order = 3        # refinement, pde only
    normalize = false
    norm_C = 4.0
    norm_alpha = 1.0
    level_weights = [1.0, 1.0, 0.5]

    [preprocess]
    subsample = 1
    standardize = false
    lead_lag = false
    add_time = 1.0          # omit to skip time augmentation

    [run]
    workers = 1
    seed = 0

Hyperparameter grids are JSONL files: one JSON object per line, each a flat
overlay of [kernel] keys on top of the base configuration.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ConfigError, DataError
from .normalization import NormalizationParams
from .static_kernels import FAMILIES, StaticKernelSpec

__all__ = [
    "KernelConfig",
    "PreprocessConfig",
    "RunConfig",
    "parse_config_file",
    "load_run_config",
    "load_grid",
    "canonical_json",
]

METHODS = ("dp", "pde")

_KERNEL_KEYS = {
    "family": str,
    "bandwidth": float,
    "scale": float,
    "method": str,
    "level": int,
    "dyadic_order": int,
    "normalize": bool,
    "norm_C": float,
    "norm_alpha": float,
    "level_weights": list,
}
_PREPROCESS_KEYS = {
    "subsample": int,
    "standardize": bool,
    "lead_lag": bool,
    "add_time": float,
}
_RUN_KEYS = {"workers": int, "seed": int}


@dataclass(frozen=True)
class KernelConfig:
    """Fully resolved sequence-kernel configuration."""

    family: str = "linear"
    bandwidth: float = 1.0
    scale: float = 1.0
    method: str = "dp"
    level: int = 4
    dyadic_order: int = 3
    normalize: bool = False
    norm_C: float = 4.0
    norm_alpha: float = 1.0
    level_weights: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        self.static_spec()  # validates family/bandwidth/scale
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.method == "dp" and self.level < 0:
            raise ConfigError(f"level must be >= 0, got {self.level}")
        if self.method == "pde" and self.dyadic_order < 0:
            raise ConfigError(f"dyadic_order must be >= 0, got {self.dyadic_order}")
        if self.normalize:
            if self.method != "dp":
                raise ConfigError("normalization needs per-level values: use method = dp")
            self.norm_params()
        if self.level_weights is not None:
            if self.method != "dp":
                raise ConfigError("level weights only apply to method = dp")
            w = tuple(float(v) for v in self.level_weights)
            if len(w) != self.level + 1:
                raise ConfigError(
                    f"level_weights needs level+1 = {self.level + 1} entries, got {len(w)}"
                )
            if any(v < 0 for v in w):
                raise ConfigError("level weights must be non-negative")
            if w[0] != 1.0:
                raise ConfigError("level_weights[0] must be 1")
            object.__setattr__(self, "level_weights", w)

    def static_spec(self) -> StaticKernelSpec:
        return StaticKernelSpec(self.family, self.bandwidth, self.scale)

    def norm_params(self) -> NormalizationParams:
        return NormalizationParams(self.norm_C, self.norm_alpha)

    def to_dict(self) -> dict:
        d = {
            "family": self.family,
            "scale": self.scale,
            "method": self.method,
            "normalize": self.normalize,
        }
        if self.family != "linear":
            d["bandwidth"] = self.bandwidth
        if self.method == "dp":
            d["level"] = self.level
            if self.level_weights is not None:
                d["level_weights"] = list(self.level_weights)
        else:
            d["dyadic_order"] = self.dyadic_order
        if self.normalize:
            d["norm_C"] = self.norm_C
            d["norm_alpha"] = self.norm_alpha
        return d

    def overlay(self, updates: dict) -> "KernelConfig":
        unknown = set(updates) - set(_KERNEL_KEYS)
        if unknown:
            raise ConfigError(f"unknown kernel config keys: {sorted(unknown)}")
        fields = {k: _coerce(k, v, _KERNEL_KEYS[k]) for k, v in updates.items()}
        if "level_weights" in fields and fields["level_weights"] is not None:
            fields["level_weights"] = tuple(float(v) for v in fields["level_weights"])
        return replace(self, **fields)

    def fingerprint(self) -> str:
        return hashlib.sha256(canonical_json(self.to_dict()).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class PreprocessConfig:
    """Sequence preprocessing pipeline.

    Steps are applied in a fixed order: subsample, standardize, lead_lag,
    add_time (so the time channel is neither standardized nor lagged).
    """

    subsample: int = 1
    standardize: bool = False
    lead_lag: bool = False
    add_time: float | None = None

    def __post_init__(self) -> None:
        if self.subsample < 1:
            raise ConfigError(f"subsample stride must be >= 1, got {self.subsample}")
        if self.add_time is not None and not self.add_time > 0:
            raise ConfigError(f"add_time scale must be > 0, got {self.add_time}")

    def to_dict(self) -> dict:
        return {
            "subsample": self.subsample,
            "standardize": self.standardize,
            "lead_lag": self.lead_lag,
            "add_time": self.add_time,
        }


@dataclass(frozen=True)
class RunConfig:
    kernel: KernelConfig = field(default_factory=KernelConfig)
    preprocess: PreprocessConfig = field(default_factory=PreprocessConfig)
    workers: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")

    def to_dict(self) -> dict:
        # workers is an execution detail that never changes results, so it is
        # kept out of reports: identical configs must serialize identically
        # regardless of how much parallelism ran them.
        return {
            "kernel": self.kernel.to_dict(),
            "preprocess": self.preprocess.to_dict(),
            "seed": self.seed,
        }


def canonical_json(obj) -> str:
    """Stable-key-order JSON used for fingerprints and reports."""
    return json.dumps(obj, sort_keys=True, ensure_ascii=False)


def _coerce(key: str, value, target: type):
    if value is None:
        return None
    if target is bool:
        if isinstance(value, bool):
            return value
        raise ConfigError(f"{key} must be a boolean, got {value!r}")
    if target is int:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key} must be an integer, got {value!r}")
        if isinstance(value, float) and not value.is_integer():
            raise ConfigError(f"{key} must be an integer, got {value!r}")
        return int(value)
    if target is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key} must be a number, got {value!r}")
        return float(value)
    if target is list:
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{key} must be a list, got {value!r}")
        return list(value)
    if target is str:
        if not isinstance(value, str):
            raise ConfigError(f"{key} must be a string, got {value!r}")
        return value
    raise ConfigError(f"unsupported config key {key}")


def _parse_scalar(raw: str, where: str):
    raw = raw.strip()
    if not raw:
        raise ConfigError(f"{where}: empty value")
    if raw.startswith('"') and raw.endswith('"') and len(raw) >= 2:
        return raw[1:-1]
    if raw == "true":
        return True
    if raw == "false":
        return False
    if raw.startswith("[") and raw.endswith("]"):
        inner = raw[1:-1].strip()
        if not inner:
            return []
        return [_parse_scalar(part, where) for part in inner.split(",")]
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{where}: cannot parse value {raw!r}") from None


def parse_config_file(path: str | Path) -> dict[str, dict]:
    """Parse the flat sectioned key-value format into {section: {key: value}}."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    sections: dict[str, dict] = {}
    current: str | None = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        where = f"{path}:{lineno}"
        if stripped.startswith("[") and stripped.endswith("]"):
            current = stripped[1:-1].strip()
            if current not in ("kernel", "preprocess", "run"):
                raise ConfigError(f"{where}: unknown section [{current}]")
            sections.setdefault(current, {})
            continue
        if "=" not in stripped:
            raise ConfigError(f"{where}: expected key = value")
        if current is None:
            raise ConfigError(f"{where}: key outside of a [section]")
        key, _, raw = stripped.partition("=")
        sections[current][key.strip()] = _parse_scalar(raw, where)
    return sections


def build_run_config(sections: dict[str, dict]) -> RunConfig:
    """Build and validate a RunConfig from parsed {section: {key: value}} data."""
    known = {"kernel": _KERNEL_KEYS, "preprocess": _PREPROCESS_KEYS, "run": _RUN_KEYS}
    for section, keys in sections.items():
        if section not in known:
            raise ConfigError(f"unknown config section [{section}]")
        unknown = set(keys) - set(known[section])
        if unknown:
            raise ConfigError(f"unknown keys in [{section}]: {sorted(unknown)}")
    kernel = KernelConfig().overlay(sections.get("kernel", {}))
    pp = {
        k: _coerce(k, v, _PREPROCESS_KEYS[k]) for k, v in sections.get("preprocess", {}).items()
    }
    run = {k: _coerce(k, v, _RUN_KEYS[k]) for k, v in sections.get("run", {}).items()}
    return RunConfig(kernel=kernel, preprocess=PreprocessConfig(**pp), **run)


def load_run_config(path: str | Path | None, overrides: dict[str, dict] | None = None) -> RunConfig:
    """Config file plus per-section flag overrides (overrides win)."""
    sections = parse_config_file(path) if path is not None else {}
    for section, keys in (overrides or {}).items():
        dst = sections.setdefault(section, {})
        dst.update({k: v for k, v in keys.items() if v is not None})
    return build_run_config(sections)


def load_grid(path: str | Path, base: KernelConfig) -> list[KernelConfig]:
    """Load a JSONL hyperparameter grid; each line overlays the base config."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read grid file {path}: {exc}") from exc
    configs: list[KernelConfig] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            overlay = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
        if not isinstance(overlay, dict):
            raise DataError(f"{path}:{lineno}: grid line must be a JSON object")
        configs.append(base.overlay(overlay))
    if not configs:
        raise DataError(f"grid file {path} contains no configurations")
    return configs
