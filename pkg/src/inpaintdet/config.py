"""Run configuration: every tunable of the pipeline in one flat record.

Configuration files are plain ``key = value`` lines; ``#`` starts a comment.
Unknown keys and out-of-range values raise :class:`ConfigError`.
"""

import dataclasses
import math
from dataclasses import dataclass

from .dtcwt.filters import LEVEL1_TABLES, QSHIFT_TABLES
from .errors import ConfigError


@dataclass(frozen=True)
class RunConfig:
    # scattering
    levels: int = 2
    smoothing: float = None
    include_order2: bool = True
    level1_filter: str = "near_sym_b"
    qshift_filter: str = "qshift_b"
    # segmentation
    slic_count: int = 32
    compactness: float = 10.0
    merge_threshold: float = 12.0
    min_segment_fraction: float = 0.1
    seed: int = 0
    # noise
    grid_rows: int = 8
    grid_cols: int = 8
    min_cell_count: int = 16
    flag_k: float = 2.5
    # fusion
    t_none: float = 0.01
    t_full: float = 0.95
    keep_full: bool = True
    keep_unsegmented: bool = True
    # masks and metrics
    threshold: float = 0.5
    image_fraction: float = 0.001
    # baseline candidate provider
    baseline_radius: int = 4
    baseline_z: float = 3.0

    def __post_init__(self):
        _check(self.levels >= 1, "levels", self.levels, ">= 1")
        _check(self.smoothing is None or self.smoothing > 0, "smoothing", self.smoothing, "> 0")
        _check(self.level1_filter in LEVEL1_TABLES, "level1_filter", self.level1_filter,
               f"one of {sorted(LEVEL1_TABLES)}")
        _check(self.qshift_filter in QSHIFT_TABLES, "qshift_filter", self.qshift_filter,
               f"one of {sorted(QSHIFT_TABLES)}")
        _check(self.slic_count >= 1, "slic_count", self.slic_count, ">= 1")
        _check(self.compactness > 0, "compactness", self.compactness, "> 0")
        _check(self.merge_threshold >= 0, "merge_threshold", self.merge_threshold, ">= 0")
        _check(
            0 <= self.min_segment_fraction <= 1,
            "min_segment_fraction",
            self.min_segment_fraction,
            "in [0, 1]",
        )
        _check(self.grid_rows >= 1, "grid_rows", self.grid_rows, ">= 1")
        _check(self.grid_cols >= 1, "grid_cols", self.grid_cols, ">= 1")
        _check(self.min_cell_count >= 2, "min_cell_count", self.min_cell_count, ">= 2")
        _check(self.flag_k > 0, "flag_k", self.flag_k, "> 0")
        _check(
            0 <= self.t_none < self.t_full <= 1,
            "t_none/t_full",
            (self.t_none, self.t_full),
            "0 <= t_none < t_full <= 1",
        )
        _check(0 <= self.threshold <= 1, "threshold", self.threshold, "in [0, 1]")
        _check(0 <= self.image_fraction <= 1, "image_fraction", self.image_fraction, "in [0, 1]")
        _check(self.baseline_radius >= 0, "baseline_radius", self.baseline_radius, ">= 0")
        _check(math.isfinite(self.baseline_z), "baseline_z", self.baseline_z, "finite")

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    def as_dict(self):
        return dataclasses.asdict(self)

    def scattering(self):
        from .scattering import ScatteringConfig

        return ScatteringConfig(self.levels, self.smoothing, self.include_order2)

    def grid(self):
        from .noise import PatchGrid

        return PatchGrid(self.grid_rows, self.grid_cols, self.min_cell_count)

    def filter_bank(self):
        from .dtcwt import build_filter_bank

        return build_filter_bank(self.level1_filter, self.qshift_filter)


def _check(ok, key, value, rule):
    if not ok:
        raise ConfigError(f"config value {key}={value!r} must be {rule}")


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}
_TYPES = {
    "levels": int,
    "smoothing": float,
    "include_order2": bool,
    "level1_filter": str,
    "qshift_filter": str,
    "slic_count": int,
    "compactness": float,
    "merge_threshold": float,
    "min_segment_fraction": float,
    "seed": int,
    "grid_rows": int,
    "grid_cols": int,
    "min_cell_count": int,
    "flag_k": float,
    "t_none": float,
    "t_full": float,
    "keep_full": bool,
    "keep_unsegmented": bool,
    "threshold": float,
    "image_fraction": float,
    "baseline_radius": int,
    "baseline_z": float,
}


def parse_value(key, text):
    """Convert the string ``text`` into the type of config field ``key``."""
    if key not in _FIELDS:
        raise ConfigError(f"unknown config key {key!r}")
    kind = _TYPES[key]
    text = text.strip()
    if key == "smoothing" and text.lower() in ("", "none", "default"):
        return None
    try:
        if kind is bool:
            low = text.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if kind is int:
            return int(text)
        if kind is float:
            value = float(text)
            if math.isnan(value):
                raise ValueError(text)
            return value
        return text
    except ValueError:
        raise ConfigError(f"config key {key!r} expects {kind.__name__}, got {text!r}") from None


def parse_config_text(text, source="<config>"):
    """Parse ``key = value`` lines into a dict of typed values."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            values[key] = parse_value(key, value)
        except ConfigError as exc:
            raise ConfigError(f"{source}:{lineno}: {exc}") from None
    return values


def load_config(path=None, overrides=()):
    """Defaults, then the file at ``path``, then ``key=value`` overrides."""
    values = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            values.update(parse_config_text(fh.read(), str(path)))
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must be key=value, got {item!r}")
        key, value = item.split("=", 1)
        values[key.strip()] = parse_value(key.strip(), value)
    return RunConfig(**values)


def format_config(cfg):
    """Render ``cfg`` in the file format read by :func:`load_config`."""
    return "".join(f"{k} = {_format_value(v)}\n" for k, v in cfg.as_dict().items())


def _format_value(value):
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)
