"""Experiment configuration and its YAML front end.

All powers are given in dBm at this interface and converted to watts by the
helpers below; every other module works in watts and linear gains.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Any

import yaml

SPEED_OF_LIGHT = 299_792_458.0


class ConfigError(ValueError):
    """Invalid or inconsistent configuration document."""


def dbm_to_watts(dbm):
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts):
    return 10.0 * math.log10(watts) + 30.0


@dataclass(frozen=True)
class LevelSpec:
    """One row of a DIOS coefficient table (phases in radians)."""

    refr_phase: float
    refr_amp: float
    refl_phase: float
    refl_amp: float
    prob: float


# One-bit variable-amplitude surface used throughout the evaluation.
DEFAULT_LEVELS = (
    LevelSpec(refr_phase=5 * math.pi / 3, refr_amp=0.78, refl_phase=math.pi / 9, refl_amp=0.62, prob=0.25),
    LevelSpec(refr_phase=2 * math.pi / 3, refr_amp=0.82, refl_phase=7 * math.pi / 6, refl_amp=0.57, prob=0.75),
)


@dataclass(frozen=True)
class GeometryConfig:
    ap_position: tuple[float, float, float] = (0.0, 0.0, 10.0)
    dios_position: tuple[float, float, float] = (2.0, 2.0, 8.0)
    lu_center: tuple[float, float, float] = (0.0, 180.0, 0.0)
    lu_radius: float = 20.0
    k_refractive: int = 12
    k_reflective: int = 12
    carrier_hz: float = 3.5e9
    # Plane containing the DIOS panel; "xz" faces the +y LU region.
    dios_plane: str = "xz"
    # Element pitch in wavelengths.
    dios_spacing: float = 0.5

    @property
    def k(self) -> int:
        return self.k_refractive + self.k_reflective

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz


@dataclass(frozen=True)
class ArraysConfig:
    n_a: int = 128
    n_d: int = 2048
    bits: int = 1


@dataclass(frozen=True)
class ChannelConfig:
    rician_factor: float = 3.0
    los_only: bool = False
    g_law: tuple[float, float] = (35.6, 22.0)
    lu_law: tuple[float, float] = (32.6, 36.7)
    bandwidth_hz: float = 180e3
    noise_psd_dbm_hz: float = -170.0
    cond_cap: float = 1e12

    @property
    def noise_dbm(self) -> float:
        return self.noise_psd_dbm_hz + 10.0 * math.log10(self.bandwidth_hz)

    @property
    def noise_watts(self) -> float:
        return dbm_to_watts(self.noise_dbm)


@dataclass(frozen=True)
class DiosConfig:
    levels: tuple[LevelSpec, ...] = DEFAULT_LEVELS


@dataclass(frozen=True)
class ScheduleConfig:
    slots: int = 6
    n_blocks: int = 500
    max_resamples: int = 10


@dataclass(frozen=True)
class PowerConfig:
    per_lu_dbm: tuple[float, ...] = (0.0, 5.0, 10.0, 15.0, 20.0)
    jammer_dbm: float = 5.0
    # Operating point used by the non-power sweeps.
    fixed_per_lu_dbm: float = 10.0


@dataclass(frozen=True)
class SweepConfig:
    nd_grid: tuple[int, ...] = (256, 512, 1024, 2048, 4096)
    na_grid: tuple[int, ...] = (32, 64, 128, 256)
    k_grid: tuple[int, ...] = (8, 16, 24, 32)
    nd_per_antenna: int = 16


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    output: str = "results.csv"
    workers: int = 1


@dataclass(frozen=True)
class SimConfig:
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    arrays: ArraysConfig = field(default_factory=ArraysConfig)
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    dios: DiosConfig = field(default_factory=DiosConfig)
    schedule: ScheduleConfig = field(default_factory=ScheduleConfig)
    power: PowerConfig = field(default_factory=PowerConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    run: RunConfig = field(default_factory=RunConfig)

    @property
    def k(self) -> int:
        return self.geometry.k

    def replace(self, **sections: dict[str, Any]) -> "SimConfig":
        """Return a copy with fields of the named sections overridden.

        >>> cfg = SimConfig().replace(arrays={"n_d": 1024})
        >>> cfg.arrays.n_d
        1024
        """
        updates = {}
        for name, values in sections.items():
            updates[name] = dataclasses.replace(getattr(self, name), **values)
        cfg = dataclasses.replace(self, **updates)
        validate(cfg)
        return cfg


def default_config() -> SimConfig:
    return SimConfig()


def validate(cfg: SimConfig) -> None:
    g, a = cfg.geometry, cfg.arrays
    if g.k_refractive < 0 or g.k_reflective < 0 or g.k < 1:
        raise ConfigError("geometry: need at least one LU and non-negative side counts")
    if g.carrier_hz <= 0:
        raise ConfigError("geometry.carrier_hz must be positive")
    if g.lu_radius < 0:
        raise ConfigError("geometry.lu_radius must be non-negative")
    if g.lu_radius == 0 and g.k > 1:
        raise ConfigError("geometry.lu_radius is zero but more than one LU requested")
    if g.dios_plane not in ("xz", "yz", "xy"):
        raise ConfigError(f"geometry.dios_plane must be xz, yz or xy, got {g.dios_plane!r}")
    if g.dios_spacing <= 0:
        raise ConfigError("geometry.dios_spacing must be positive")
    if a.n_a <= g.k:
        raise ConfigError(f"arrays.n_a ({a.n_a}) must exceed the number of LUs ({g.k})")
    if a.n_d < 1:
        raise ConfigError("arrays.n_d must be at least 1")
    if len(cfg.dios.levels) != 2 ** a.bits:
        raise ConfigError(f"dios.levels has {len(cfg.dios.levels)} entries, expected 2**bits = {2 ** a.bits}")
    if cfg.schedule.slots < 1 or cfg.schedule.n_blocks < 1:
        raise ConfigError("schedule.slots and schedule.n_blocks must be >= 1")
    if cfg.channel.rician_factor < 0 or not math.isfinite(cfg.channel.rician_factor):
        raise ConfigError("channel.rician_factor must be finite and >= 0")
    if cfg.channel.bandwidth_hz <= 0:
        raise ConfigError("channel.bandwidth_hz must be positive")
    if not cfg.power.per_lu_dbm:
        raise ConfigError("power.per_lu_dbm must not be empty")
    if cfg.run.workers < 1:
        raise ConfigError("run.workers must be >= 1")


_SECTION_TYPES = {
    "geometry": GeometryConfig,
    "arrays": ArraysConfig,
    "channel": ChannelConfig,
    "dios": DiosConfig,
    "schedule": ScheduleConfig,
    "power": PowerConfig,
    "sweep": SweepConfig,
    "run": RunConfig,
}
_LEVEL_KEYS = {f.name for f in dataclasses.fields(LevelSpec)}


def _line(node: yaml.Node) -> int:
    return node.start_mark.line + 1


def _coerce(section: str, key: str, value: Any, default: Any, line: int) -> Any:
    where = f"line {line}: {section}.{key}"
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected a boolean")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer")
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}: expected a number")
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"{where}: expected a string")
        return value
    if isinstance(default, tuple):
        if not isinstance(value, list):
            raise ConfigError(f"{where}: expected a list")
        if default and isinstance(default[0], int) and not isinstance(default[0], bool):
            if not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
                raise ConfigError(f"{where}: expected a list of integers")
            return tuple(value)
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
            raise ConfigError(f"{where}: expected a list of numbers")
        if len(default) in (2, 3) and len(value) != len(default) and key != "per_lu_dbm":
            raise ConfigError(f"{where}: expected {len(default)} values")
        return tuple(float(v) for v in value)
    raise ConfigError(f"{where}: unsupported value")


def _parse_levels(node: yaml.Node) -> tuple[LevelSpec, ...]:
    if not isinstance(node, yaml.SequenceNode):
        raise ConfigError(f"line {_line(node)}: dios.levels: expected a list of mappings")
    levels = []
    for item in node.value:
        if not isinstance(item, yaml.MappingNode):
            raise ConfigError(f"line {_line(item)}: dios.levels: expected a mapping")
        values = {}
        for knode, vnode in item.value:
            if knode.value not in _LEVEL_KEYS:
                raise ConfigError(f"line {_line(knode)}: dios.levels: unknown key {knode.value!r}")
            v = yaml.safe_load(yaml.serialize(vnode))
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigError(f"line {_line(vnode)}: dios.levels.{knode.value}: expected a number")
            values[knode.value] = float(v)
        missing = _LEVEL_KEYS - values.keys()
        if missing:
            raise ConfigError(f"line {_line(item)}: dios.levels: missing {sorted(missing)}")
        levels.append(LevelSpec(**values))
    return tuple(levels)


def parse_config(text: str, base: SimConfig | None = None) -> SimConfig:
    """Parse a YAML document into a validated :class:`SimConfig`.

    Omitted keys keep the values of ``base`` (the default preset when
    ``base`` is None). Unknown keys and type errors are reported with the
    1-based line number of the offending key.
    """
    cfg = base if base is not None else default_config()
    try:
        root = yaml.compose(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed document: {exc}") from exc
    if root is None:
        validate(cfg)
        return cfg
    if not isinstance(root, yaml.MappingNode):
        raise ConfigError(f"line {_line(root)}: top level must be a mapping")

    k_total = None
    k_line = 0
    for snode, body in root.value:
        section = snode.value
        if section not in _SECTION_TYPES:
            raise ConfigError(f"line {_line(snode)}: unknown section {section!r}")
        if not isinstance(body, yaml.MappingNode):
            raise ConfigError(f"line {_line(body)}: section {section!r} must be a mapping")
        current = getattr(cfg, section)
        defaults = {f.name: getattr(current, f.name) for f in dataclasses.fields(current)}
        updates: dict[str, Any] = {}
        for knode, vnode in body.value:
            key = knode.value
            if section == "geometry" and key == "k":
                k_total = yaml.safe_load(yaml.serialize(vnode))
                k_line = _line(knode)
                if isinstance(k_total, bool) or not isinstance(k_total, int):
                    raise ConfigError(f"line {k_line}: geometry.k: expected an integer")
                continue
            if section == "dios" and key == "levels":
                updates[key] = _parse_levels(vnode)
                continue
            if key not in defaults:
                raise ConfigError(f"line {_line(knode)}: unknown key {section}.{key}")
            value = yaml.safe_load(yaml.serialize(vnode))
            updates[key] = _coerce(section, key, value, defaults[key], _line(knode))
        cfg = dataclasses.replace(cfg, **{section: dataclasses.replace(current, **updates)})

    if k_total is not None and k_total != cfg.geometry.k:
        raise ConfigError(
            f"line {k_line}: geometry.k = {k_total} but k_refractive + k_reflective = {cfg.geometry.k}"
        )
    validate(cfg)
    return cfg


def load_config(path: str | None) -> SimConfig:
    if path is None:
        return default_config()
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
