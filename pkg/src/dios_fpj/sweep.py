"""Parameter sweeps behind the evaluation figures, and their CSV form."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .analysis import BoundInputs, theorem1_bounds, theorem2_bounds
from .config import SimConfig, dbm_to_watts
from .dios import DiosKind, make_model, mu
from .engine import Scheme, rates_from_terms, simulate_blocks
from .fading import PathLossLaws, large_scale_gains
from .scene import REFLECTIVE, REFRACTIVE, Scene, build_scene

CSV_HEADER = ("scheme", "axis", "axis_value", "side", "rate_per_lu_bits", "ci_halfwidth", "bound_bits")

THEOREM1 = "theorem1"
THEOREM2 = "theorem2"
# Benchmark order of the power-sweep figure.
ALL_SCHEMES = ("no_jamming", "dios_ca", THEOREM1, "dios_va", THEOREM2, "dris", "aj")
SIDES = (REFRACTIVE, REFLECTIVE)


class Axis(enum.Enum):
    POWER = "power"
    DIOS_ELEMENTS = "dios_elements"
    ANTENNAS = "antennas"
    USERS = "users"
    ANTENNAS_ND16 = "antennas_nd16"


FIGURES = {
    "fig2": Axis.POWER,
    "fig3": Axis.DIOS_ELEMENTS,
    "fig4": Axis.ANTENNAS,
    "fig5": Axis.ANTENNAS_ND16,
    "fig6": Axis.USERS,
}


@dataclass(frozen=True)
class SweepRow:
    scheme: str
    axis: str
    axis_value: float
    side: str
    rate_per_lu: float
    ci_halfwidth: float
    bound: float | None = None


@dataclass
class SweepResult:
    rows: list[SweepRow] = field(default_factory=list)

    def select(self, scheme: str, side: str) -> list[SweepRow]:
        return sorted((r for r in self.rows if r.scheme == scheme and r.side == side),
                      key=lambda r: r.axis_value)

    def value(self, scheme: str, side: str, axis_value: float) -> SweepRow:
        for r in self.rows:
            if r.scheme == scheme and r.side == side and r.axis_value == axis_value:
                return r
        raise KeyError((scheme, side, axis_value))


def scene_seed(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0,)))


def axis_points(config: SimConfig, axis: Axis) -> list[tuple[float, SimConfig]]:
    """Grid values along ``axis`` and the config each one implies."""
    if axis is Axis.POWER:
        return [(float(v), config) for v in config.power.per_lu_dbm]
    if axis is Axis.DIOS_ELEMENTS:
        return [(float(n), config.replace(arrays={"n_d": n})) for n in config.sweep.nd_grid]
    if axis is Axis.ANTENNAS:
        return [(float(n), config.replace(arrays={"n_a": n})) for n in config.sweep.na_grid]
    if axis is Axis.ANTENNAS_ND16:
        factor = config.sweep.nd_per_antenna
        return [(float(n), config.replace(arrays={"n_a": n, "n_d": factor * n}))
                for n in config.sweep.na_grid]
    if axis is Axis.USERS:
        return [(float(k), config.replace(geometry={"k_refractive": k // 2, "k_reflective": k - k // 2}))
                for k in config.sweep.k_grid]
    raise ValueError(axis)


def _bounds(scene: Scene, cfg: SimConfig, p0: float) -> dict[str, dict[str, float]]:
    large = large_scale_gains(scene, PathLossLaws.from_config(cfg))
    va_mu = mu(make_model(DiosKind.VARIABLE_AMPLITUDE, cfg.dios.levels))
    inp = BoundInputs.from_large_scale(large, scene.lu_sides, p0=p0, n_a=scene.n_a,
                                       n_d=scene.n_d, noise=cfg.channel.noise_watts, mu=va_mu)
    out = {}
    for name, bounds in ((THEOREM1, theorem1_bounds(inp)), (THEOREM2, theorem2_bounds(inp))):
        out[name] = {}
        for side in SIDES:
            n_side = sum(s == side for s in scene.lu_sides)
            total = bounds.refractive if side == REFRACTIVE else bounds.reflective
            out[name][side] = total / n_side if n_side else math.nan
    return out


_BOUND_FOR = {"dios_ca": THEOREM1, "dios_va": THEOREM2}


def run_sweep(config: SimConfig, axis: Axis | str, schemes: Sequence[str] = ALL_SCHEMES,
              seed: int | None = None, n_blocks: int | None = None,
              workers: int | None = None) -> SweepResult:
    """Monte Carlo rates (and closed-form bounds) along one sweep axis.

    Every scheme at every grid point reuses the same master seed, so the
    schemes see common channel realisations and their differences carry
    less Monte Carlo noise.
    """
    axis = Axis(axis)
    seed = config.run.seed if seed is None else seed
    for s in schemes:
        if s not in ALL_SCHEMES:
            raise ValueError(f"unknown scheme {s!r}")
    mc_schemes = [s for s in schemes if s not in (THEOREM1, THEOREM2)]
    result = SweepResult()

    if axis is Axis.POWER:
        scene = build_scene(config, scene_seed(seed))
        terms = {s: simulate_blocks(scene, Scheme.from_name(s, config), config, seed=seed,
                                    n_blocks=n_blocks, workers=workers) for s in mc_schemes}
        jobs = [(v, config, scene, terms, dbm_to_watts(v)) for v, _ in axis_points(config, axis)]
    else:
        jobs = []
        per_lu_w = dbm_to_watts(config.power.fixed_per_lu_dbm)
        for v, cfg in axis_points(config, axis):
            scene = build_scene(cfg, scene_seed(seed))
            terms = {s: simulate_blocks(scene, Scheme.from_name(s, cfg), cfg, seed=seed,
                                        n_blocks=n_blocks, workers=workers) for s in mc_schemes}
            jobs.append((v, cfg, scene, terms, per_lu_w))

    for value, cfg, scene, terms, per_lu_w in jobs:
        p0 = scene.k * per_lu_w
        bounds = _bounds(scene, cfg, p0)
        for name in schemes:
            for side in SIDES:
                n_side = sum(s == side for s in scene.lu_sides)
                if name in (THEOREM1, THEOREM2):
                    b = bounds[name][side]
                    result.rows.append(SweepRow(name, axis.value, value, side, b, 0.0, b))
                    continue
                scheme = Scheme.from_name(name, cfg)
                report = rates_from_terms(terms[name], p0, cfg.channel.noise_watts, scheme.jammer_power)
                bound = bounds[_BOUND_FOR[name]][side] if name in _BOUND_FOR else None
                ci = report.ci_halfwidth[side] / n_side if n_side else math.nan
                result.rows.append(SweepRow(name, axis.value, value, side, report.per_lu(side), ci, bound))
    return result


def closed_form_sweep(config: SimConfig, seed: int | None = None) -> SweepResult:
    """Theorem bounds over the power grid, no Monte Carlo."""
    seed = config.run.seed if seed is None else seed
    scene = build_scene(config, scene_seed(seed))
    result = SweepResult()
    for v in config.power.per_lu_dbm:
        bounds = _bounds(scene, config, scene.k * dbm_to_watts(v))
        for name in (THEOREM1, THEOREM2):
            for side in SIDES:
                b = bounds[name][side]
                result.rows.append(SweepRow(name, Axis.POWER.value, float(v), side, b, 0.0, b))
    return result


def _fmt(x: float | None) -> str:
    if x is None:
        return ""
    return f"{x:.6g}"


def emit_csv(result: SweepResult | Iterable[SweepRow], path) -> None:
    """Write rows as UTF-8 CSV with LF line endings and 6 significant digits."""
    rows = result.rows if isinstance(result, SweepResult) else list(result)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in rows:
            writer.writerow([r.scheme, r.axis, _fmt(r.axis_value), r.side, _fmt(r.rate_per_lu),
                             _fmt(r.ci_halfwidth), _fmt(r.bound)])
