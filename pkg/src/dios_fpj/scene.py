"""Deterministic geometry and large-scale path gains."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import SimConfig

REFRACTIVE = "refractive"
REFLECTIVE = "reflective"


@dataclass(frozen=True)
class PathLossLaw:
    """Log-distance law ``loss_dB = intercept + slope * log10(d)``."""

    intercept_db: float
    slope_db_per_decade: float

    def loss_db(self, d):
        d = np.asarray(d, dtype=float)
        if np.any(d <= 0):
            raise ValueError("path-loss distance must be positive")
        return self.intercept_db + self.slope_db_per_decade * np.log10(d)

    def gain(self, d):
        return path_gain_linear(self, d)


def path_gain_linear(law: PathLossLaw, d):
    """Linear power gain of ``law`` at distance ``d`` (meters, > 0)."""
    out = 10.0 ** (-law.loss_db(d) / 10.0)
    return float(out) if np.ndim(out) == 0 else out


def distance(a, b) -> float:
    return float(np.linalg.norm(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))


@dataclass(frozen=True, eq=False)
class Scene:
    ap_positions: np.ndarray  # (N_A, 3)
    dios_positions: np.ndarray  # (N_D, 3)
    dios_origin: np.ndarray  # (3,)
    lu_positions: np.ndarray  # (K, 3)
    lu_sides: tuple[str, ...]
    wavelength: float

    @property
    def n_a(self) -> int:
        return len(self.ap_positions)

    @property
    def n_d(self) -> int:
        return len(self.dios_positions)

    @property
    def k(self) -> int:
        return len(self.lu_positions)

    @property
    def refractive(self) -> np.ndarray:
        """Indices of refractive-side LUs."""
        return np.array([i for i, s in enumerate(self.lu_sides) if s == REFRACTIVE], dtype=int)

    @property
    def reflective(self) -> np.ndarray:
        return np.array([i for i, s in enumerate(self.lu_sides) if s == REFLECTIVE], dtype=int)

    def antenna_dios_distances(self) -> np.ndarray:
        """``d[n, s]``: distance from AP antenna n to DIOS element s."""
        diff = self.ap_positions[:, None, :] - self.dios_positions[None, :, :]
        return np.linalg.norm(diff, axis=-1)

    def antenna_origin_distances(self) -> np.ndarray:
        return np.linalg.norm(self.ap_positions - self.dios_origin, axis=-1)


def _ula(center: np.ndarray, n: int, spacing: float) -> np.ndarray:
    offsets = (np.arange(n) - (n - 1) / 2.0) * spacing
    pos = np.tile(center, (n, 1))
    pos[:, 0] += offsets
    return pos


def _upa(center: np.ndarray, n: int, spacing: float, plane: str) -> np.ndarray:
    rows = max(1, math.isqrt(n))
    cols = math.ceil(n / rows)
    r, c = np.divmod(np.arange(n), cols)
    u = (c - (cols - 1) / 2.0) * spacing
    v = (r - (rows - 1) / 2.0) * spacing
    axes = {"xz": (0, 2), "yz": (1, 2), "xy": (0, 1)}[plane]
    pos = np.tile(center, (n, 1))
    pos[:, axes[0]] += u
    pos[:, axes[1]] += v
    return pos


def build_scene(config: SimConfig, rng: np.random.Generator) -> Scene:
    """Place the AP ULA, the DIOS panel and the LUs.

    LUs are uniform over the configured disc (height taken from the disc
    center); the first ``k_refractive`` are tagged refractive and the rest
    reflective.
    """
    g = config.geometry
    wavelength = g.wavelength
    if not wavelength > 0:
        raise ValueError("wavelength must be positive")
    if g.lu_radius == 0 and g.k > 1:
        raise ValueError("zero LU radius with more than one LU")

    ap = np.asarray(g.ap_position, dtype=float)
    origin = np.asarray(g.dios_position, dtype=float)
    center = np.asarray(g.lu_center, dtype=float)

    ap_positions = _ula(ap, config.arrays.n_a, wavelength / 2.0)
    dios_positions = _upa(origin, config.arrays.n_d, g.dios_spacing * wavelength, g.dios_plane)

    radius = g.lu_radius * np.sqrt(rng.random(g.k))
    angle = 2.0 * np.pi * rng.random(g.k)
    lu = np.tile(center, (g.k, 1))
    lu[:, 0] += radius * np.cos(angle)
    lu[:, 1] += radius * np.sin(angle)

    sides = (REFRACTIVE,) * g.k_refractive + (REFLECTIVE,) * g.k_reflective
    return Scene(
        ap_positions=ap_positions,
        dios_positions=dios_positions,
        dios_origin=origin,
        lu_positions=lu,
        lu_sides=sides,
        wavelength=wavelength,
    )
