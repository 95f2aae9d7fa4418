"""Small-scale fading and per-block channel assembly."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import SimConfig
from .scene import PathLossLaw, Scene, path_gain_linear


@dataclass(frozen=True)
class RicianSpec:
    rician_factor: float = 3.0
    los_only: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.rician_factor) and self.rician_factor >= 0):
            raise ValueError("Rician factor must be finite and non-negative")

    @property
    def los_weight(self) -> float:
        if self.los_only:
            return 1.0
        return math.sqrt(self.rician_factor / (1.0 + self.rician_factor))

    @property
    def nlos_weight(self) -> float:
        if self.los_only:
            return 0.0
        return math.sqrt(1.0 / (1.0 + self.rician_factor))


@dataclass(frozen=True)
class PathLossLaws:
    ap_dios: PathLossLaw = PathLossLaw(35.6, 22.0)
    lu: PathLossLaw = PathLossLaw(32.6, 36.7)

    @classmethod
    def from_config(cls, config: SimConfig) -> "PathLossLaws":
        return cls(PathLossLaw(*config.channel.g_law), PathLossLaw(*config.channel.lu_law))


@dataclass(frozen=True, eq=False)
class LargeScale:
    """Linear large-scale gains of one scene.

    ``l_i`` holds each LU's DIOS-side gain, whichever side it sits on.
    """

    l_g: float
    l_d: np.ndarray  # (K,)
    l_i: np.ndarray  # (K,)


@dataclass(frozen=True, eq=False)
class ChannelSet:
    g: np.ndarray  # (N_D, N_A)
    h_d: np.ndarray  # (N_A, K)
    h_i_t: np.ndarray  # (N_D, K_t)
    h_i_r: np.ndarray  # (N_D, K_r)
    large_scale: LargeScale


def complex_normal(rng: np.random.Generator, shape, variance: float = 1.0) -> np.ndarray:
    """Circularly-symmetric complex Gaussian samples of the given variance."""
    shape = (int(shape),) if np.ndim(shape) == 0 else tuple(shape)
    scale = math.sqrt(variance / 2.0)
    z = rng.standard_normal(shape + (2,))
    return scale * (z[..., 0] + 1j * z[..., 1])


def large_scale_gains(scene: Scene, laws: PathLossLaws) -> LargeScale:
    ap_center = scene.ap_positions.mean(axis=0)
    l_g = path_gain_linear(laws.ap_dios, np.linalg.norm(ap_center - scene.dios_origin))
    d_direct = np.linalg.norm(scene.lu_positions - ap_center, axis=1)
    d_dios = np.linalg.norm(scene.lu_positions - scene.dios_origin, axis=1)
    return LargeScale(
        l_g=float(l_g),
        l_d=np.atleast_1d(path_gain_linear(laws.lu, d_direct)),
        l_i=np.atleast_1d(path_gain_linear(laws.lu, d_dios)),
    )


def los_phase_matrix(scene: Scene) -> np.ndarray:
    """Unit-modulus LOS phases, shape (N_A, N_D), indexed by (antenna, element)."""
    d_ns = scene.antenna_dios_distances()
    d_n = scene.antenna_origin_distances()
    return np.exp(-2j * np.pi / scene.wavelength * (d_ns - d_n[:, None]))


def sample_g(scene: Scene, spec: RicianSpec, gain: float, rng: np.random.Generator,
             los: np.ndarray | None = None) -> np.ndarray:
    """Sample the AP-DIOS channel, shape (N_D, N_A).

    ``los`` may carry a precomputed :func:`los_phase_matrix` (it only
    depends on the scene).
    """
    if gain <= 0:
        raise ValueError("large-scale gain must be positive")
    if los is None:
        los = los_phase_matrix(scene)
    g = spec.los_weight * los.T
    if spec.nlos_weight:
        g = g + spec.nlos_weight * complex_normal(rng, (scene.n_d, scene.n_a))
    return math.sqrt(gain) * g


def sample_far_field(n: int, gain, rng: np.random.Generator, k: int | None = None) -> np.ndarray:
    """Rayleigh far-field vector of length ``n`` with per-entry variance ``gain``.

    With ``k`` given, returns an (n, k) matrix whose column j has variance
    ``gain[j]``.
    """
    gain = np.asarray(gain, dtype=float)
    if np.any(gain <= 0):
        raise ValueError("large-scale gain must be positive")
    if k is None:
        return np.sqrt(gain) * complex_normal(rng, n)
    return complex_normal(rng, (n, k)) * np.sqrt(np.broadcast_to(gain, (k,)))


def assemble_channels(scene: Scene, spec: RicianSpec, laws: PathLossLaws,
                      rng: np.random.Generator, large: LargeScale | None = None,
                      los: np.ndarray | None = None, include_dios: bool = True) -> ChannelSet:
    """Sample one coherence block of channels.

    G, H_d and the two DIOS-LU matrices are drawn from independent child
    streams of ``rng`` so that any one of them can be skipped or replaced
    without shifting the others. ``include_dios=False`` skips the DIOS
    links (left as None) for schemes that never use them.
    """
    if large is None:
        large = large_scale_gains(scene, laws)
    s_g, s_d, s_t, s_r = rng.spawn(4)
    t_idx, r_idx = scene.refractive, scene.reflective
    h_d = sample_far_field(scene.n_a, large.l_d, s_d, k=scene.k)
    if not include_dios:
        return ChannelSet(g=None, h_d=h_d, h_i_t=None, h_i_r=None, large_scale=large)
    return ChannelSet(
        g=sample_g(scene, spec, large.l_g, s_g, los=los),
        h_d=h_d,
        h_i_t=sample_far_field(scene.n_d, large.l_i[t_idx], s_t, k=len(t_idx)),
        h_i_r=sample_far_field(scene.n_d, large.l_i[r_idx], s_r, k=len(r_idx)),
        large_scale=large,
    )
