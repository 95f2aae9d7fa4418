"""Closed-form statistics of the jammed channel and sum-rate lower bounds.

All inputs are in natural units: watts for powers, linear gains for
path loss.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fading import LargeScale
from .scene import REFLECTIVE, REFRACTIVE


@dataclass(frozen=True, eq=False)
class BoundInputs:
    p0: float
    n_a: int
    n_d: int
    noise: float
    l_g: float
    l_d: np.ndarray  # (K,)
    l_i: np.ndarray  # (K,), each LU's DIOS-side gain
    sides: tuple[str, ...]
    mu: float = 0.5

    def __post_init__(self):
        l_d = np.asarray(self.l_d, dtype=float)
        l_i = np.asarray(self.l_i, dtype=float)
        object.__setattr__(self, "l_d", l_d)
        object.__setattr__(self, "l_i", l_i)
        if len(l_d) != len(self.sides) or len(l_i) != len(self.sides):
            raise ValueError("per-LU gains and side tags must have the same length")
        if self.n_a <= self.k_total:
            raise ValueError(f"bounds need N_A > K, got N_A={self.n_a}, K={self.k_total}")
        if np.any(l_d <= 0) or np.any(l_i <= 0) or self.l_g <= 0:
            raise ValueError("large-scale gains must be positive")
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError("mu must lie in [0, 1]")

    @property
    def k_total(self) -> int:
        return len(self.sides)

    @classmethod
    def from_large_scale(cls, large: LargeScale, sides, *, p0: float, n_a: int, n_d: int,
                         noise: float, mu: float = 0.5) -> "BoundInputs":
        return cls(p0=p0, n_a=n_a, n_d=n_d, noise=noise, l_g=large.l_g, l_d=large.l_d,
                   l_i=large.l_i, sides=tuple(sides), mu=mu)


@dataclass(frozen=True)
class SideBounds:
    refractive: float
    reflective: float
    per_lu: tuple[float, ...]

    @property
    def total(self) -> float:
        return self.refractive + self.reflective


def prop1_variance(l_g, l_i, n_d):
    """Per-entry variance of the jammed channel for a constant-amplitude DIOS."""
    return l_g * l_i * n_d / 2.0


def prop2_variances(l_g, l_i_t, l_i_r, n_d, mu):
    """(refractive, reflective) per-entry variances for a variable-amplitude DIOS."""
    if not 0.0 <= mu <= 1.0:
        raise ValueError("mu must lie in [0, 1]")
    return l_g * l_i_t * n_d * mu, l_g * l_i_r * n_d * (1.0 - mu)


def wishart_trace_expectation(n_a: int, l_d) -> float:
    """E[tr((H_d^H H_d)^{-1})] for Rayleigh H_d with column gains ``l_d``."""
    l_d = np.atleast_1d(np.asarray(l_d, dtype=float))
    k = len(l_d)
    if n_a <= k:
        raise ValueError(f"inverse Wishart mean needs N_A > K, got N_A={n_a}, K={k}")
    return math.fsum(1.0 / l_d) / (n_a - k)


def _side_sums(rates: np.ndarray, sides) -> SideBounds:
    sides = np.asarray(sides)
    return SideBounds(
        refractive=math.fsum(rates[sides == REFRACTIVE]),
        reflective=math.fsum(rates[sides == REFLECTIVE]),
        per_lu=tuple(float(r) for r in rates),
    )


def _bound_rates(inp: BoundInputs, jam_weight: np.ndarray, noise_mult: float,
                 desired_direct: float, desired_jam_extra: np.ndarray | None = None) -> np.ndarray:
    """log2(1 + (A + B_k) / (C_k + noise_mult * delta^2)) for every LU.

    ``jam_weight`` is the per-LU factor multiplying P0 * L_G * N_D in both
    the DIOS part of the numerator and the interference term.
    """
    others = math.fsum(inp.l_i) - inp.l_i
    numer_jam = inp.p0 * inp.l_g * inp.l_i * inp.n_d * jam_weight
    if desired_jam_extra is not None:
        numer_jam = numer_jam * desired_jam_extra
    denom = inp.p0 * inp.l_g * others * inp.n_d * jam_weight + noise_mult * inp.noise
    return np.log2(1.0 + (desired_direct + numer_jam) / denom)


def theorem1_bounds(inp: BoundInputs, mean_inv_trace: float | None = None) -> SideBounds:
    """Constant-amplitude DIOS: per-side sum-rate lower bounds (bits/symbol).

    By default the direct-link term uses the closed-form Jensen bound
    2 P0 K (N_A - K) / sum(1 / L_d). Passing ``mean_inv_trace`` (a Monte
    Carlo estimate of E[1 / tr((H_d^H H_d)^{-1})]) evaluates the
    expectation form instead.
    """
    k = inp.k_total
    if mean_inv_trace is None:
        direct = 2.0 * inp.p0 * k * (inp.n_a - k) / math.fsum(1.0 / inp.l_d)
    else:
        direct = 2.0 * k * inp.p0 * mean_inv_trace
    weight = np.ones(k)
    return _side_sums(_bound_rates(inp, weight, 2.0 * k, direct), inp.sides)


def theorem2_bounds(inp: BoundInputs, mean_inv_trace: float | None = None,
                    printed_form: bool = False) -> SideBounds:
    """Variable-amplitude DIOS: per-side sum-rate lower bounds (bits/symbol).

    Refractive LUs weight the DIOS terms by ``mu`` and reflective LUs by
    ``1 - mu``. ``printed_form=True`` multiplies the reflective numerator's
    DIOS term by N_A, a variant of the bound sometimes quoted; the default
    follows the derivation, which has no such factor.
    """
    k = inp.k_total
    if mean_inv_trace is None:
        direct = inp.p0 * k * (inp.n_a - k) / math.fsum(1.0 / inp.l_d)
    else:
        direct = k * inp.p0 * mean_inv_trace
    sides = np.asarray(inp.sides)
    weight = np.where(sides == REFRACTIVE, inp.mu, 1.0 - inp.mu)
    extra = None
    if printed_form:
        extra = np.where(sides == REFLECTIVE, float(inp.n_a), 1.0)
    return _side_sums(_bound_rates(inp, weight, float(k), direct, extra), inp.sides)


@dataclass(frozen=True)
class Moments:
    mean: complex
    variance: float
    fourth_moment_ratio: float


def empirical_moments(samples) -> Moments:
    """Sample mean, unbiased variance and E|z|^4 / (E|z|^2)^2 of complex samples.

    The ratio is computed on the centred samples; it tends to 2 for a
    circularly-symmetric complex Gaussian.
    """
    z = np.ravel(np.asarray(samples))
    if z.size < 2:
        raise ValueError("need at least two samples")
    mean = z.mean()
    c = z - mean
    p2 = np.abs(c) ** 2
    var = float(p2.sum() / (z.size - 1))
    m2 = float(p2.mean())
    ratio = float((p2 ** 2).mean() / m2 ** 2) if m2 > 0 else float("nan")
    return Moments(mean=complex(mean), variance=var, fourth_moment_ratio=ratio)
