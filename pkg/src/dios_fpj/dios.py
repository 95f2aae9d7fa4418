"""DIOS coefficient tables and random refractive/reflective draws."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .config import LevelSpec, DEFAULT_LEVELS

ENERGY_TOL = 0.02
PROB_TOL = 1e-12
HALF_AMP = math.sqrt(2.0) / 2.0


class DiosKind(enum.Enum):
    CONSTANT_AMPLITUDE = "constant"
    VARIABLE_AMPLITUDE = "variable"


class DiosModelError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class DiosModel:
    kind: DiosKind
    levels: tuple[LevelSpec, ...]

    @property
    def bits(self) -> int:
        return len(self.levels).bit_length() - 1

    @property
    def probs(self) -> np.ndarray:
        return np.array([lv.prob for lv in self.levels])

    @property
    def refr_coeffs(self) -> np.ndarray:
        return np.array([lv.refr_amp * np.exp(1j * lv.refr_phase) for lv in self.levels])

    @property
    def refl_coeffs(self) -> np.ndarray:
        return np.array([lv.refl_amp * np.exp(1j * lv.refl_phase) for lv in self.levels])


@dataclass(frozen=True, eq=False)
class CoefficientDraw:
    """Diagonals of the refractive and reflective coefficient matrices."""

    refr: np.ndarray
    refl: np.ndarray
    index: np.ndarray

    @classmethod
    def silent(cls, n_d: int) -> "CoefficientDraw":
        zeros = np.zeros(n_d, dtype=complex)
        return cls(refr=zeros, refl=zeros.copy(), index=np.full(n_d, -1))


def make_model(kind: DiosKind | str, levels: Iterable[LevelSpec], *,
               energy_tol: float = ENERGY_TOL) -> DiosModel:
    """Validate a coefficient table.

    Raises :class:`DiosModelError` when the level count is not a power of
    two, probabilities do not form a distribution, an amplitude leaves
    [0, 1], the per-level energy |xi_t|^2 + |xi_r|^2 departs from 1 by more
    than ``energy_tol``, or a constant-amplitude table is not at sqrt(2)/2.
    """
    kind = DiosKind(kind)
    levels = tuple(levels)
    n = len(levels)
    if n == 0 or n & (n - 1):
        raise DiosModelError(f"number of levels must be a power of two, got {n}")
    probs = np.array([lv.prob for lv in levels])
    if np.any(probs < 0):
        raise DiosModelError("level probabilities must be non-negative")
    if abs(math.fsum(probs) - 1.0) > PROB_TOL:
        raise DiosModelError(f"level probabilities sum to {math.fsum(probs)!r}, not 1")
    for i, lv in enumerate(levels):
        for amp in (lv.refr_amp, lv.refl_amp):
            if not 0.0 <= amp <= 1.0:
                raise DiosModelError(f"level {i}: amplitude {amp} outside [0, 1]")
        energy = lv.refr_amp ** 2 + lv.refl_amp ** 2
        if abs(energy - 1.0) > energy_tol:
            raise DiosModelError(f"level {i}: refracted + reflected energy is {energy:.4f}")
        if kind is DiosKind.CONSTANT_AMPLITUDE and not (
            math.isclose(lv.refr_amp, HALF_AMP, abs_tol=1e-12)
            and math.isclose(lv.refl_amp, HALF_AMP, abs_tol=1e-12)
        ):
            raise DiosModelError(f"level {i}: constant-amplitude tables need sqrt(2)/2 on both sides")
    return DiosModel(kind=kind, levels=levels)


def default_variable_model() -> DiosModel:
    return make_model(DiosKind.VARIABLE_AMPLITUDE, DEFAULT_LEVELS)


def constant_amplitude_model(levels: Iterable[LevelSpec] = DEFAULT_LEVELS) -> DiosModel:
    """Same phases and probabilities as ``levels`` with both amplitudes at sqrt(2)/2."""
    flat = [
        LevelSpec(lv.refr_phase, HALF_AMP, lv.refl_phase, HALF_AMP, lv.prob) for lv in levels
    ]
    return make_model(DiosKind.CONSTANT_AMPLITUDE, flat)


def reflective_only_model() -> DiosModel:
    """Reflective-only surface: unit amplitude, equiprobable one-bit phases."""
    levels = (
        LevelSpec(0.0, 0.0, 0.0, 1.0, 0.5),
        LevelSpec(0.0, 0.0, math.pi, 1.0, 0.5),
    )
    return make_model(DiosKind.VARIABLE_AMPLITUDE, levels)


def sample_coefficients(model: DiosModel, n_d: int, rng: np.random.Generator) -> CoefficientDraw:
    """Draw one level per element; both sides share the drawn index."""
    if n_d < 1:
        raise ValueError("n_d must be >= 1")
    cdf = np.cumsum(model.probs)
    cdf[-1] = 1.0
    index = np.searchsorted(cdf, rng.random(n_d), side="right")
    return CoefficientDraw(refr=model.refr_coeffs[index], refl=model.refl_coeffs[index], index=index)


def mu(model: DiosModel) -> float:
    """Refracted energy fraction, sum_m P_m * xi_t,m^2."""
    return math.fsum(lv.prob * lv.refr_amp ** 2 for lv in model.levels)


def reflected_fraction(model: DiosModel) -> float:
    return math.fsum(lv.prob * lv.refl_amp ** 2 for lv in model.levels)
