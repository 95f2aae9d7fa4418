import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dios_fpj.config import ConfigError
from dios_fpj.scene import (
    REFLECTIVE,
    REFRACTIVE,
    PathLossLaw,
    build_scene,
    distance,
    path_gain_linear,
)
from dios_fpj.sweep import scene_seed

G_LAW = PathLossLaw(35.6, 22.0)
LU_LAW = PathLossLaw(32.6, 36.7)


def test_distance_hand_value():
    assert distance((0, 0, 10), (2, 2, 8)) == pytest.approx(math.sqrt(12), abs=1e-12)
    assert distance((0, 0, 10), (2, 2, 8)) == pytest.approx(3.4641, abs=1e-4)


def test_distance_identity_and_symmetry(rng):
    a, b = rng.normal(size=3), rng.normal(size=3)
    assert distance(a, a) == 0.0
    assert distance(a, b) == distance(b, a)


def test_path_gain_ap_dios():
    d = math.sqrt(12)
    assert G_LAW.loss_db(d) == pytest.approx(47.471, abs=1e-3)
    assert path_gain_linear(G_LAW, d) == pytest.approx(1.7902e-5, rel=1e-4)


def test_path_gain_lu_180m():
    # 32.6 + 36.7 * log10(180) evaluated by hand: 115.3685 dB.
    assert LU_LAW.loss_db(180.0) == pytest.approx(115.3685, abs=1e-4)


@pytest.mark.parametrize("law", [G_LAW, LU_LAW, PathLossLaw(10.0, 5.0)])
def test_path_gain_at_one_meter(law):
    assert path_gain_linear(law, 1.0) == pytest.approx(10 ** (-law.intercept_db / 10), rel=1e-15)


@pytest.mark.parametrize("d", [0.0, -1.0])
def test_path_gain_rejects_non_positive(d):
    with pytest.raises(ValueError):
        path_gain_linear(LU_LAW, d)


@given(st.floats(0.01, 1e4), st.floats(0.01, 1e4))
def test_path_gain_monotone(d1, d2):
    if d1 == d2:
        return
    lo, hi = sorted((d1, d2))
    assert path_gain_linear(LU_LAW, lo) > path_gain_linear(LU_LAW, hi)


def test_default_scene_layout(defaults, default_scene):
    s = default_scene
    assert (s.n_a, s.n_d, s.k) == (128, 2048, 24)
    assert s.lu_sides.count(REFRACTIVE) == 12 and s.lu_sides.count(REFLECTIVE) == 12
    assert s.lu_sides[:12] == (REFRACTIVE,) * 12
    center = np.array(defaults.geometry.lu_center)
    assert np.all(np.linalg.norm(s.lu_positions - center, axis=1) <= 20.0 + 1e-12)
    assert np.all(s.lu_positions[:, 2] == 0.0)
    np.testing.assert_allclose(s.ap_positions.mean(axis=0), (0, 0, 10), atol=1e-12)
    np.testing.assert_array_equal(s.dios_origin, (2, 2, 8))


def test_array_spacing_half_wavelength(default_scene):
    lam = default_scene.wavelength
    ap_step = np.linalg.norm(np.diff(default_scene.ap_positions, axis=0), axis=1)
    np.testing.assert_allclose(ap_step, lam / 2, atol=1e-9)
    # Neighbours within a DIOS row.
    cols = math.ceil(2048 / math.isqrt(2048))
    row = default_scene.dios_positions[:cols]
    np.testing.assert_allclose(np.linalg.norm(np.diff(row, axis=0), axis=1), lam / 2, atol=1e-9)
    col = default_scene.dios_positions[::cols]
    np.testing.assert_allclose(np.linalg.norm(np.diff(col, axis=0), axis=1), lam / 2, atol=1e-9)


def test_antenna_element_distances(default_scene):
    d = default_scene.antenna_dios_distances()
    aperture = np.linalg.norm(default_scene.ap_positions[-1] - default_scene.ap_positions[0])
    assert d.min() > 0
    assert np.all(d.max(axis=0) - d.min(axis=0) <= aperture + 1e-12)


def test_degenerate_disc(defaults):
    cfg = defaults.replace(geometry={"lu_radius": 0.0, "k_refractive": 1, "k_reflective": 0})
    s = build_scene(cfg, scene_seed(3))
    np.testing.assert_array_equal(s.lu_positions[0], cfg.geometry.lu_center)


def test_zero_radius_many_users_rejected(defaults):
    with pytest.raises(ConfigError):
        defaults.replace(geometry={"lu_radius": 0.0})


def test_non_positive_wavelength_rejected(defaults):
    with pytest.raises(ConfigError):
        defaults.replace(geometry={"carrier_hz": 0.0})


def test_scene_deterministic(defaults):
    a = build_scene(defaults, np.random.default_rng(42))
    b = build_scene(defaults, np.random.default_rng(42))
    assert a.lu_positions.tobytes() == b.lu_positions.tobytes()
    assert a.dios_positions.tobytes() == b.dios_positions.tobytes()
