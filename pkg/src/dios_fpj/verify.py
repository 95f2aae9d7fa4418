"""Numerical verification suites: Monte Carlo against closed forms."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .analysis import empirical_moments, prop1_variance, prop2_variances, wishart_trace_expectation
from .config import SimConfig
from .dios import DiosKind, constant_amplitude_model, make_model, mu, sample_coefficients
from .engine import block_jammed_channels
from .fading import PathLossLaws, RicianSpec, assemble_channels, complex_normal, large_scale_gains, los_phase_matrix
from .precoder import trace_inverse_gram, zf_precoder
from .scene import build_scene
from .sweep import THEOREM1, THEOREM2, Axis, run_sweep, scene_seed

SUITES = ("propositions", "wishart", "zf", "bounds")

_STREAM_VERIFY = 2


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    measured: float
    expected: float
    tolerance: str
    passed: bool

    def __post_init__(self):
        object.__setattr__(self, "passed", bool(self.passed))

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.suite}/{self.name}: measured={self.measured:.6g} expected={self.expected:.6g} ({self.tolerance})"

    def as_dict(self) -> dict:
        return asdict(self)


def _rng(seed: int, tag: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(_STREAM_VERIFY, tag)))


def jammed_entry_samples(config: SimConfig, model, seed: int = 0, blocks: int = 16, slots: int = 4):
    """Jammed-channel entries divided by sqrt(L_G * L_I,k), split by side.

    Returns ``(refractive, reflective)`` flat complex arrays; each has
    ``blocks * slots * N_A * K_side`` entries.
    """
    scene = build_scene(config, scene_seed(seed))
    laws = PathLossLaws.from_config(config)
    large = large_scale_gains(scene, laws)
    spec = RicianSpec(config.channel.rician_factor, config.channel.los_only)
    los = los_phase_matrix(scene)
    rng = _rng(seed, 1)
    norm = np.sqrt(large.l_g * large.l_i)
    t_parts, r_parts = [], []
    for _ in range(blocks):
        ch = assemble_channels(scene, spec, laws, rng, large=large, los=los)
        g_h = ch.g.conj().T
        for _ in range(slots):
            draw = sample_coefficients(model, scene.n_d, rng)
            jam = block_jammed_channels(ch, draw, scene, g_h) / norm
            t_parts.append(jam[:, scene.refractive].ravel())
            r_parts.append(jam[:, scene.reflective].ravel())
    return np.concatenate(t_parts), np.concatenate(r_parts), scene


def _rel_check(suite, name, measured, expected, rtol) -> Check:
    rel = abs(measured - expected) / abs(expected)
    return Check(suite, name, float(measured), float(expected), f"rel err {rel:.3%} <= {rtol:.1%}", rel <= rtol)


def _range_check(suite, name, measured, lo, hi, expected) -> Check:
    return Check(suite, name, float(measured), float(expected), f"in [{lo}, {hi}]", lo <= measured <= hi)


def verify_propositions(config: SimConfig, seed: int = 0) -> list[Check]:
    cfg = config.replace(arrays={"n_d": 2048})
    checks = []
    ca = constant_amplitude_model(cfg.dios.levels)
    t, r, scene = jammed_entry_samples(cfg, ca, seed)
    expected = prop1_variance(1.0, 1.0, scene.n_d)
    both = np.concatenate([t, r])
    m = empirical_moments(both)
    checks.append(_rel_check("propositions", "prop1_variance", m.variance, expected, 0.03))
    checks.append(_range_check("propositions", "prop1_fourth_moment_ratio", m.fourth_moment_ratio, 1.9, 2.1, 2.0))

    va = make_model(DiosKind.VARIABLE_AMPLITUDE, cfg.dios.levels)
    m_va = mu(va)
    t, r, scene = jammed_entry_samples(cfg, va, seed)
    exp_t, exp_r = prop2_variances(1.0, 1.0, 1.0, scene.n_d, m_va)
    mt, mr = empirical_moments(t), empirical_moments(r)
    checks.append(_rel_check("propositions", "prop2_refractive_variance", mt.variance, exp_t, 0.03))
    checks.append(_rel_check("propositions", "prop2_reflective_variance", mr.variance, exp_r, 0.03))
    energy = mt.variance / scene.n_d + mr.variance / scene.n_d
    checks.append(_rel_check("propositions", "prop2_energy_split", energy, 1.0, 0.01))
    # Sides have different variances, so Gaussianity is checked per side.
    checks.append(_range_check("propositions", "prop2_refractive_fourth_moment_ratio",
                               mt.fourth_moment_ratio, 1.9, 2.1, 2.0))
    checks.append(_range_check("propositions", "prop2_reflective_fourth_moment_ratio",
                               mr.fourth_moment_ratio, 1.9, 2.1, 2.0))
    return checks


def verify_wishart(seed: int = 0, n_a: int = 32, k: int = 8, trials: int = 10_000) -> list[Check]:
    rng = _rng(seed, 2)
    gains = rng.uniform(1e-12, 1e-10, size=k)
    h = complex_normal(rng, (trials, n_a, k)) * np.sqrt(gains)
    empirical = float(np.mean(trace_inverse_gram(h)))
    expected = wishart_trace_expectation(n_a, gains)
    return [_rel_check("wishart", f"mean_trace_inverse_gram_NA{n_a}_K{k}", empirical, expected, 0.02)]


def verify_zf(config: SimConfig, seed: int = 0, instances: int = 100, n_a: int = 128, k: int = 24) -> list[Check]:
    rng = _rng(seed, 3)
    scene = build_scene(config, scene_seed(seed))
    l_d = large_scale_gains(scene, PathLossLaws.from_config(config)).l_d
    l_d = np.resize(l_d, k)
    p0 = 1.0
    worst_leak = 0.0
    worst_power = 0.0
    for _ in range(instances):
        h = complex_normal(rng, (n_a, k)) * np.sqrt(l_d)
        pre = zf_precoder(h, p0)
        eff = np.abs(h.conj().T @ pre.w)
        diag = np.diagonal(eff)
        off = eff / diag[:, None]
        np.fill_diagonal(off, 0.0)
        worst_leak = max(worst_leak, float(off.max()))
        worst_power = max(worst_power, abs(np.linalg.norm(pre.w) ** 2 - p0) / p0)
    return [
        Check("zf", "max_offdiagonal_leakage", worst_leak, 0.0, "< 1e-09", worst_leak < 1e-9),
        Check("zf", "max_power_rel_error", worst_power, 0.0, "< 1e-09", worst_power < 1e-9),
    ]


def verify_bounds(config: SimConfig, seed: int = 0, n_blocks: int | None = None,
                  workers: int | None = None) -> list[Check]:
    """Monte Carlo per-side sum rate must not fall below the closed-form bound minus its CI."""
    result = run_sweep(config, Axis.POWER, ("dios_ca", "dios_va"), seed=seed, n_blocks=n_blocks, workers=workers)
    checks = []
    for scheme, theorem in (("dios_ca", THEOREM1), ("dios_va", THEOREM2)):
        for side in ("refractive", "reflective"):
            for row in result.select(scheme, side):
                margin = row.rate_per_lu - (row.bound - row.ci_halfwidth)
                checks.append(Check(
                    "bounds", f"{scheme}_{side}_{row.axis_value:g}dBm",
                    row.rate_per_lu, row.bound,
                    f"MC >= {theorem} - CI (margin {margin:.4g})", margin >= 0.0,
                ))
    return checks


def run_suite(name: str, config: SimConfig, seed: int = 0, n_blocks: int | None = None,
              workers: int | None = None) -> list[Check]:
    if name == "propositions":
        return verify_propositions(config, seed)
    if name == "wishart":
        return verify_wishart(seed)
    if name == "zf":
        return verify_zf(config, seed)
    if name == "bounds":
        return verify_bounds(config, seed, n_blocks, workers)
    if name == "all":
        return [c for s in SUITES for c in run_suite(s, config, seed, n_blocks, workers)]
    raise ValueError(f"unknown suite {name!r}")


def all_passed(checks) -> bool:
    return all(c.passed for c in checks) and not any(math.isnan(c.measured) for c in checks)
