"""Monte Carlo estimation of ergodic rates under DIOS jamming.

Each coherence block draws fresh channels, builds the ZF precoder from the
pilot-phase direct channel (DIOS silent) and then runs ``C`` data slots in
which the DIOS redraws its coefficients. Expectations in the numerator and
the denominator of each LU's SINR are estimated separately over all
blocks and slots and only then divided.

Random streams are keyed by ``(seed, block, attempt)`` so results do not
depend on how blocks are distributed over worker processes.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import SimConfig, dbm_to_watts
from .dios import (
    CoefficientDraw,
    DiosKind,
    DiosModel,
    constant_amplitude_model,
    make_model,
    reflective_only_model,
    sample_coefficients,
)
from .fading import (
    PathLossLaws,
    RicianSpec,
    assemble_channels,
    large_scale_gains,
    los_phase_matrix,
    sample_far_field,
)
from .precoder import Precoder, SingularChannelError, zf_precoder
from .scene import Scene

Z_95 = 1.96

_STREAM_BLOCKS = 1
_CHANNELS, _DIOS, _JAMMER = range(3)


class Variant(enum.Enum):
    NO_JAMMING = "no_jamming"
    DIOS_CONSTANT_AMP = "dios_ca"
    DIOS_VARIABLE_AMP = "dios_va"
    DRIS_REFLECTIVE = "dris"
    ACTIVE_JAMMER = "aj"


@dataclass(frozen=True)
class Scheme:
    variant: Variant
    jammer_power: float = 0.0  # watts

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        is_aj = self.variant is Variant.ACTIVE_JAMMER
        if is_aj != (self.jammer_power > 0):
            raise ValueError("jammer_power must be positive exactly for the active-jammer scheme")

    @property
    def name(self) -> str:
        return self.variant.value

    @classmethod
    def from_name(cls, name: str, config: SimConfig | None = None) -> "Scheme":
        variant = Variant(name)
        if variant is Variant.ACTIVE_JAMMER:
            dbm = (config.power.jammer_dbm if config is not None else 5.0)
            return cls(variant, dbm_to_watts(dbm))
        return cls(variant)

    def dios_model(self, config: SimConfig) -> DiosModel | None:
        if self.variant is Variant.DIOS_CONSTANT_AMP:
            return constant_amplitude_model(config.dios.levels)
        if self.variant is Variant.DIOS_VARIABLE_AMP:
            return make_model(DiosKind.VARIABLE_AMPLITUDE, config.dios.levels)
        if self.variant is Variant.DRIS_REFLECTIVE:
            return reflective_only_model()
        return None


@dataclass(frozen=True, eq=False)
class RateReport:
    per_lu_rate: np.ndarray  # bits/symbol, (K,)
    sum_refractive: float
    sum_reflective: float
    sum_total: float
    ci_halfwidth: dict[str, float]  # keys: refractive, reflective, total
    n_blocks: int
    sides: tuple[str, ...]
    resamples: int = 0
    sinr: np.ndarray = field(default=None)

    def side_sum(self, side: str) -> float:
        return {"refractive": self.sum_refractive, "reflective": self.sum_reflective,
                "total": self.sum_total}[side]

    def per_lu(self, side: str) -> float:
        """Average rate per LU on ``side`` (``total`` averages over all LUs)."""
        n = len(self.sides) if side == "total" else sum(s == side for s in self.sides)
        return self.side_sum(side) / n if n else float("nan")


@dataclass(frozen=True, eq=False)
class BlockTerms:
    """Per-block, per-LU signal statistics at unit total transmit power.

    ``desired`` and ``interference`` are slot averages of
    ``|h_k^H w_k|^2`` and ``sum_{u != k} |h_k^H w_u|^2`` with ``||W||_F = 1``;
    ``jammer`` is the active jammer's channel power ``|h_AJ,k|^2`` (zero for
    other schemes).
    """

    desired: np.ndarray  # (n_blocks, K)
    interference: np.ndarray
    jammer: np.ndarray
    sides: tuple[str, ...]
    resamples: int = 0

    @property
    def n_blocks(self) -> int:
        return self.desired.shape[0]


def jammed_channel(g: np.ndarray, h_i: np.ndarray, draw: np.ndarray) -> np.ndarray:
    """G^H diag(draw) H_I, shape (N_A, K_side)."""
    if g.shape[0] != h_i.shape[0] or draw.shape != (g.shape[0],):
        raise ValueError(f"dimension mismatch: G {g.shape}, H_I {h_i.shape}, draw {draw.shape}")
    return g.conj().T @ (draw[:, None] * h_i)


def aca_channel(h_dt: np.ndarray, h_pt: np.ndarray) -> np.ndarray:
    if h_dt.shape != h_pt.shape:
        raise ValueError(f"dimension mismatch: {h_dt.shape} vs {h_pt.shape}")
    return h_dt - h_pt


def slot_signal_terms(h_d_k: np.ndarray, h_jam_k: np.ndarray, precoder: Precoder, k: int):
    """Desired and inter-user interference power seen by LU ``k`` in one slot."""
    gains = np.abs(np.conj(h_d_k + h_jam_k) @ precoder.w) ** 2
    desired = float(gains[k])
    interference = math.fsum(np.delete(gains, k))
    return desired, interference


def _signal_terms(h_eff: np.ndarray, w: np.ndarray):
    """Vectorised :func:`slot_signal_terms` over all LUs (columns of ``h_eff``)."""
    p = np.abs(h_eff.conj().T @ w) ** 2
    desired = np.diagonal(p).copy()
    np.fill_diagonal(p, 0.0)
    return desired, p.sum(axis=1)


def block_jammed_channels(channels, draw: CoefficientDraw, scene: Scene, g_h: np.ndarray | None = None):
    """Stack the refractive and reflective jammed channels into (N_A, K)."""
    if g_h is None:
        g_h = channels.g.conj().T
    out = np.zeros((scene.n_a, scene.k), dtype=complex)
    t_idx, r_idx = scene.refractive, scene.reflective
    if len(t_idx):
        out[:, t_idx] = g_h @ (draw.refr[:, None] * channels.h_i_t)
    if len(r_idx):
        out[:, r_idx] = g_h @ (draw.refl[:, None] * channels.h_i_r)
    return out


def _block_streams(seed: int, block: int, attempt: int):
    ss = np.random.SeedSequence(seed, spawn_key=(_STREAM_BLOCKS, block, attempt))
    return [np.random.default_rng(s) for s in ss.spawn(3)]


@dataclass(frozen=True, eq=False)
class _BlockJob:
    scene: Scene
    scheme: Scheme
    model: DiosModel | None
    spec: RicianSpec
    laws: PathLossLaws
    slots: int
    cond_cap: float
    max_resamples: int
    seed: int


def _simulate_block(job: _BlockJob, block: int, los: np.ndarray | None, large):
    scene = job.scene
    for attempt in range(job.max_resamples + 1):
        rngs = _block_streams(job.seed, block, attempt)
        channels = assemble_channels(scene, job.spec, job.laws, rngs[_CHANNELS], large=large,
                                     los=los, include_dios=job.model is not None)
        try:
            pre = zf_precoder(channels.h_d, 1.0, job.cond_cap)
        except SingularChannelError:
            continue
        break
    else:
        raise SingularChannelError(f"block {block}: no usable direct channel after {attempt + 1} draws")

    if job.model is None:
        desired, interference = _signal_terms(channels.h_d, pre.w)
    else:
        desired = np.zeros(scene.k)
        interference = np.zeros(scene.k)
        g_h = channels.g.conj().T
        for _ in range(job.slots):
            draw = sample_coefficients(job.model, scene.n_d, rngs[_DIOS])
            h_eff = channels.h_d + block_jammed_channels(channels, draw, scene, g_h)
            d, i = _signal_terms(h_eff, pre.w)
            desired += d
            interference += i
        desired /= job.slots
        interference /= job.slots

    if job.scheme.variant is Variant.ACTIVE_JAMMER:
        # Single-antenna jammer at the DIOS origin, Rayleigh to each LU.
        h_aj = sample_far_field(scene.k, large.l_i, rngs[_JAMMER])
        jammer = np.abs(h_aj) ** 2
    else:
        jammer = np.zeros(scene.k)
    return desired, interference, jammer, attempt


def _run_chunk(job: _BlockJob, blocks: range):
    los = los_phase_matrix(job.scene) if job.model is not None else None
    large = large_scale_gains(job.scene, job.laws)
    return [_simulate_block(job, b, los, large) for b in blocks]


def simulate_blocks(scene: Scene, scheme: Scheme, config: SimConfig, seed: int | None = None,
                    n_blocks: int | None = None, dios_model: DiosModel | None = None,
                    workers: int | None = None) -> BlockTerms:
    """Run ``n_blocks`` coherence blocks and collect unit-power statistics."""
    seed = config.run.seed if seed is None else seed
    n_blocks = config.schedule.n_blocks if n_blocks is None else n_blocks
    workers = config.run.workers if workers is None else workers
    if n_blocks < 1:
        raise ValueError("n_blocks must be >= 1")
    model = dios_model if dios_model is not None else scheme.dios_model(config)
    job = _BlockJob(
        scene=scene,
        scheme=scheme,
        model=model,
        spec=RicianSpec(config.channel.rician_factor, config.channel.los_only),
        laws=PathLossLaws.from_config(config),
        slots=config.schedule.slots,
        cond_cap=config.channel.cond_cap,
        max_resamples=config.schedule.max_resamples,
        seed=seed,
    )
    if workers <= 1 or n_blocks < 2:
        results = _run_chunk(job, range(n_blocks))
    else:
        bounds = np.linspace(0, n_blocks, min(workers, n_blocks) + 1).astype(int)
        chunks = [range(a, b) for a, b in zip(bounds[:-1], bounds[1:])]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_run_chunk, [job] * len(chunks), chunks)
            results = [r for part in parts for r in part]
    desired, interference, jammer, attempts = zip(*results)
    return BlockTerms(
        desired=np.array(desired),
        interference=np.array(interference),
        jammer=np.array(jammer),
        sides=scene.lu_sides,
        resamples=int(sum(attempts)),
    )


def rates_from_terms(terms: BlockTerms, p0: float, noise: float, jammer_power: float = 0.0) -> RateReport:
    """Turn block statistics into rates for total power ``p0`` (watts).

    Confidence half-widths use the delta method on the per-block means,
    which are i.i.d. across blocks.
    """
    d_b = p0 * terms.desired
    e_b = p0 * terms.interference + jammer_power * terms.jammer
    d = d_b.mean(axis=0)
    e = e_b.mean(axis=0) + noise
    sinr = d / e
    rates = np.log2(1.0 + sinr)

    sides = np.array(terms.sides)
    groups = {"refractive": sides == "refractive", "reflective": sides == "reflective",
              "total": np.ones(len(sides), dtype=bool)}
    n = terms.n_blocks
    ci = {}
    if n > 1:
        # f = log2(e + d) - log2(e); e already includes the noise floor.
        grad_d = 1.0 / ((e + d) * math.log(2.0))
        grad_e = grad_d - 1.0 / (e * math.log(2.0))
        influence = grad_d * (d_b - d) + grad_e * (e_b - (e - noise))
        for name, mask in groups.items():
            psi = influence[:, mask].sum(axis=1)
            ci[name] = Z_95 * float(np.std(psi, ddof=1)) / math.sqrt(n)
    else:
        ci = {name: math.inf for name in groups}

    s_t = math.fsum(rates[groups["refractive"]])
    s_r = math.fsum(rates[groups["reflective"]])
    return RateReport(
        per_lu_rate=rates,
        sum_refractive=s_t,
        sum_reflective=s_r,
        sum_total=s_t + s_r,
        ci_halfwidth=ci,
        n_blocks=n,
        sides=terms.sides,
        resamples=terms.resamples,
        sinr=sinr,
    )


def estimate_rates(scene: Scene, scheme: Scheme, config: SimConfig, p0: float,
                   seed: int | None = None, dios_model: DiosModel | None = None,
                   n_blocks: int | None = None, workers: int | None = None) -> RateReport:
    """Monte Carlo ergodic rates for total transmit power ``p0`` (watts)."""
    terms = simulate_blocks(scene, scheme, config, seed=seed, n_blocks=n_blocks,
                            dios_model=dios_model, workers=workers)
    return rates_from_terms(terms, p0, config.channel.noise_watts, scheme.jammer_power)


def scheme_loss(reference: RateReport, jammed: RateReport, side: str = "total") -> tuple[float, float]:
    """Per-LU rate loss of ``jammed`` relative to ``reference`` and a conservative CI."""
    loss = reference.per_lu(side) - jammed.per_lu(side)
    n = len(reference.sides) if side == "total" else sum(s == side for s in reference.sides)
    ci = math.hypot(reference.ci_halfwidth[side], jammed.ci_halfwidth[side]) / n
    return loss, ci
