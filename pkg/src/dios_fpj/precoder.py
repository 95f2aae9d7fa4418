"""Zero-forcing precoding from pilot-phase CSI."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_COND_CAP = 1e12


class SingularChannelError(np.linalg.LinAlgError):
    """Direct channel too ill-conditioned for zero forcing."""


@dataclass(frozen=True, eq=False)
class Precoder:
    w: np.ndarray  # (N_A, K), columns are per-LU beams
    total_power: float


def _pseudo_inverse_factor(h_d: np.ndarray, cond_cap: float) -> np.ndarray:
    """Return H_d (H_d^H H_d)^{-1} via a thin QR factorisation."""
    n_a, k = h_d.shape[-2:]
    if k > n_a:
        raise ValueError(f"zero forcing needs K <= N_A, got K={k}, N_A={n_a}")
    q, r = np.linalg.qr(h_d)
    diag = np.abs(np.diagonal(r, axis1=-2, axis2=-1))
    if np.any(diag == 0):
        raise SingularChannelError("direct channel is rank deficient")
    s = np.linalg.svd(r, compute_uv=False)
    if np.any(s[..., -1] == 0) or np.any(s[..., 0] / s[..., -1] > cond_cap):
        raise SingularChannelError("direct channel condition number exceeds cap")
    # (H^H H)^{-1} = R^{-1} R^{-H}, so H (H^H H)^{-1} = Q R^{-H}.
    eye = np.broadcast_to(np.eye(k, dtype=r.dtype), r.shape)
    r_inv = np.linalg.solve(r, eye)
    return q @ np.conj(np.swapaxes(r_inv, -1, -2))


def zf_precoder(h_d: np.ndarray, p0: float, cond_cap: float = DEFAULT_COND_CAP) -> Precoder:
    """Equal-power ZF precoder normalised to total power ``p0``."""
    a = _pseudo_inverse_factor(h_d, cond_cap)
    w = np.sqrt(p0) * a / np.linalg.norm(a)
    return Precoder(w=w, total_power=float(p0))


def trace_inverse_gram(h_d: np.ndarray, cond_cap: float = np.inf) -> np.ndarray | float:
    """tr((H_d^H H_d)^{-1}); accepts a stack of matrices on leading axes."""
    a = _pseudo_inverse_factor(h_d, cond_cap)
    out = np.sum(np.abs(a) ** 2, axis=(-2, -1))
    return float(out) if np.ndim(out) == 0 else out
