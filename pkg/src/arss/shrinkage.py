"""Generalized lp shrinkage-thresholding.

Solves the scalar problem

    min_y  lam * |y|^p + 0.5 * (y - c)^2,      0 < p <= 1, lam >= 0,

exactly for p = 1 (soft threshold) and via a short fixed-point iteration
for p < 1.  The solution is zero whenever |c| falls at or below a
closed-form gate threshold tau(p, lam); above the gate the shrunk
magnitude S solves  S - |c| + lam*p*S^(p-1) = 0  on its large branch.

Applied elementwise, this is the E-step of the ALM solver: the matrix
subproblem decouples into one independent scalar problem per entry, so
partitioning across threads is safe and the result does not depend on
the partition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigError

# The fixed point S^(p-1) becomes stiff for tiny p and never shows up in
# practice; reject instead of iterating badly.
MIN_P = 0.1


@dataclass(frozen=True)
class ShrinkageParams:
    """Parameters of the elementwise lp shrinkage operator.

    lam is the penalty weight (1/mu inside the ALM loop); the inner
    fixed-point iteration stops after max_inner_iters steps or when the
    update falls below inner_tol, whichever comes first.
    """

    p: float
    lam: float
    max_inner_iters: int = 50
    inner_tol: float = 1e-12

    def __post_init__(self):
        if not (MIN_P <= self.p <= 1.0):
            raise ConfigError(f"p must lie in [{MIN_P}, 1], got {self.p}")
        if self.lam < 0.0 or not np.isfinite(self.lam):
            raise ConfigError(f"lam must be finite and >= 0, got {self.lam}")
        if self.max_inner_iters < 1:
            raise ConfigError("max_inner_iters must be >= 1")
        if self.inner_tol <= 0.0:
            raise ConfigError("inner_tol must be > 0")


def tau_threshold(p: float, lam: float) -> float:
    """Zero-gate threshold: inputs with |c| <= tau shrink to exactly 0.

    For p = 1 this is lam (the soft-threshold kink), handled as a
    special case because the general formula hits 0**0 there.
    """
    if not (0.0 < p <= 1.0):
        raise ConfigError(f"p must lie in (0, 1], got {p}")
    if lam < 0.0:
        raise ConfigError(f"lam must be >= 0, got {lam}")
    if lam == 0.0:
        return 0.0
    if p == 1.0:
        return lam
    base = (2.0 * lam * (1.0 - p)) ** (1.0 / (2.0 - p))
    return base + lam * p * base ** (p - 1.0)


def _shrink_magnitudes(mag: np.ndarray, params: ShrinkageParams) -> np.ndarray:
    """Shrunk magnitudes for nonnegative inputs above the gate.

    Fixed point S <- mag - lam*p*S^(p-1), started at S = mag.  Each
    element freezes as soon as its own update drops below inner_tol, so
    a value's trajectory is identical whether it is solved alone or
    inside a batch.
    """
    p, lam = params.p, params.lam
    s = mag.copy()
    active = np.ones(s.shape, dtype=bool)
    for _ in range(params.max_inner_iters):
        if not active.any():
            break
        cur = s[active]
        new = mag[active] - lam * p * cur ** (p - 1.0)
        s[active] = new
        still = np.abs(new - cur) >= params.inner_tol
        active[active] = still
    return s


def gst_matrix(H: np.ndarray, params: ShrinkageParams) -> np.ndarray:
    """Apply the shrinkage operator to every entry of H."""
    H = np.asarray(H, dtype=np.float64)
    if params.lam == 0.0:
        return H.copy()
    if params.p == 1.0:
        return np.sign(H) * np.maximum(np.abs(H) - params.lam, 0.0)
    tau = tau_threshold(params.p, params.lam)
    out = np.zeros_like(H)
    above = np.abs(H) > tau
    if above.any():
        mag = np.abs(H[above])
        out[above] = np.sign(H[above]) * _shrink_magnitudes(mag, params)
    return out


def gst_scalar(c: float, params: ShrinkageParams) -> float:
    """Global minimizer of lam*|y|^p + 0.5*(y-c)^2.

    Odd in c, and never larger than |c| in magnitude.
    """
    return float(gst_matrix(np.array([[c]], dtype=np.float64), params)[0, 0])
