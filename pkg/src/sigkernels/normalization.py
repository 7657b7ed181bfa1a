"""Robust normalization of signature features.

Large sequences blow the higher kernel levels up polynomially, which makes
mean embeddings arbitrarily sensitive to a single outlier.  The fix applied
here rescales the degree-m feature component of each sequence by theta^m,
where theta >= 0 is chosen per sequence so that the squared feature norm is
pulled back onto a bounded target:

    sum_m theta^(2m) * a_m = psi(sum_m a_m),      a_m = k_m(x, x),

with psi the identity below a threshold C and a power-law approach to the
cap C * (1 + 1/alpha) above it.  The left side is a polynomial of degree 2M
in theta with non-negative coefficients, so the root is unique and bisection
on [0, 1] is unconditionally safe.  The resulting kernel values are bounded
uniformly over all inputs, which is the operational content of B-robustness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError
from .sequences import Sequence
from .static_kernels import StaticKernelSpec
from .truncated import LevelValues, sig_kernel_levels

__all__ = [
    "NormalizationParams",
    "psi",
    "normalization_root",
    "robust_sig_kernel",
    "combine_normalized",
]

_ROOT_REL_TOL = 1e-12
_ROOT_MAX_ITER = 200
# Tiny negative diagonal levels are rounding noise from the DP's mixed-sign
# sums; anything below this relative floor signals a genuine upstream fault.
_NEGATIVE_LEVEL_TOL = 1e-10


@dataclass(frozen=True)
class NormalizationParams:
    """Threshold C and decay exponent alpha of the normalization target psi.

    psi is the identity up to C and saturates at C * (1 + 1/alpha); C >= 1 is
    required so that the degree-0 coefficient (always 1) stays reachable.
    """

    threshold: float = 4.0
    decay: float = 1.0

    def __post_init__(self) -> None:
        if not self.threshold >= 1.0:
            raise ConfigError(f"normalization threshold must be >= 1, got {self.threshold}")
        if not self.decay > 0:
            raise ConfigError(f"normalization decay must be > 0, got {self.decay}")

    def cap(self) -> float:
        return self.threshold * (1.0 + 1.0 / self.decay)


def psi(a: float, params: NormalizationParams = NormalizationParams()) -> float:
    """Bounded normalization target: identity below C, power-law decay above.

    For a > C returns C + C^(1+alpha) * (C^(-alpha) - a^(-alpha)) / alpha,
    which increases continuously from C towards the cap C * (1 + 1/alpha).
    """
    if a < 0:
        raise DataError(f"psi expects a non-negative argument, got {a}")
    C = params.threshold
    alpha = params.decay
    if a <= C:
        return float(a)
    return float(C + C ** (1.0 + alpha) * (C ** (-alpha) - a ** (-alpha)) / alpha)


def _clean_diag_levels(diag_levels) -> np.ndarray:
    vals = np.asarray(
        diag_levels.values if isinstance(diag_levels, LevelValues) else diag_levels,
        dtype=np.float64,
    )
    if vals.ndim != 1 or vals.size < 1:
        raise DataError(f"diagonal levels must be a 1-d array, got shape {vals.shape}")
    if abs(vals[0] - 1.0) > 1e-9:
        raise DataError(f"diagonal level 0 must be 1, got {vals[0]}")
    floor = -_NEGATIVE_LEVEL_TOL * max(1.0, float(np.max(vals)))
    if np.any(vals < floor):
        raise DataError(
            "negative diagonal level values; squared feature norms cannot be negative"
        )
    return np.maximum(vals, 0.0)


def normalization_root(
    diag_levels, params: NormalizationParams = NormalizationParams()
) -> float:
    """The unique theta >= 0 with sum_m theta^(2m) a_m = psi(sum_m a_m).

    Takes the diagonal level values a_m = k_m(x, x) (a LevelValues or a plain
    array).  If the total mass is below the threshold, psi is the identity
    and theta = 1 exactly; otherwise the root lies in (0, 1) and is found by
    bisection, returning the lower bracket end so the attained polynomial
    value never overshoots the target.
    """
    a = _clean_diag_levels(diag_levels)
    total = float(np.sum(a))
    if total <= params.threshold or not np.any(a[1:] > 0):
        return 1.0
    target = psi(total, params)

    def poly(theta: float) -> float:
        # sum_m a_m * (theta^2)^m by Horner.
        t2 = theta * theta
        acc = 0.0
        for coeff in a[::-1]:
            acc = acc * t2 + coeff
        return acc

    lo, hi = 0.0, 1.0
    for _ in range(_ROOT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if poly(mid) <= target:
            lo = mid
        else:
            hi = mid
        if target - poly(lo) <= _ROOT_REL_TOL * target:
            break
    return lo


def combine_normalized(
    cross_levels: np.ndarray, theta_x: float, theta_y: float
) -> float:
    """Inner product of degree-wise rescaled features:
    sum_m (theta_x * theta_y)^m * k_m(x, y)."""
    cross = np.asarray(cross_levels, dtype=np.float64)
    scalings = (theta_x * theta_y) ** np.arange(cross.size)
    return float(np.sum(cross * scalings))


def robust_sig_kernel(
    x: Sequence,
    y: Sequence,
    spec: StaticKernelSpec,
    level: int,
    params: NormalizationParams = NormalizationParams(),
    level_weights=None,
) -> float:
    """Robust (normalized) truncated signature kernel.

    Each argument's features are rescaled degree-wise by its own root theta,
    so the diagonal value equals psi(sum_m k_m(x, x)) and the kernel is
    bounded by C * (1 + 1/alpha) uniformly over all inputs.
    """
    cross = sig_kernel_levels(x, y, spec, level, level_weights)
    theta_x = normalization_root(sig_kernel_levels(x, x, spec, level, level_weights), params)
    theta_y = normalization_root(sig_kernel_levels(y, y, spec, level, level_weights), params)
    return combine_normalized(cross.values, theta_x, theta_y)
