"""Exact truncated signature kernel via a Horner-style dynamic program.

The degree-m contribution to the kernel of two sequences is a nested sum over
pairs of non-decreasing multi-indices (i_1 <= ... <= i_m, j_1 <= ... <= j_m)
of products of increment-matrix entries, each pair weighted by 1/(i! * j!)
where i! is the product of factorials of the repetition counts inside the
multi-index.  The dynamic program below sweeps the degree m outermost and
maintains, per grid cell (i, j), accumulators split by the trailing run
lengths of both multi-indices; extending a run of length n by one more
repetition contributes the divisor n+1, which reproduces the repetition
factorials incrementally.  Total work is O(M^3 L^2) for truncation M and
sequence length L.

The hot loop is a compiled (numba) kernel over a batch of increment matrices
of a common shape: one call per Gram chunk, scratch buffers reused across
pairs, GIL released.  Each pair is processed independently with a fixed
operation order, so results are bit-identical regardless of batching,
chunking, or threading.  A pure-numpy fallback keeps the module importable
without numba (same algorithm; last-ulp rounding may differ).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .sequences import Sequence
from .static_kernels import StaticKernelSpec, increment_matrix, kernel_eval

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only on minimal installs
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def decorate(fn):
            return fn

        return decorate

__all__ = [
    "LevelValues",
    "levels_from_increments",
    "sig_kernel_levels",
    "sig_kernel",
    "mon_kernel_horner",
]


@dataclass(frozen=True, eq=False)
class LevelValues:
    """Per-degree contributions (k_0, ..., k_M); their sum is the kernel.

    values[0] is always exactly 1 (the empty-word term).  On the diagonal
    (x == y) every entry is a squared feature norm, hence >= 0 up to rounding.
    """

    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1 or vals.size < 1:
            raise ValueError(f"level values must be a 1-d array, got shape {vals.shape}")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def level(self) -> int:
        return self.values.size - 1

    def total(self) -> float:
        return float(np.sum(self.values))

    def __iter__(self):
        return iter(self.values)


@njit(cache=True, nogil=True)
def _dp_levels(nabla, level):  # pragma: no cover - compiled
    B, Lx, Ly = nabla.shape
    M = level
    out = np.zeros((B, M + 1))
    # R[i, j, a, c]: chains of the current degree ending at grid cell (i, j)
    # with trailing run lengths a+1 / c+1, weighted by increment products and
    # the repetition factorials collected so far.  The cell-major layout lets
    # each degree stream the state once, updating cells in place; everything
    # a later cell needs from earlier ones is carried in running prefix
    # aggregates, so the live working set stays tiny at every size.
    R = np.empty((Lx, Ly, M, M))
    colsum = np.empty(Ly)  # per column: total of rows above
    colacc = np.empty((Ly, M))  # per column: column-marginal of rows above
    rowacc = np.empty(M)  # within a row: row-marginal of cells to the left
    rowbuf = np.empty(Ly)  # totals of the current row before overwrite
    row_kept = np.empty(M)  # old cell block marginals
    col_kept = np.empty(M)
    for b in range(B):
        out[b, 0] = 1.0
        nab = nabla[b]
        s1 = 0.0
        for i in range(Lx):
            for j in range(Ly):
                v = nab[i, j]
                R[i, j, 0, 0] = v
                s1 += v
        out[b, 1] = s1
        for m in range(2, M + 1):
            p = m - 1  # run-state extent of the previous degree
            sm = 0.0
            for j in range(Ly):
                colsum[j] = 0.0
                for c in range(p):
                    colacc[j, c] = 0.0
            for i in range(Lx):
                pref = 0.0  # strict double prefix of old totals at (i, j)
                for a in range(p):
                    rowacc[a] = 0.0
                for j in range(Ly):
                    g = nab[i, j]
                    t = 0.0
                    for a in range(p):
                        ra = 0.0
                        for c in range(p):
                            ra += R[i, j, a, c]
                        row_kept[a] = ra
                        t += ra
                    for c in range(p):
                        ca = 0.0
                        for a in range(p):
                            ca += R[i, j, a, c]
                        col_kept[c] = ca
                    # Both indices advanced: run lengths reset to (1, 1).
                    # Interior first, descending, so old values are consumed
                    # before their slot is overwritten.
                    for a in range(p - 1, -1, -1):
                        for c in range(p - 1, -1, -1):
                            v = g * R[i, j, a, c] / ((a + 2.0) * (c + 2.0))
                            R[i, j, a + 1, c + 1] = v
                            sm += v
                    for a in range(p):
                        v = g * rowacc[a] / (a + 2.0)  # row index repeats
                        R[i, j, a + 1, 0] = v
                        sm += v
                    for c in range(p):
                        v = g * colacc[j, c] / (c + 2.0)  # column repeats
                        R[i, j, 0, c + 1] = v
                        sm += v
                    v = g * pref
                    R[i, j, 0, 0] = v
                    sm += v
                    for a in range(p):
                        rowacc[a] += row_kept[a]
                    for c in range(p):
                        colacc[j, c] += col_kept[c]
                    rowbuf[j] = t
                    pref += colsum[j]
                for j in range(Ly):
                    colsum[j] += rowbuf[j]
            out[b, m] = sm
    return out


def _exclusive_prefix_2d(T: np.ndarray) -> np.ndarray:
    """P[..., i, j] = sum of T[..., i', j'] over i' < i and j' < j."""
    C = T[..., :-1, :-1].cumsum(axis=-2).cumsum(axis=-1)
    P = np.empty_like(T)
    P[..., 0, :] = 0.0
    P[..., :, 0] = 0.0
    P[..., 1:, 1:] = C
    return P


def _exclusive_prefix(T: np.ndarray, axis: int) -> np.ndarray:
    """Exclusive cumulative sum along one axis."""
    P = np.empty_like(T)
    head = [slice(None)] * T.ndim
    head[axis] = slice(0, 1)
    P[tuple(head)] = 0.0
    src = [slice(None)] * T.ndim
    dst = [slice(None)] * T.ndim
    src[axis] = slice(None, -1)
    dst[axis] = slice(1, None)
    np.cumsum(T[tuple(src)], axis=axis, out=P[tuple(dst)])
    return P


def _dp_levels_numpy(nabla: np.ndarray, level: int) -> np.ndarray:
    """Vectorized fallback of the same dynamic program."""
    B, Lx, Ly = nabla.shape
    out = np.zeros((B, level + 1))
    out[:, 0] = 1.0
    R = nabla[:, None, None, :, :].copy()
    out[:, 1] = R.reshape(B, -1).sum(axis=1)
    for m in range(2, level + 1):
        row_kept = R.sum(axis=2)
        col_kept = R.sum(axis=1)
        total = row_kept.sum(axis=1)
        both_advanced = _exclusive_prefix_2d(total)
        col_advanced = _exclusive_prefix(row_kept, axis=-1)
        row_advanced = _exclusive_prefix(col_kept, axis=-2)
        div = np.arange(2, m + 1, dtype=np.float64)
        Rn = np.empty((B, m, m, Lx, Ly))
        np.multiply(nabla, both_advanced, out=Rn[:, 0, 0])
        np.multiply(nabla[:, None], col_advanced, out=Rn[:, 1:, 0])
        Rn[:, 1:, 0] /= div[None, :, None, None]
        np.multiply(nabla[:, None], row_advanced, out=Rn[:, 0, 1:])
        Rn[:, 0, 1:] /= div[None, :, None, None]
        np.multiply(nabla[:, None, None], R, out=Rn[:, 1:, 1:])
        Rn[:, 1:, 1:] /= (div[:, None] * div[None, :])[None, :, :, None, None]
        R = Rn
        out[:, m] = R.reshape(B, -1).sum(axis=1)
    return out


def levels_from_increments(nabla: np.ndarray, level: int) -> np.ndarray:
    """Per-degree kernel values for a batch of increment matrices.

    nabla has shape (B, Lx, Ly); the result has shape (B, level+1) with
    column m holding the degree-m contribution for each pair.  Zero-length
    axes are legal and give (1, 0, ..., 0).
    """
    nabla = np.asarray(nabla, dtype=np.float64)
    if nabla.ndim != 3:
        raise ValueError(f"expected a (B, Lx, Ly) batch of increment matrices, got {nabla.shape}")
    if level < 0:
        raise ConfigError(f"truncation level must be >= 0, got {level}")
    B, Lx, Ly = nabla.shape
    if level == 0 or Lx == 0 or Ly == 0 or B == 0:
        out = np.zeros((B, level + 1))
        out[:, 0] = 1.0
        return out
    if HAVE_NUMBA:
        return _dp_levels(np.ascontiguousarray(nabla), level)
    return _dp_levels_numpy(nabla, level)


def _apply_level_weights(values: np.ndarray, weights) -> np.ndarray:
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != values.shape:
        raise ConfigError(f"level weights must have {values.size} entries, got shape {w.shape}")
    if np.any(w < 0):
        raise ConfigError("level weights must be non-negative")
    if w[0] != 1.0:
        raise ConfigError("the degree-0 level weight must be 1")
    return values * w


def sig_kernel_levels(
    x: Sequence,
    y: Sequence,
    spec: StaticKernelSpec,
    level: int,
    level_weights=None,
) -> LevelValues:
    """Per-degree values of the truncated signature kernel of two sequences.

    An optional weight vector (w_0=1, w_1, ..., w_M) rescales the degree
    contributions; non-negative weights keep the kernel positive definite.
    """
    nabla = increment_matrix(spec, x, y)
    values = levels_from_increments(nabla[None], level)[0]
    if level_weights is not None:
        values = _apply_level_weights(values, level_weights)
    return LevelValues(values)


def sig_kernel(
    x: Sequence,
    y: Sequence,
    spec: StaticKernelSpec,
    level: int,
    level_weights=None,
) -> float:
    """Truncated signature kernel: the sum of the per-degree values."""
    return sig_kernel_levels(x, y, spec, level, level_weights).total()


def mon_kernel_horner(spec: StaticKernelSpec, u: np.ndarray, v: np.ndarray, level: int) -> float:
    """Kernelized monomial kernel sum_{m<=M} k(u,v)^m / (m!)^2, Horner form.

    Evaluated as 1 + k(1 + k/2^2 (1 + ... k/(M-1)^2 (1 + k/M^2))), which needs
    M multiply-adds and keeps intermediate terms well scaled.
    """
    if level < 0:
        raise ConfigError(f"truncation level must be >= 0, got {level}")
    kappa = kernel_eval(spec, u, v)
    acc = 1.0
    for m in range(level, 0, -1):
        acc = 1.0 + kappa / (m * m) * acc
    return acc
