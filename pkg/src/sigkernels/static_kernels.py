"""Static kernels on R^d and the increment matrix they induce on sequence pairs.

The increment matrix is the only quantity the sequence-kernel algorithms need
from the static kernel: entry (i, j) is the second-order finite difference

    nabla[i, j] = k(x_{i-1}, y_{j-1}) - k(x_i, y_{j-1}) - k(x_{i-1}, y_j) + k(x_i, y_j)

of the static Gram grid over consecutive points of both sequences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError
from .sequences import Sequence

__all__ = [
    "FAMILIES",
    "StaticKernelSpec",
    "kernel_eval",
    "gram_grid",
    "gram_grid_batch",
    "increment_matrix",
    "increment_matrix_batch",
]

FAMILIES = ("linear", "rbf", "exponential")


@dataclass(frozen=True)
class StaticKernelSpec:
    """A static kernel family on R^d plus its hyperparameters.

    linear:       k(u, v) = scale * <u, v>
    rbf:          k(u, v) = scale * exp(-|u - v|^2 / (2 * bandwidth^2))
    exponential:  k(u, v) = scale * exp(-|u - v| / bandwidth)

    The bandwidth is in length units of the state space; it is ignored by the
    linear family.
    """

    family: str = "linear"
    bandwidth: float = 1.0
    scale: float = 1.0

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown kernel family {self.family!r}, expected one of {FAMILIES}")
        if self.family != "linear" and not self.bandwidth > 0:
            raise ConfigError(f"bandwidth must be > 0, got {self.bandwidth}")
        if not self.scale > 0:
            raise ConfigError(f"scale must be > 0, got {self.scale}")


def _check_points(u: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape or u.ndim != 1:
        raise DataError(f"points must be 1-d and share a dimension, got {u.shape} vs {v.shape}")
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
        raise DataError("non-finite point passed to static kernel")
    return u, v


def kernel_eval(spec: StaticKernelSpec, u: np.ndarray, v: np.ndarray) -> float:
    """Evaluate the static kernel at a single pair of points."""
    u, v = _check_points(u, v)
    return float(gram_grid(spec, u[None, :], v[None, :])[0, 0])


def gram_grid_batch(spec: StaticKernelSpec, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Static Gram grids for a batch of point lists.

    X has shape (B, P, d) and Y shape (B, Q, d); the result G has shape
    (B, P, Q) with G[b, i, j] = k(X[b, i], Y[b, j]).
    """
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if spec.family == "linear":
        return spec.scale * np.einsum("bpd,bqd->bpq", X, Y)
    # Squared distances via the expansion |u-v|^2 = |u|^2 + |v|^2 - 2<u,v>,
    # clipped at zero against rounding.
    sq = (
        np.einsum("bpd,bpd->bp", X, X)[:, :, None]
        + np.einsum("bqd,bqd->bq", Y, Y)[:, None, :]
        - 2.0 * np.einsum("bpd,bqd->bpq", X, Y)
    )
    np.maximum(sq, 0.0, out=sq)
    if spec.family == "rbf":
        return spec.scale * np.exp(-sq / (2.0 * spec.bandwidth**2))
    return spec.scale * np.exp(-np.sqrt(sq) / spec.bandwidth)


def gram_grid(spec: StaticKernelSpec, P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Static Gram grid k(P_i, Q_j) for two point lists of shape (p, d), (q, d)."""
    P = np.asarray(P, dtype=np.float64)
    Q = np.asarray(Q, dtype=np.float64)
    return gram_grid_batch(spec, P[None], Q[None])[0]


def increment_matrix_batch(spec: StaticKernelSpec, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Increment matrices for a batch of sequence point arrays.

    X has shape (B, Lx+1, d), Y shape (B, Ly+1, d); result (B, Lx, Ly).
    """
    G = gram_grid_batch(spec, X, Y)
    # Grouped as (a + d) - (b + c) so that swapping the sequences transposes
    # the result bit-for-bit (the grouping is invariant under b <-> c).
    return (G[:, :-1, :-1] + G[:, 1:, 1:]) - (G[:, 1:, :-1] + G[:, :-1, 1:])


def increment_matrix(spec: StaticKernelSpec, x: Sequence, y: Sequence) -> np.ndarray:
    """Increment matrix of a pair of sequences, shape (Lx, Ly).

    A single-point sequence has no segments; the result is then a 0-sized
    matrix (and the signature kernel of such a pair is 1).
    """
    if x.dim != y.dim:
        raise DataError(f"dimension mismatch: {x.dim} vs {y.dim}")
    return increment_matrix_batch(spec, x.points[None], y.points[None])[0]
