"""Untruncated signature kernel via a Goursat-type PDE.

Restricting both sequences to growing prefixes defines a surface
K(s, t) = k(x|[0,s], y|[0,t]) that solves the hyperbolic equation

    d^2 K / ds dt = nabla(ceil s, ceil t) * K,    K(s, 0) = K(0, t) = 1,

whose coefficient is piecewise constant on unit cells of the sequence grid.
A dyadic refinement of order q splits every cell into 2^q sub-cells per axis;
the coefficient of a sub-cell is the parent cell's increment value divided by
2^(2q), which is exact for sequences lifted by piecewise-linear interpolation
in the static feature space.  The explicit marching update

    K[i+1, j+1] = K[i+1, j] + K[i, j+1] - K[i, j]
                  + nabla_hat[i, j] * (K[i+1, j] + K[i, j+1]) / 2

is first-order consistent and is swept along anti-diagonals so each step is a
vectorized update of one wavefront.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, NumericalGuardError
from .sequences import Sequence
from .static_kernels import StaticKernelSpec, increment_matrix

__all__ = ["PdeGrid", "RefineResult", "sig_kernel_pde", "solve_pde_grid", "refine_until"]

# 2^24 grid nodes is 128 MiB of float64; enough for dyadic_order 10 on short
# sequences while keeping accidental huge instances from exhausting memory.
DEFAULT_MAX_GRID_NODES = 1 << 24


@dataclass(frozen=True, eq=False)
class PdeGrid:
    """Solution surface on the refined grid; boundary rows/columns are all 1."""

    dyadic_order: int
    values: np.ndarray

    def bottom_right(self) -> float:
        return float(self.values[-1, -1])


class RefineResult(NamedTuple):
    value: float
    order: int
    converged: bool


def _march(nabla_hat: np.ndarray) -> np.ndarray:
    ni, nj = nabla_hat.shape
    K = np.ones((ni + 1, nj + 1))
    half = 0.5 * nabla_hat
    for d in range(ni + nj - 1):
        lo = max(0, d - nj + 1)
        hi = min(ni - 1, d)
        i = np.arange(lo, hi + 1)
        j = d - i
        left = K[i + 1, j]
        down = K[i, j + 1]
        corner = K[i, j]
        K[i + 1, j + 1] = left + down - corner + half[i, j] * (left + down)
    return K


def solve_pde_grid(
    x: Sequence,
    y: Sequence,
    spec: StaticKernelSpec,
    dyadic_order: int,
    max_grid_nodes: int = DEFAULT_MAX_GRID_NODES,
) -> PdeGrid:
    """Solve the Goursat problem and return the full refined solution grid."""
    if dyadic_order < 0:
        raise ConfigError(f"dyadic_order must be >= 0, got {dyadic_order}")
    factor = 1 << dyadic_order
    ni = x.num_segments * factor
    nj = y.num_segments * factor
    if (ni + 1) * (nj + 1) > max_grid_nodes:
        raise NumericalGuardError(
            f"PDE grid of {(ni + 1) * (nj + 1)} nodes exceeds the cap of {max_grid_nodes}; "
            "lower dyadic_order or shorten the sequences"
        )
    nabla = increment_matrix(spec, x, y)
    if nabla.size == 0:
        return PdeGrid(dyadic_order, np.ones((ni + 1, nj + 1)))
    nabla_hat = np.repeat(np.repeat(nabla, factor, axis=0), factor, axis=1) / (factor * factor)
    return PdeGrid(dyadic_order, _march(nabla_hat))


def sig_kernel_pde(
    x: Sequence,
    y: Sequence,
    spec: StaticKernelSpec,
    dyadic_order: int,
    max_grid_nodes: int = DEFAULT_MAX_GRID_NODES,
) -> float:
    """Untruncated signature kernel approximation at a fixed dyadic refinement."""
    return solve_pde_grid(x, y, spec, dyadic_order, max_grid_nodes).bottom_right()


def refine_until(
    x: Sequence,
    y: Sequence,
    spec: StaticKernelSpec,
    tol: float,
    max_order: int = 10,
    max_grid_nodes: int = DEFAULT_MAX_GRID_NODES,
) -> RefineResult:
    """Double the dyadic refinement until two consecutive values agree within tol.

    The returned value is the finest evaluation performed and the returned
    order is the coarsest refinement already within tol of it, so an exactly
    resolved instance (for example a constant sequence) converges at order 0.
    If the tolerance is not met by max_order the last value is returned
    flagged as unconverged rather than raised, so callers can still inspect
    the best available number.
    """
    if not tol > 0:
        raise ConfigError(f"tol must be > 0, got {tol}")
    if max_order < 0:
        raise ConfigError(f"max_order must be >= 0, got {max_order}")
    prev = sig_kernel_pde(x, y, spec, 0, max_grid_nodes)
    for order in range(1, max_order + 1):
        cur = sig_kernel_pde(x, y, spec, order, max_grid_nodes)
        if abs(cur - prev) < tol:
            return RefineResult(cur, order - 1, True)
        prev = cur
    return RefineResult(prev, max_order, False)
