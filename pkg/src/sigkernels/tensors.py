"""Brute-force truncated tensor algebra over R^d.

This module is the ground-truth oracle for the fast kernel algorithms: it
materializes graded tensors coefficient by coefficient (degree m stored as a
flat array of d^m entries in row-major multi-index order) and evaluates the
signature kernel by literal enumeration of the nested sums.  Everything is
exponential in the degree and is meant for tiny instances only.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, NumericalGuardError
from .sequences import Sequence
from .static_kernels import StaticKernelSpec, increment_matrix
from .truncated import LevelValues

__all__ = [
    "TruncatedTensorSeq",
    "identity_tensors",
    "mon_features",
    "tensor_product",
    "tensor_inner",
    "signature_oracle",
    "enumerate_levels",
    "enumerate_sigkernel",
    "DEFAULT_ENUMERATION_CAP",
]

# Refuse enumeration when (Lx * Ly) ** M exceeds this many index tuples.
DEFAULT_ENUMERATION_CAP = 10**7


@dataclass(frozen=True, eq=False)
class TruncatedTensorSeq:
    """A graded sequence of dense tensors of degrees 0..M over R^d.

    Entry m is a flat float64 array with d^m coefficients; the coefficient of
    the multi-index (i_1, ..., i_m) sits at position sum_k i_k * d^(m-k)
    (row-major).  Degree 0 is the single scalar coefficient.
    """

    dim: int
    level: int
    tensors: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise DataError(f"dimension must be >= 1, got {self.dim}")
        if self.level < 0:
            raise DataError(f"level must be >= 0, got {self.level}")
        if len(self.tensors) != self.level + 1:
            raise DataError(f"expected {self.level + 1} tensors, got {len(self.tensors)}")
        frozen = []
        for m, t in enumerate(self.tensors):
            t = np.asarray(t, dtype=np.float64).reshape(-1)
            if t.size != self.dim**m:
                raise DataError(f"degree-{m} entry must have {self.dim ** m} coefficients, got {t.size}")
            t = t.copy()
            t.flags.writeable = False
            frozen.append(t)
        object.__setattr__(self, "tensors", tuple(frozen))

    def scalar(self) -> float:
        return float(self.tensors[0][0])


def _check_compatible(s: TruncatedTensorSeq, t: TruncatedTensorSeq) -> None:
    if s.dim != t.dim:
        raise DataError(f"dimension mismatch: {s.dim} vs {t.dim}")
    if s.level != t.level:
        raise DataError(f"level mismatch: {s.level} vs {t.level}")


def identity_tensors(dim: int, level: int) -> TruncatedTensorSeq:
    """The unit of the truncated tensor algebra: (1, 0, ..., 0)."""
    tensors = [np.zeros(dim**m) for m in range(level + 1)]
    tensors[0][0] = 1.0
    return TruncatedTensorSeq(dim, level, tuple(tensors))


def mon_features(x: np.ndarray, level: int) -> TruncatedTensorSeq:
    """Monomial features of a point: degree m holds the outer power x^{@m}/m!.

    Written multiplicatively, this is the truncated tensor exponential of x.
    """
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(x)):
        raise DataError("non-finite point")
    tensors = [np.ones(1)]
    for m in range(1, level + 1):
        # x^{@m}/m! = (x^{@(m-1)}/(m-1)!) @ x / m with row-major flattening.
        tensors.append(np.outer(tensors[-1], x).reshape(-1) / m)
    return TruncatedTensorSeq(x.size, level, tuple(tensors))


def tensor_product(s: TruncatedTensorSeq, t: TruncatedTensorSeq) -> TruncatedTensorSeq:
    """Truncated graded product: degree m of the result is sum_{a+b=m} s_a @ t_b.

    The product is non-commutative; degrees above the common truncation level
    are discarded.
    """
    _check_compatible(s, t)
    out = []
    for m in range(s.level + 1):
        acc = np.zeros(s.dim**m)
        for a in range(m + 1):
            acc += np.outer(s.tensors[a], t.tensors[m - a]).reshape(-1)
        out.append(acc)
    return TruncatedTensorSeq(s.dim, s.level, tuple(out))


def tensor_inner(s: TruncatedTensorSeq, t: TruncatedTensorSeq) -> float:
    """Graded inner product sum_m <s_m, t_m> (coefficient-wise dot per degree)."""
    _check_compatible(s, t)
    return float(sum(np.dot(a, b) for a, b in zip(s.tensors, t.tensors)))


def signature_oracle(x: Sequence, level: int) -> TruncatedTensorSeq:
    """Truncated signature of the piecewise-linear interpolation of a sequence.

    Concatenation turns into tensor multiplication, and the signature of one
    linear segment is the monomial feature sequence of its increment, so the
    result is the ordered product of mon_features over the segment increments.
    """
    sig = identity_tensors(x.dim, level)
    for delta in x.increments():
        sig = tensor_product(sig, mon_features(delta, level))
    return sig


def _repetition_factorial(index_tuple: tuple[int, ...]) -> float:
    """i! = product of factorials of the run lengths inside a sorted tuple."""
    out = 1.0
    for _, grp in itertools.groupby(index_tuple):
        n = sum(1 for _ in grp)
        for k in range(2, n + 1):
            out *= k
    return out


def enumerate_levels(nabla: np.ndarray, level: int) -> LevelValues:
    """Literal enumeration of the nested sums over an increment matrix.

    Degree m sums, over all pairs of non-decreasing multi-indices
    (i_1 <= ... <= i_m, j_1 <= ... <= j_m), the products prod_r nabla[i_r, j_r]
    weighted by 1/(i! * j!).  Per-level accumulation uses math.fsum, so the
    only rounding left is in the individual products.
    """
    nabla = np.asarray(nabla, dtype=np.float64)
    Lx, Ly = nabla.shape
    values = np.zeros(level + 1)
    values[0] = 1.0
    for m in range(1, level + 1):
        terms = []
        for I in itertools.combinations_with_replacement(range(Lx), m):
            wi = _repetition_factorial(I)
            for J in itertools.combinations_with_replacement(range(Ly), m):
                prod = 1.0
                for a, b in zip(I, J):
                    prod *= nabla[a, b]
                terms.append(prod / (wi * _repetition_factorial(J)))
        values[m] = math.fsum(terms)
    return LevelValues(values)


def enumerate_sigkernel(
    x: Sequence,
    y: Sequence,
    spec: StaticKernelSpec,
    level: int,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> LevelValues:
    """Truncated signature kernel by exhaustive enumeration.

    Works for any static kernel through the increment matrix.  Cost grows as
    (Lx * Ly)^M, so instances beyond `cap` index tuples are refused.
    """
    Lx, Ly = x.num_segments, y.num_segments
    if Lx < 1 or Ly < 1:
        raise DataError("enumeration needs at least one segment per sequence")
    if level >= 1 and (Lx * Ly) ** level > cap:
        raise NumericalGuardError(
            f"enumeration of (Lx*Ly)^M = ({Lx}*{Ly})^{level} index tuples exceeds cap {cap}"
        )
    return enumerate_levels(increment_matrix(spec, x, y), level)
