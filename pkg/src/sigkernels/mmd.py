"""Signature-kernel MMD between empirical laws of sequences and the
permutation two-sample test.

The squared MMD between two samples is estimated from Gram blocks,

    mmd2 = mean(K_XX) - 2 mean(K_XY) + mean(K_YY),

with the biased (V-statistic) version as the default test statistic: it is a
squared feature-mean distance, hence non-negative, which keeps the one-sided
permutation p-value simple.  The test computes the pooled Gram exactly once
and re-slices it for every label permutation; the p-value convention
(1 + #{permuted >= observed}) / (B + 1) is exactly valid at finite B.

Hyperparameters must come from an explicit configuration or grid; nothing
here ever tunes them from the data under test (in particular no bandwidth
heuristics, which are unreliable for sequence kernels).  A grid is combined
by taking the supremum of the per-configuration MMDs, recomputed per
permutation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import KernelConfig, canonical_json
from .errors import ConfigError, DataError
from .gram import gram
from .sequences import Sequence, as_sequence

__all__ = ["SampleSet", "TestResult", "mmd2", "sup_mmd", "permutation_test"]

ESTIMATORS = ("biased", "unbiased")


@dataclass(frozen=True, eq=False)
class SampleSet:
    """An iid sample of trajectories from one law."""

    sequences: tuple[Sequence, ...]
    label: str = ""

    def __post_init__(self) -> None:
        seqs = tuple(as_sequence(s) for s in self.sequences)
        if not seqs:
            raise DataError("sample set is empty")
        dims = {s.dim for s in seqs}
        if len(dims) != 1:
            raise DataError(f"sample set has mixed dimensions: {sorted(dims)}")
        object.__setattr__(self, "sequences", seqs)

    def __len__(self) -> int:
        return len(self.sequences)


@dataclass(frozen=True)
class TestResult:
    mmd2: float
    p_value: float
    reject: bool
    alpha: float
    permutations: int
    seed: int
    estimator: str

    def to_dict(self) -> dict:
        return {
            "mmd2": self.mmd2,
            "p_value": self.p_value,
            "reject": self.reject,
            "alpha": self.alpha,
            "permutations": self.permutations,
            "seed": self.seed,
            "estimator": self.estimator,
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())


def mmd2(
    gram_xx: np.ndarray,
    gram_yy: np.ndarray,
    gram_xy: np.ndarray,
    estimator: str = "biased",
) -> float:
    """Squared MMD from precomputed Gram blocks.

    biased uses plain block means; unbiased drops the within-sample diagonals
    (and therefore needs at least two samples on each side).
    """
    if estimator not in ESTIMATORS:
        raise ConfigError(f"estimator must be one of {ESTIMATORS}, got {estimator!r}")
    gxx = np.asarray(gram_xx, dtype=np.float64)
    gyy = np.asarray(gram_yy, dtype=np.float64)
    gxy = np.asarray(gram_xy, dtype=np.float64)
    m, n = gxy.shape
    if gxx.shape != (m, m) or gyy.shape != (n, n):
        raise DataError(
            f"inconsistent block shapes: xx {gxx.shape}, yy {gyy.shape}, xy {gxy.shape}"
        )
    if estimator == "biased":
        return float(gxx.mean() - 2.0 * gxy.mean() + gyy.mean())
    if m < 2 or n < 2:
        raise DataError("unbiased estimator needs at least 2 samples per side")
    xx = (gxx.sum() - np.trace(gxx)) / (m * (m - 1))
    yy = (gyy.sum() - np.trace(gyy)) / (n * (n - 1))
    return float(xx - 2.0 * gxy.mean() + yy)


def _split_stat(pooled: np.ndarray, ix: np.ndarray, iy: np.ndarray, estimator: str) -> float:
    return mmd2(
        pooled[np.ix_(ix, ix)], pooled[np.ix_(iy, iy)], pooled[np.ix_(ix, iy)], estimator
    )


def sup_mmd(
    X: SampleSet,
    Y: SampleSet,
    grid: list[KernelConfig],
    workers: int = 1,
    estimator: str = "biased",
) -> tuple[float, KernelConfig]:
    """Max over the grid of the per-configuration MMD, with the argmax config."""
    if not grid:
        raise ConfigError("empty hyperparameter grid")
    pooled = list(X.sequences) + list(Y.sequences)
    ix = np.arange(len(X))
    iy = np.arange(len(X), len(X) + len(Y))
    best: tuple[float, KernelConfig] | None = None
    for cfg in grid:
        stat = _split_stat(gram(pooled, cfg, workers).values, ix, iy, estimator)
        if best is None or stat > best[0]:
            best = (stat, cfg)
    return best


def permutation_test(
    X: SampleSet,
    Y: SampleSet,
    kernel_cfg: KernelConfig,
    permutations: int = 200,
    alpha: float = 0.05,
    seed: int = 0,
    grid: list[KernelConfig] | None = None,
    workers: int = 1,
    estimator: str = "biased",
) -> TestResult:
    """Two-sample permutation test of equality of laws.

    The pooled Gram is computed once per configuration; each of the B label
    permutations re-slices the same matrices.  Permutation b draws its
    indices from an RNG stream derived from (seed, b), so the result is
    reproducible and independent of any parallel execution order.
    """
    if permutations < 1:
        raise ConfigError(f"permutations must be >= 1, got {permutations}")
    if not 0.0 < alpha < 1.0:
        raise ConfigError(f"alpha must be in (0, 1), got {alpha}")
    if X.sequences[0].dim != Y.sequences[0].dim:
        raise DataError(f"dimension mismatch: {X.sequences[0].dim} vs {Y.sequences[0].dim}")
    configs = list(grid) if grid else [kernel_cfg]
    if not configs:
        raise ConfigError("empty hyperparameter grid")

    pooled = list(X.sequences) + list(Y.sequences)
    m, total = len(X), len(X) + len(Y)
    grams = [gram(pooled, cfg, workers).values for cfg in configs]

    def stat(ix: np.ndarray, iy: np.ndarray) -> float:
        return max(_split_stat(g, ix, iy, estimator) for g in grams)

    observed = stat(np.arange(m), np.arange(m, total))
    streams = np.random.SeedSequence(seed).spawn(permutations)
    exceed = 0
    for child in streams:
        perm = np.random.default_rng(child).permutation(total)
        if stat(perm[:m], perm[m:]) >= observed:
            exceed += 1
    p_value = (1.0 + exceed) / (permutations + 1.0)
    return TestResult(
        mmd2=float(observed),
        p_value=float(p_value),
        reject=bool(p_value <= alpha),
        alpha=float(alpha),
        permutations=int(permutations),
        seed=int(seed),
        estimator=estimator,
    )
