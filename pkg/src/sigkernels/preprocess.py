"""Sequence preprocessing: time augmentation, lead-lag, subsampling, standardization."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .config import PreprocessConfig
from .errors import ConfigError
from .sequences import Dataset, Sequence

__all__ = ["add_time", "lead_lag", "subsample", "standardize", "apply_pipeline", "StandardizeStats"]


def add_time(x: Sequence, scale: float = 1.0) -> Sequence:
    """Prepend a time coordinate running from 0 to `scale` over the sequence.

    Point i gains the leading coordinate scale * i / L, which pins the
    1-variation of the time channel to `scale` regardless of length and makes
    differently parametrized sequences distinguishable.  A single-point
    sequence gets time coordinate 0.
    """
    if not scale > 0:
        raise ConfigError(f"time scale must be > 0, got {scale}")
    n = len(x)
    t = np.zeros(n) if n == 1 else scale * np.arange(n) / (n - 1)
    return Sequence(np.column_stack([t, x.points]))


def lead_lag(x: Sequence) -> Sequence:
    """Interleave the sequence with a lagged copy: (2L+1) points in R^(2d).

    Points alternate (x_i, x_i) -> (x_{i+1}, x_i) -> (x_{i+1}, x_{i+1}); the
    first d coordinates lead, the last d lag.
    """
    pts = x.points
    n, d = pts.shape
    out = np.empty((2 * (n - 1) + 1, 2 * d))
    out[0::2, :d] = pts
    out[0::2, d:] = pts
    out[1::2, :d] = pts[1:]
    out[1::2, d:] = pts[:-1]
    return Sequence(out)


def subsample(x: Sequence, stride: int) -> Sequence:
    """Keep points 0, stride, 2*stride, ... and always the final point."""
    if stride < 1:
        raise ConfigError(f"stride must be >= 1, got {stride}")
    n = len(x)
    idx = list(range(0, n, stride))
    if idx[-1] != n - 1:
        idx.append(n - 1)
    return Sequence(x.points[idx])


class StandardizeStats(NamedTuple):
    mean: np.ndarray
    std: np.ndarray


def standardize(ds: Dataset) -> tuple[Dataset, StandardizeStats]:
    """Center and rescale every coordinate to mean 0 / std 1 across the dataset.

    The statistics pool all points of all sequences (population std).  A
    zero-variance coordinate is centered but not rescaled (std 1 substituted).
    """
    stacked = np.concatenate([s.points for s in ds.sequences], axis=0)
    mean = stacked.mean(axis=0)
    std = stacked.std(axis=0)
    std = np.where(std == 0.0, 1.0, std)
    out = ds.map(lambda s: Sequence((s.points - mean) / std))
    return out, StandardizeStats(mean, std)


def apply_pipeline(ds: Dataset, cfg: PreprocessConfig) -> Dataset:
    """Apply the configured steps in the fixed order
    subsample -> standardize -> lead_lag -> add_time."""
    if cfg.subsample > 1:
        ds = ds.map(lambda s: subsample(s, cfg.subsample))
    if cfg.standardize:
        ds, _ = standardize(ds)
    if cfg.lead_lag:
        ds = ds.map(lead_lag)
    if cfg.add_time is not None:
        ds = ds.map(lambda s: add_time(s, cfg.add_time))
    return ds
