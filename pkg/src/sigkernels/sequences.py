"""Discrete sequences in R^d and datasets of them."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence as PySequence

import numpy as np

from .errors import DataError

__all__ = ["Sequence", "Dataset", "as_sequence"]


@dataclass(frozen=True, eq=False)
class Sequence:
    """An ordered list of L+1 points in R^d (L segments under piecewise-linear
    interpolation).

    The underlying array has shape (L+1, d), is float64 and is frozen
    (read-only) so instances can be shared freely across threads.
    """

    points: np.ndarray

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise DataError(
                f"sequence points must be a 2-d array of shape (L+1, d), got shape {pts.shape}"
            )
        if pts.shape[0] < 1 or pts.shape[1] < 1:
            raise DataError(f"sequence needs >= 1 point and >= 1 coordinate, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise DataError("sequence contains non-finite values")
        pts = pts.copy()
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def num_segments(self) -> int:
        """Number of linear segments L (one less than the number of points)."""
        return self.points.shape[0] - 1

    def increments(self) -> np.ndarray:
        """The L segment increments x_i - x_{i-1}, shape (L, d)."""
        return np.diff(self.points, axis=0)

    def one_variation(self) -> float:
        """Total variation of the piecewise-linear interpolation."""
        return float(np.sum(np.linalg.norm(self.increments(), axis=1)))

    def __len__(self) -> int:
        return self.points.shape[0]

    def __repr__(self) -> str:
        return f"Sequence(L={self.num_segments}, dim={self.dim})"


def as_sequence(obj: "Sequence | np.ndarray | PySequence") -> Sequence:
    """Coerce an (L+1, d) array-like into a Sequence (no-op for Sequence)."""
    if isinstance(obj, Sequence):
        return obj
    return Sequence(np.asarray(obj, dtype=np.float64))


@dataclass(frozen=True, eq=False)
class Dataset:
    """A list of sequences with unique string ids and a shared dimension."""

    sequences: tuple[Sequence, ...]
    ids: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        seqs = tuple(as_sequence(s) for s in self.sequences)
        ids = tuple(self.ids) if self.ids else tuple(str(i) for i in range(len(seqs)))
        object.__setattr__(self, "sequences", seqs)
        object.__setattr__(self, "ids", ids)
        if not seqs:
            raise DataError("dataset is empty")
        if len(ids) != len(seqs):
            raise DataError(f"{len(ids)} ids for {len(seqs)} sequences")
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise DataError(f"duplicate sequence ids: {dupes}")
        dims = {s.dim for s in seqs}
        if len(dims) != 1:
            raise DataError(f"sequences have mixed dimensions: {sorted(dims)}")

    @property
    def dim(self) -> int:
        return self.sequences[0].dim

    def __len__(self) -> int:
        return len(self.sequences)

    def __iter__(self) -> Iterator[Sequence]:
        return iter(self.sequences)

    def map(self, fn) -> "Dataset":
        """Apply a Sequence -> Sequence transform to every member."""
        return Dataset(tuple(fn(s) for s in self.sequences), self.ids)

    def __repr__(self) -> str:
        return f"Dataset(n={len(self)}, dim={self.dim})"


def from_arrays(arrays: Iterable[np.ndarray], ids: Iterable[str] | None = None) -> Dataset:
    seqs = tuple(as_sequence(a) for a in arrays)
    return Dataset(seqs, tuple(ids) if ids is not None else ())
