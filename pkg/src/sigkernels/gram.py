"""Gram matrices over sequence datasets, Nystrom approximation, serialization.

Pair evaluations are grouped by sequence-length bucket and processed in
fixed-size batches through the vectorized level computation, so a Gram build
costs one batched dynamic program per chunk instead of one Python call per
entry.  Chunk boundaries and per-pair arithmetic are independent of the
worker count, which keeps results bit-identical under any parallelism.  The
Nystrom blocks evaluate every pair in the same orientation as the exact Gram
(lower index on the left), so they agree with it entry-for-entry.
"""

from __future__ import annotations

import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .config import KernelConfig
from .errors import ConfigError, DataError
from .normalization import combine_normalized, normalization_root
from .pde import sig_kernel_pde
from .sequences import Dataset, Sequence, as_sequence
from .static_kernels import increment_matrix_batch
from .truncated import LevelValues, levels_from_increments

__all__ = [
    "GramMatrix",
    "LowRankFactor",
    "kernel_levels",
    "kernel_value",
    "gram",
    "cross_gram",
    "nystrom",
    "reconstruct",
    "min_eigenvalue",
    "save_gram_csv",
    "load_gram_csv",
    "save_gram_binary",
    "load_gram_binary",
]

# Pairs per batched DP call; fixed so results never depend on scheduling.
_CHUNK_PAIRS = 256

GRAM_MAGIC = b"SIGGRAM1"


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """Symmetric kernel matrix over a dataset plus its configuration fingerprint."""

    values: np.ndarray
    ids: tuple[str, ...]
    config: dict

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 2 or vals.shape[0] != vals.shape[1]:
            raise DataError(f"gram values must be square, got shape {vals.shape}")
        if len(self.ids) != vals.shape[0]:
            raise DataError(f"{len(self.ids)} ids for a {vals.shape[0]}x{vals.shape[0]} matrix")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class LowRankFactor:
    """Nystrom factor: cross block C (n x r), landmark block W (r x r)."""

    C: np.ndarray
    W: np.ndarray
    landmarks: tuple[int, ...]
    rank: int


def _weights(cfg: KernelConfig) -> np.ndarray:
    if cfg.level_weights is not None:
        return np.asarray(cfg.level_weights, dtype=np.float64)
    return np.ones(cfg.level + 1)


def kernel_levels(x: Sequence, y: Sequence, cfg: KernelConfig) -> LevelValues:
    """Per-degree values under a dp configuration (weights applied)."""
    if cfg.method != "dp":
        raise ConfigError("per-level values are only defined for method = dp")
    x, y = as_sequence(x), as_sequence(y)
    nabla = increment_matrix_batch(cfg.static_spec(), x.points[None], y.points[None])
    values = levels_from_increments(nabla, cfg.level)[0] * _weights(cfg)
    return LevelValues(values)


def kernel_value(x: Sequence, y: Sequence, cfg: KernelConfig) -> float:
    """One kernel evaluation under a full configuration (dp, pde, or robust)."""
    x, y = as_sequence(x), as_sequence(y)
    if cfg.method == "pde":
        return sig_kernel_pde(x, y, cfg.static_spec(), cfg.dyadic_order)
    cross = kernel_levels(x, y, cfg)
    if not cfg.normalize:
        return cross.total()
    params = cfg.norm_params()
    theta_x = normalization_root(kernel_levels(x, x, cfg), params)
    theta_y = normalization_root(kernel_levels(y, y, cfg), params)
    return combine_normalized(cross.values, theta_x, theta_y)


def _as_sequences(data: Dataset | Iterable) -> tuple[tuple[Sequence, ...], tuple[str, ...]]:
    if isinstance(data, Dataset):
        return data.sequences, data.ids
    seqs = tuple(as_sequence(s) for s in data)
    if not seqs:
        raise DataError("empty dataset")
    dims = {s.dim for s in seqs}
    if len(dims) != 1:
        raise DataError(f"sequences have mixed dimensions: {sorted(dims)}")
    return seqs, tuple(str(i) for i in range(len(seqs)))


def _run_tasks(tasks: list, workers: int) -> None:
    if workers <= 1 or len(tasks) <= 1:
        for task in tasks:
            task()
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for fut in [pool.submit(t) for t in tasks]:
                fut.result()


def _pair_values(
    pairs: list[tuple[int, int]],
    seqs_x: tuple[Sequence, ...],
    seqs_y: tuple[Sequence, ...],
    cfg: KernelConfig,
    workers: int,
    chunk_pairs: int,
    thetas_x: np.ndarray | None = None,
    thetas_y: np.ndarray | None = None,
) -> np.ndarray:
    """Kernel values for index pairs (i, j) into seqs_x x seqs_y, in pair order."""
    out = np.empty(len(pairs))
    if cfg.method == "pde":
        spec = cfg.static_spec()
        items = list(enumerate(pairs))
        chunks = [items[k : k + 64] for k in range(0, len(items), 64)]

        def make_pde_task(chunk):
            def task():
                for pos, (i, j) in chunk:
                    out[pos] = sig_kernel_pde(seqs_x[i], seqs_y[j], spec, cfg.dyadic_order)

            return task

        _run_tasks([make_pde_task(c) for c in chunks], workers)
        return out

    w = _weights(cfg)
    buckets: dict[tuple[int, int], list[tuple[int, tuple[int, int]]]] = {}
    for pos, (i, j) in enumerate(pairs):
        buckets.setdefault((len(seqs_x[i]), len(seqs_y[j])), []).append((pos, (i, j)))
    chunks = []
    for key in sorted(buckets):
        items = buckets[key]
        chunks.extend(items[k : k + chunk_pairs] for k in range(0, len(items), chunk_pairs))

    def make_task(chunk):
        def task():
            X = np.stack([seqs_x[i].points for _, (i, _) in chunk])
            Y = np.stack([seqs_y[j].points for _, (_, j) in chunk])
            nabla = increment_matrix_batch(cfg.static_spec(), X, Y)
            levels = levels_from_increments(nabla, cfg.level) * w
            if thetas_x is not None:
                prod = np.array([thetas_x[i] * thetas_y[j] for _, (i, j) in chunk])
                levels = levels * prod[:, None] ** np.arange(cfg.level + 1)
            vals = levels.sum(axis=1)
            for row, (pos, _) in enumerate(chunk):
                out[pos] = vals[row]

        return task

    _run_tasks([make_task(c) for c in chunks], workers)
    return out


def _normalization_thetas(
    seqs: tuple[Sequence, ...], cfg: KernelConfig, workers: int, chunk_pairs: int
) -> np.ndarray:
    params = cfg.norm_params()
    w = _weights(cfg)
    diag_levels = np.empty((len(seqs), cfg.level + 1))
    items = [(i, (i, i)) for i in range(len(seqs))]
    buckets: dict[int, list] = {}
    for item in items:
        buckets.setdefault(len(seqs[item[0]]), []).append(item)
    chunks = []
    for key in sorted(buckets):
        bucket = buckets[key]
        chunks.extend(bucket[k : k + chunk_pairs] for k in range(0, len(bucket), chunk_pairs))

    def make_task(chunk):
        def task():
            X = np.stack([seqs[i].points for i, _ in chunk])
            nabla = increment_matrix_batch(cfg.static_spec(), X, X)
            levels = levels_from_increments(nabla, cfg.level) * w
            for row, (i, _) in enumerate(chunk):
                diag_levels[i] = levels[row]

        return task

    _run_tasks([make_task(c) for c in chunks], workers)
    return np.array([normalization_root(diag_levels[i], params) for i in range(len(seqs))])


def gram(
    data: Dataset | Iterable,
    cfg: KernelConfig,
    workers: int = 1,
    chunk_pairs: int = _CHUNK_PAIRS,
) -> GramMatrix:
    """Symmetric Gram matrix; only the upper triangle is computed, then mirrored."""
    seqs, ids = _as_sequences(data)
    n = len(seqs)
    thetas = _normalization_thetas(seqs, cfg, workers, chunk_pairs) if cfg.normalize else None
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    vals = _pair_values(pairs, seqs, seqs, cfg, workers, chunk_pairs, thetas, thetas)
    out = np.empty((n, n))
    for (i, j), v in zip(pairs, vals):
        out[i, j] = v
        out[j, i] = v
    return GramMatrix(out, ids, cfg.to_dict())


def cross_gram(
    data_x: Dataset | Iterable,
    data_y: Dataset | Iterable,
    cfg: KernelConfig,
    workers: int = 1,
    chunk_pairs: int = _CHUNK_PAIRS,
) -> np.ndarray:
    """Rectangular kernel block between two sequence collections."""
    seqs_x, _ = _as_sequences(data_x)
    seqs_y, _ = _as_sequences(data_y)
    tx = ty = None
    if cfg.normalize:
        tx = _normalization_thetas(seqs_x, cfg, workers, chunk_pairs)
        ty = _normalization_thetas(seqs_y, cfg, workers, chunk_pairs)
    pairs = [(i, j) for i in range(len(seqs_x)) for j in range(len(seqs_y))]
    vals = _pair_values(pairs, seqs_x, seqs_y, cfg, workers, chunk_pairs, tx, ty)
    return vals.reshape(len(seqs_x), len(seqs_y))


def nystrom(
    data: Dataset | Iterable,
    cfg: KernelConfig,
    rank: int,
    seed: int = 0,
    workers: int = 1,
    chunk_pairs: int = _CHUNK_PAIRS,
) -> LowRankFactor:
    """Low-rank Gram surrogate from a uniformly sampled landmark subset.

    Landmarks are drawn without replacement by a seeded generator; the blocks
    are filled by kernel evaluation in exact-Gram orientation, so W is the
    (J, J) submatrix and C the (:, J) columns of the exact Gram.
    """
    seqs, _ = _as_sequences(data)
    n = len(seqs)
    if not 1 <= rank <= n:
        raise ConfigError(f"nystrom rank must be in [1, {n}], got {rank}")
    rng = np.random.default_rng(seed)
    landmarks = tuple(int(i) for i in rng.choice(n, size=rank, replace=False))
    thetas = _normalization_thetas(seqs, cfg, workers, chunk_pairs) if cfg.normalize else None
    # Evaluate each (row, landmark) pair with the lower index on the left,
    # matching the upper-triangle orientation used by gram().
    pairs = [(min(i, j), max(i, j)) for i in range(n) for j in landmarks]
    vals = _pair_values(pairs, seqs, seqs, cfg, workers, chunk_pairs, thetas, thetas)
    C = vals.reshape(n, rank)
    W = C[list(landmarks), :]
    return LowRankFactor(C=C, W=W, landmarks=landmarks, rank=rank)


def reconstruct(factor: LowRankFactor, pinv_rel_tol: float = 1e-10) -> np.ndarray:
    """Reconstructed Gram approximation C pinv(W) C^T.

    The pseudo-inverse truncates eigenvalues of W below pinv_rel_tol times
    the largest one; uniform landmark sampling can pick near-duplicate
    sequences, which makes W nearly singular.
    """
    lam, Q = np.linalg.eigh(0.5 * (factor.W + factor.W.T))
    lam_max = float(lam[-1])
    inv = np.zeros_like(lam)
    keep = lam > pinv_rel_tol * max(lam_max, 0.0)
    inv[keep] = 1.0 / lam[keep]
    B = factor.C @ Q
    G = (B * inv) @ B.T
    return 0.5 * (G + G.T)


def min_eigenvalue(values: np.ndarray, sym_tol: float = 1e-9) -> float:
    """Smallest eigenvalue of a symmetric matrix (positive-definiteness check)."""
    G = np.asarray(values, dtype=np.float64)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise DataError(f"expected a square matrix, got shape {G.shape}")
    scale = max(1.0, float(np.max(np.abs(G)))) if G.size else 1.0
    if float(np.max(np.abs(G - G.T))) > sym_tol * scale:
        raise DataError("matrix is asymmetric beyond tolerance")
    return float(np.linalg.eigvalsh(0.5 * (G + G.T))[0])


def save_gram_csv(path: str | Path, matrix: GramMatrix) -> None:
    """CSV with a header row of sequence ids and repr-precision float cells."""
    lines = [",".join(matrix.ids)]
    for row in matrix.values:
        lines.append(",".join(repr(float(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def load_gram_csv(path: str | Path) -> tuple[np.ndarray, tuple[str, ...]]:
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise DataError(f"{path}: empty gram file")
    ids = tuple(lines[0].split(","))
    try:
        values = np.array([[float(c) for c in ln.split(",")] for ln in lines[1:]])
    except ValueError as exc:
        raise DataError(f"{path}: non-numeric cell: {exc}") from exc
    if values.shape != (len(ids), len(ids)):
        raise DataError(f"{path}: expected a {len(ids)}x{len(ids)} matrix, got {values.shape}")
    return values, ids


def save_gram_binary(path: str | Path, matrix: GramMatrix) -> None:
    """16-byte header (8-byte magic, little-endian uint64 n) + row-major float64."""
    header = GRAM_MAGIC + struct.pack("<Q", matrix.n)
    Path(path).write_bytes(header + matrix.values.astype("<f8").tobytes(order="C"))


def load_gram_binary(path: str | Path) -> np.ndarray:
    blob = Path(path).read_bytes()
    if len(blob) < 16 or blob[:8] != GRAM_MAGIC:
        raise DataError(f"{path}: not a gram binary (bad magic)")
    (n,) = struct.unpack("<Q", blob[8:16])
    expected = 16 + 8 * n * n
    if len(blob) != expected:
        raise DataError(f"{path}: expected {expected} bytes for n={n}, got {len(blob)}")
    return np.frombuffer(blob[16:], dtype="<f8").reshape(n, n).copy()
