"""Signature kernels for sequential data.

Core surface:

- sequences / datasets: `Sequence`, `Dataset`, loaders in `io`
- static kernels and increment matrices: `StaticKernelSpec`, `increment_matrix`
- exact truncated kernel (dynamic program): `sig_kernel`, `sig_kernel_levels`
- untruncated kernel (Goursat PDE): `sig_kernel_pde`, `refine_until`
- robust normalization: `robust_sig_kernel`, `NormalizationParams`
- Gram matrices and Nystrom approximation: `gram`, `nystrom`, `min_eigenvalue`
- two-sample testing: `mmd2`, `permutation_test`, `sup_mmd`
- brute-force tensor oracle for validation: `sigkernels.tensors`
"""

from .config import KernelConfig, PreprocessConfig, RunConfig
from .errors import ConfigError, DataError, NumericalGuardError, SigKernelsError
from .gram import (
    GramMatrix,
    LowRankFactor,
    cross_gram,
    gram,
    kernel_levels,
    kernel_value,
    min_eigenvalue,
    nystrom,
    reconstruct,
)
from .io import load_csv_dir, load_dataset, load_jsonl, save_jsonl
from .mmd import SampleSet, TestResult, mmd2, permutation_test, sup_mmd
from .normalization import NormalizationParams, normalization_root, psi, robust_sig_kernel
from .pde import PdeGrid, RefineResult, refine_until, sig_kernel_pde, solve_pde_grid
from .preprocess import add_time, apply_pipeline, lead_lag, standardize, subsample
from .sequences import Dataset, Sequence, as_sequence
from .static_kernels import StaticKernelSpec, increment_matrix, kernel_eval
from .truncated import LevelValues, mon_kernel_horner, sig_kernel, sig_kernel_levels

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DataError",
    "Dataset",
    "GramMatrix",
    "KernelConfig",
    "LevelValues",
    "LowRankFactor",
    "NormalizationParams",
    "NumericalGuardError",
    "PdeGrid",
    "PreprocessConfig",
    "RefineResult",
    "RunConfig",
    "SampleSet",
    "Sequence",
    "SigKernelsError",
    "StaticKernelSpec",
    "TestResult",
    "add_time",
    "apply_pipeline",
    "as_sequence",
    "cross_gram",
    "gram",
    "increment_matrix",
    "kernel_eval",
    "kernel_levels",
    "kernel_value",
    "lead_lag",
    "load_csv_dir",
    "load_dataset",
    "load_jsonl",
    "min_eigenvalue",
    "mmd2",
    "mon_kernel_horner",
    "normalization_root",
    "nystrom",
    "permutation_test",
    "psi",
    "reconstruct",
    "refine_until",
    "robust_sig_kernel",
    "save_jsonl",
    "sig_kernel",
    "sig_kernel_levels",
    "sig_kernel_pde",
    "solve_pde_grid",
    "standardize",
    "subsample",
    "sup_mmd",
]
