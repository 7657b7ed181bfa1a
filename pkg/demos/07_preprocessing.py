"""Sequence preprocessing and why the time channel matters.

The kernel is invariant to reparametrization: traversing the same image at a
different speed leaves it unchanged.  Adding an explicit time coordinate
removes that invariance when the application should distinguish speeds.
Lead-lag, subsampling and standardization round out the usual pipeline.
"""

import numpy as np

from sigkernels import (
    Dataset,
    Sequence,
    StaticKernelSpec,
    add_time,
    lead_lag,
    sig_kernel,
    standardize,
    subsample,
)

linear = StaticKernelSpec("linear")

# Same straight line, two parametrizations: kernels agree...
fast = Sequence([[0.0], [1.0]])
slow = Sequence([[0.0], [0.1], [1.0]])  # dawdles early, then rushes
print("without time channel:")
print("  k(fast, fast) =", sig_kernel(fast, fast, linear, 4))
print("  k(slow, slow) =", sig_kernel(slow, slow, linear, 4))

# ... until the time coordinate pins the speed profile.
print("with time channel:")
print("  k(fast, fast) =", sig_kernel(add_time(fast, 1.0), add_time(fast, 1.0), linear, 4))
print("  k(slow, slow) =", sig_kernel(add_time(slow, 1.0), add_time(slow, 1.0), linear, 4))

# Lead-lag doubles the dimension and interleaves a lagged copy.
x = Sequence(np.arange(4, dtype=float)[:, None])
print("\nlead-lag of [0, 1, 2, 3]:")
print(lead_lag(x).points)

# Subsampling keeps every k-th point plus the endpoint.
y = Sequence(np.arange(7, dtype=float)[:, None])
print("\nsubsample stride 3 of 7 points:", subsample(y, 3).points[:, 0])

# Standardization pools every point of every sequence, per coordinate.
rng = np.random.default_rng(1)
ds = Dataset(tuple(Sequence(rng.normal(loc=5.0, scale=3.0, size=(6, 2))) for _ in range(4)))
std, stats = standardize(ds)
print("\nstandardize: mean ->", stats.mean.round(3), " std ->", stats.std.round(3))
pooled = np.concatenate([s.points for s in std.sequences])
print("pooled mean after:", pooled.mean(axis=0).round(12), " std:", pooled.std(axis=0).round(12))
