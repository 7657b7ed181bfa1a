"""Truncated signature kernels: exact evaluation and what the levels mean.

A sequence is compared to another through the iterated-integral features of
its piecewise-linear interpolation, lifted through a static kernel on the
state space.  The exact dynamic program returns one number per tensor degree;
their sum is the kernel value.
"""

import numpy as np

from sigkernels import Sequence, StaticKernelSpec, mon_kernel_horner, sig_kernel, sig_kernel_levels

rng = np.random.default_rng(0)

# Two short 2-d sequences (random walks).
x = Sequence(np.vstack([np.zeros(2), rng.normal(size=(6, 2)).cumsum(axis=0)]))
y = Sequence(np.vstack([np.zeros(2), rng.normal(size=(4, 2)).cumsum(axis=0)]))
print("x:", x, " y:", y)

# Per-degree contributions under an RBF static kernel.
spec = StaticKernelSpec("rbf", bandwidth=2.0)
levels = sig_kernel_levels(x, y, spec, level=6)
print("\nper-degree values (degree 0 is always 1):")
for m, v in enumerate(levels):
    print(f"  degree {m}: {v: .6e}")
print("kernel value:", sig_kernel(x, y, spec, 6))

# Degree weights rescale individual levels, e.g. to damp high degrees.
damped = sig_kernel(x, y, spec, 6, level_weights=[1, 1, 1, 0.5, 0.25, 0.125, 0.0625])
print("with damped high degrees:", damped)

# For single linear segments the kernel collapses to the monomial kernel
# sum_m k(v, w)^m / (m!)^2, which the Horner helper evaluates directly.
v, w = np.array([1.0, 0.0]), np.array([0.6, 0.8])
seg_v = Sequence(np.vstack([np.zeros(2), v]))
seg_w = Sequence(np.vstack([np.zeros(2), w]))
print("\nsingle segments:", sig_kernel(seg_v, seg_w, StaticKernelSpec("linear"), 8))
print("horner form:    ", mon_kernel_horner(StaticKernelSpec("linear"), v, w, 8))
