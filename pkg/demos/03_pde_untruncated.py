"""The untruncated kernel via the Goursat PDE and its refinement behavior.

Restricting both sequences to prefixes defines a surface K(s, t) that solves
d2K/dsdt = nabla * K with unit boundary; the bottom-right value is the
untruncated kernel.  Refining the grid dyadically converges; the truncated
dynamic program at a high level provides an independent reference.
"""

import math

import numpy as np

from sigkernels import Sequence, StaticKernelSpec, refine_until, sig_kernel, sig_kernel_pde

linear = StaticKernelSpec("linear")

# For two aligned unit segments the untruncated value has a closed series:
# sum_m 1/(m!)^2  (= 2.2795853...)
series = sum(1.0 / math.factorial(m) ** 2 for m in range(40))
unit = Sequence([[0.0], [1.0]])
print(f"series value: {series:.10f}")
print("dyadic refinement of the PDE solution:")
for order in range(8):
    v = sig_kernel_pde(unit, unit, linear, order)
    print(f"  order {order}: {v:.10f}   error {abs(v - series):.3e}")

res = refine_until(unit, unit, linear, tol=1e-6)
print(f"refine_until(tol=1e-6): value {res.value:.10f} at order {res.order}, converged={res.converged}")

# Against the dynamic program: with small increments the truncation tail at
# M=12 is negligible, so PDE and DP must agree to scheme accuracy.
rng = np.random.default_rng(3)
x = Sequence(0.2 * rng.normal(size=(5, 2)).cumsum(axis=0))
y = Sequence(0.2 * rng.normal(size=(4, 2)).cumsum(axis=0))
dp12 = sig_kernel(x, y, linear, 12)
print("\nDP at M=12 :", dp12)
for order in (2, 4, 6, 8):
    print(f"PDE order {order}: {sig_kernel_pde(x, y, linear, order):.12f}")
