"""
The bilateral Dirichlet-to-Neumann operator on a flat torus
===========================================================

Cut the torus (R/2piZ)^2 along the circle Z = {y = 0}.  A function f on Z
has a harmonic extension that agrees with f from both sides; DN f collects
the jump of the normal derivatives.  On Fourier modes it is diagonal with
eigenvalue 2|n| tanh(pi |n|), which is 2|n| up to an exponentially small
correction.
"""

import numpy as np

from bilateral import CircleField, TorusGrid, dirichlet_to_neumann
from bilateral.torus import dn_multiplier
from bilateral.torus import extend, harmonic_extension, laplacian, laplace_quasi_inverse, trace
from bilateral.verify import verify_theorem2

n = np.arange(0, 11)
lam = dn_multiplier(n)
print(" n        DN(n)          DN(n)/(2n) - 1")
for k, v in zip(n, lam):
    ratio = v / (2 * k) - 1 if k else float("nan")
    print(f"{k:2d}  {v:16.12f}   {ratio: .3e}")

# %%
# The harmonic extension of exp(i n z) is cosh(n (y - pi)) / cosh(n pi),
# written in the torus Fourier basis.  Its Laplacian is a layer on Z whose
# density is exactly DN f.
grid = TorusGrid(64, 64)
f = CircleField.mode(grid.Nz, 3)
F = harmonic_extension(f, grid)
residual = laplacian(F) - extend(dirichlet_to_neumann(f), grid)
print("max coefficient residual:", np.abs(residual.coeffs).max())

# %%
# The single-layer operator B = T Lap^-1 E is the inverse of DN.  On the
# grid the y-frequencies are truncated, which shows up as an error of
# order n / N_y.
grid = TorusGrid(256, 256)
for k in (1, 4, 16, 64):
    B = trace(laplace_quasi_inverse(extend(CircleField.mode(256, k), grid))).coeff(k).real
    print(f"n = {k:2d}: B(n) DN(n) - 1 = {B * dn_multiplier(k) - 1: .3e}")

# %%
report = verify_theorem2()
print(report.summary())
