# %% [markdown]
# # Secular roots against the finite-difference oracle
#
# The secular engine finds eigenvalues as zeros of a 2x2 matching
# determinant built from Weber functions.  The oracle diagonalizes a
# Richardson-extrapolated second-order discretization.  The two share no
# code beyond the potential.

# %%
import time
from fractions import Fraction

import numpy as np

from magbands import oracle
from magbands.model import MagneticStep, exact_ratio
from magbands.secular import Kind, SecularEquation, eigenvalues_at

t0 = time.perf_counter()
for b in (Fraction(1, 3), Fraction(1, 2), 0.7, Fraction(1)):
    step = MagneticStep(-exact_ratio(b))
    worst = 0.0
    for k in (-1.0, 0.0, 1.0, 2.0, 4.0):
        sec = eigenvalues_at(SecularEquation(Kind.TRAPPING, k, b), count=6, verify=True).values
        fd = oracle.fd_eigenvalues(step, k, 6).eigenvalues
        worst = max(worst, np.max(np.abs(sec - fd)))
    print(f"b = {str(b):>4s}: max |secular - oracle| = {worst:.2e}")
print(f"{time.perf_counter() - t0:.1f} s")

# %% [markdown]
# ## Convergence order of the oracle
#
# Halving h should divide the error by 4.

# %%
from magbands.model import effective_potential

disc = oracle.FiberDiscretization(-10.0, 10.0, 0.02, 8.0,
                                  lambda x: effective_potential(MagneticStep(Fraction(1)), x, 0.5))
print("error ratios:", oracle.convergence_ratio(disc, 4))
