# %% [markdown]
# # Birth of wall bands
#
# For the field (0, 1) band n appears at k = xi_{n-1} with value
# Theta_{n-1} = xi_{n-1}^2, the n-th Neumann de Gennes minimum.  Right after
# birth k^2 - lambda_n(k) grows like d^2 with d = k - xi_{n-1}, so the root
# is tracked from d = 4e-4 and the birth value is extrapolated.

# %%
import numpy as np

from magbands.secular import Kind, SecularEquation, de_gennes_constants, eigenvalues_at

for n in range(1, 5):
    xi, theta = de_gennes_constants(n)
    ds = np.array([1.6e-3, 8e-4, 4e-4, 2e-4, 1e-4])
    lam = np.array([eigenvalues_at(SecularEquation(Kind.WALL, xi + d), lambda_max=(xi + d) ** 2)[n - 1].value
                    for d in ds])
    below = (xi + ds) ** 2 - lam
    c = np.polyfit(ds[-3:], lam[-3:], 2)[-1]
    print(f"n={n}  xi={xi:.8f}  Theta={theta:.8f}  extrapolated={c:.8f}  "
          f"(k^2-lam)/d^2 = {np.round(below / ds ** 2, 3)}")
