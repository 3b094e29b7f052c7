# %% [markdown]
# # Band functions of a magnetic step
#
# Samples the lowest band functions for the trapping step (-1/3, 1), the
# symmetric step (-1, 1) and the magnetic wall (0, 1) with the secular
# engine, and writes one SVG per case into `out/`.

# %%
from fractions import Fraction
from pathlib import Path

import numpy as np

from magbands import export, tracker
from magbands.model import MagneticStep

OUT = Path(__file__).resolve().parent / "out"
OUT.mkdir(exist_ok=True)

# %% [markdown]
# ## Trapping step b = 1/3
#
# Bands blow up as k -> -inf and flatten onto the thresholds 1/3, 1, 1, 5/3,
# 7/3, 3 as k -> +inf.  Bands 2 and 3 share the limit 1.

# %%
ks = np.linspace(-2.0, 6.0, 161)
trap = MagneticStep(Fraction(-1, 3))
curves = tracker.sample_bands(trap, ks, 6)
for c in curves:
    m = tracker.find_minima(c)
    print(c.band_index, "min" if m else "   ", m[0] if m else "", f"lam(6) = {c.lam[-1]:.6f}")

# %%
series = [(ks, c.lam, f"band {c.band_index}", False) for c in curves]
levels = [1 / 3, 1, 5 / 3, 7 / 3, 3]
series += [(ks, np.full_like(ks, v), f"{v:.3g}", True) for v in levels]
export.svg_plot(OUT / "bands_trapping.svg", series, "k", "lambda")

# %% [markdown]
# ## Symmetric step and magnetic wall
#
# For (-1, 1) the band functions alternate between the Neumann and
# Dirichlet de Gennes curves.  For (0, 1) band n exists only for
# k > xi_{n-1} and stays below k^2.

# %%
sym = tracker.sample_bands(MagneticStep(Fraction(-1)), np.linspace(-1, 5, 121), 6)
export.svg_plot(OUT / "bands_symmetric.svg",
                [(c.k, c.lam, f"band {c.band_index}", False) for c in sym], "k", "lambda")

kw = np.linspace(0.1, 6.0, 119)
wall = tracker.sample_bands(MagneticStep(Fraction(0)), kw, 4)
series = [(kw, c.lam, f"band {c.band_index}", False) for c in wall]
series.append((kw, kw ** 2, "k^2", True))
export.svg_plot(OUT / "bands_wall.svg", series, "k", "lambda")
print("wrote", sorted(p.name for p in OUT.glob("bands_*.svg")))
