# %% [markdown]
# # Exponentially small gaps at large k
#
# Compares the measured distance of each band to its limit with the
# leading-order closed forms.  The gaps are far below double precision
# relative to the threshold, so they are read off the anchored roots
# (`Root.gap_to`) and divided in scaled arithmetic.

# %%
from fractions import Fraction
from pathlib import Path

import numpy as np

from magbands import export
from magbands.asymptotics import PRINTED, REDERIVED, gap_predictions
from magbands.scaled import ScaledValue
from magbands.secular import Kind, SecularEquation, eigenvalues_at

OUT = Path(__file__).resolve().parent / "out"
OUT.mkdir(exist_ok=True)
B = Fraction(1, 3)
KS = np.linspace(3.0, 9.0, 25)


def ratios(convention):
    preds = gap_predictions(B, 3.2, convention)
    table = np.full((KS.size, len(preds)), np.nan)
    for i, k in enumerate(KS):
        roots = eigenvalues_at(SecularEquation(Kind.TRAPPING, k, B), count=len(preds))
        for j, (p, r) in enumerate(zip(preds, roots)):
            gap = ScaledValue.from_float(r.gap_to(p.threshold.value))
            table[i, j] = float(gap / p(k))
    return preds, table


# %% [markdown]
# ## Ratios with the printed constants
#
# Unshared limits approach 1 like 1 + c/k^2.  At the shared limit 1 the
# ratios settle near 1/sqrt(2) (lower band) and sqrt(2) (upper band).

# %%
preds, printed = ratios(PRINTED)
for j, p in enumerate(preds):
    print(f"{p.threshold.label():16s} {p.kind.value:13s}", " ".join(f"{v:.4f}" for v in printed[::6, j]))

# %% [markdown]
# ## Ratios with the rederived split constants 2^(n-2), 2^(m+2)

# %%
_, rederived = ratios(REDERIVED)
for j, p in enumerate(preds):
    print(f"{p.threshold.label():16s} {p.kind.value:13s}", " ".join(f"{v:.4f}" for v in rederived[::6, j]))

# %%
series = [(KS, printed[:, j], f"{p.threshold.label()} {p.kind.value}", False) for j, p in enumerate(preds)]
series += [(KS, rederived[:, j], f"{p.kind.value} (rederived)", True)
           for j, p in enumerate(preds) if "Split" in p.kind.value]
export.svg_plot(OUT / "gap_ratios.svg", series, "k", "measured / predicted")
