"""Finite-difference eigenvalues of the fiber operators.

The operator -u'' + V u is discretized with the 3-point scheme on a uniform
grid that contains x = 0 (where the field jumps), giving a symmetric
tridiagonal matrix.  Its lowest eigenvalues are located by Sturm-sequence
bisection; one Richardson step combines grids h and h/2.

This module shares no code with the special-function path and serves as
the reference for every secular-equation result.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import _kernels as K
from .errors import DomainError, TruncationInadequate
from .model import CaseTag, MagneticStep, effective_potential

DEFAULT_H = 2e-3
BISECT_TOL = 1e-12
MAX_COUNT = 12
DELTA_ESS = 1e-3
MASS_FRACTION = 0.99

FULL = "full"
NEUMANN = "neumann"
DIRICHLET = "dirichlet"


@dataclass(frozen=True)
class FiberDiscretization:
    """Uniform grid on [x_lo, x_hi] with Dirichlet ends.

    ``boundary`` is FULL for the whole line, or NEUMANN / DIRICHLET for the
    half-line [0, x_hi] with that condition at 0.  ``flat_left`` marks a
    left end sitting on a constant plateau (the wall), where the endpoint
    test does not apply.
    """

    x_lo: float
    x_hi: float
    h: float
    lambda_max: float
    potential_fn: Callable = field(repr=False, compare=False)
    boundary: str = FULL
    flat_left: bool = False

    def __post_init__(self):
        if not (self.h > 0):
            raise DomainError("grid step must be positive")
        if self.boundary == FULL and not (self.x_lo < 0 < self.x_hi):
            raise DomainError("full-line domain must contain 0 in its interior")
        if self.boundary != FULL and self.x_lo != 0.0:
            raise DomainError("half-line domains start at 0")
        # snap ends outward so that 0 is a grid node
        object.__setattr__(self, "x_lo", -self.h * math.ceil(-self.x_lo / self.h - 1e-9))
        object.__setattr__(self, "x_hi", self.h * math.ceil(self.x_hi / self.h - 1e-9))

    @property
    def n_cells(self) -> int:
        return int(round((self.x_hi - self.x_lo) / self.h))

    @property
    def x(self) -> np.ndarray:
        """Grid nodes carrying unknowns."""
        n = self.n_cells
        i0 = 0 if self.boundary == NEUMANN else 1
        return self.x_lo + self.h * np.arange(i0, n)

    @property
    def potential(self) -> np.ndarray:
        return np.asarray(self.potential_fn(self.x), dtype=float)

    def refined(self, factor: int = 2) -> FiberDiscretization:
        return replace(self, h=self.h / factor)

    def check_truncation(self, level: Optional[float] = None) -> None:
        level = self.lambda_max if level is None else level
        ends = [self.x_hi]
        if self.boundary == FULL and not self.flat_left:
            ends.append(self.x_lo)
        for xe in ends:
            v = float(self.potential_fn(np.array([xe]))[0])
            if v < 2.0 * level:
                raise TruncationInadequate(
                    f"V({xe:g}) = {v:.4g} < 2*{level:.4g}; enlarge the domain")


@dataclass(frozen=True)
class OracleResult:
    eigenvalues: np.ndarray
    h_used: float
    extrapolated: bool
    error_estimate: float
    errors: Optional[np.ndarray] = None

    def __len__(self):
        return len(self.eigenvalues)


def _width(lambda_max: float) -> float:
    return 8.0 * max(1.0, math.sqrt(max(lambda_max, 0.0)))


def full_line(step: MagneticStep, k: float, lambda_max: float, h: float = DEFAULT_H,
              x_lo: Optional[float] = None, x_hi: Optional[float] = None) -> FiberDiscretization:
    """Default full-line grid enclosing both wells and their decay tails."""
    b1 = float(step.b1)
    w = _width(lambda_max)
    flat = step.case_tag is CaseTag.WALL
    if x_lo is None:
        if flat:
            x_lo = -max(20.0, w)
        else:
            x_lo = min(k / b1, 0.0) - w / math.sqrt(abs(b1))
    if x_hi is None:
        x_hi = max(k, 0.0) + w
    return FiberDiscretization(x_lo, x_hi, h, lambda_max,
                               lambda x: effective_potential(step, x, k), FULL, flat)


def half_line(bc: str, k: float, lambda_max: float, h: float = DEFAULT_H,
              x_hi: Optional[float] = None) -> FiberDiscretization:
    """Grid for the de Gennes operator -u'' + (t - k)^2 u on [0, x_hi]."""
    if bc not in (NEUMANN, DIRICHLET):
        raise DomainError(f"unknown boundary condition {bc!r}")
    if x_hi is None:
        x_hi = max(k, 0.0) + _width(lambda_max)
    return FiberDiscretization(0.0, x_hi, h, lambda_max, lambda t: (t - k) ** 2, bc)


def assemble(disc: FiberDiscretization) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal and squared off-diagonal of the symmetric FD matrix."""
    h2 = disc.h * disc.h
    diag = 2.0 / h2 + disc.potential
    off2 = np.full(diag.size - 1, 1.0 / (h2 * h2))
    if disc.boundary == NEUMANN:
        # ghost node u_{-1} = u_1; rescaling u_0 by sqrt(2) symmetrizes the first row
        off2[0] = 2.0 / (h2 * h2)
    return diag, off2


def _lowest(diag: np.ndarray, off2: np.ndarray, count: int) -> np.ndarray:
    # Gershgorin lower bound
    lo = float(diag.min()) - 2.0 * math.sqrt(float(off2.max()))
    hi = 1.0
    while K.sturm_count(diag, off2, hi) < count:
        hi *= 2.0
    return K.bisect_eigenvalues(diag, off2, count, lo, hi, BISECT_TOL)


def eigenvalues_on(disc: FiberDiscretization, count: int) -> np.ndarray:
    """Lowest ``count`` eigenvalues on one grid, no extrapolation."""
    diag, off2 = assemble(disc)
    return _lowest(diag, off2, count)


def count_below(disc: FiberDiscretization, level: float) -> int:
    diag, off2 = assemble(disc)
    return int(K.sturm_count(diag, off2, level))


def _richardson(disc: FiberDiscretization, count: int, extrapolate: bool) -> OracleResult:
    lam_h = eigenvalues_on(disc, count)
    if not extrapolate:
        return OracleResult(lam_h, disc.h, False, float("nan"))
    lam_h2 = eigenvalues_on(disc.refined(), count)
    err = np.abs(lam_h - lam_h2) / 3.0
    lam = (4.0 * lam_h2 - lam_h) / 3.0
    return OracleResult(lam, disc.h / 2, True, float(err.max()) if err.size else 0.0, err)


def _guess_lambda_max(step: MagneticStep, k: float, count: int) -> float:
    level = 2.0 * count + 1.0
    for _ in range(8):
        coarse = full_line(step, k, level, h=0.02)
        lam = eigenvalues_on(coarse, count)
        if lam[-1] < level / 1.5:
            return max(level, 1.25 * lam[-1] + 0.5)
        level = 2.0 * lam[-1] + 1.0
    return level


def fd_eigenvalues(step: MagneticStep, k: float, count: int,
                   disc: Optional[FiberDiscretization] = None,
                   extrapolate: bool = True) -> OracleResult:
    """Lowest ``count`` eigenvalues of h_b(k) on the full line."""
    if not 1 <= count <= MAX_COUNT:
        raise DomainError(f"count must be in 1..{MAX_COUNT}")
    if step.case_tag is CaseTag.ZERO_FIELD:
        raise DomainError("zero field has no discrete spectrum")
    if disc is None:
        disc = full_line(step, k, _guess_lambda_max(step, k, count))
    disc.check_truncation()
    res = _richardson(disc, count, extrapolate)
    disc.check_truncation(float(res.eigenvalues[-1]))
    return res


def halfline_eigenvalues(bc: str, k: float, count: int,
                         disc: Optional[FiberDiscretization] = None,
                         extrapolate: bool = True) -> OracleResult:
    """Lowest eigenvalues of the Neumann or Dirichlet de Gennes operator."""
    if not 1 <= count <= MAX_COUNT:
        raise DomainError(f"count must be in 1..{MAX_COUNT}")
    if disc is None:
        level = max(4.0 * count + 1.0, 1.5 * k * k if k < 0 else 0.0)
        disc = half_line(bc, k, level)
    disc.check_truncation()
    res = _richardson(disc, count, extrapolate)
    disc.check_truncation(float(res.eigenvalues[-1]))
    return res


def eigenvectors(disc: FiberDiscretization, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Lowest eigenpairs on one grid (values, vectors as columns)."""
    diag, off2 = assemble(disc)
    off = -np.sqrt(off2)
    return eigh_tridiagonal(diag, off, select="i", select_range=(0, count - 1))


def _wall_filtered(disc: FiberDiscretization, k: float, count: int) -> np.ndarray:
    top = k * k - DELTA_ESS
    diag, off2 = assemble(disc)
    n_below = int(K.sturm_count(diag, off2, top))
    if n_below == 0:
        return np.empty(0)
    vals, vecs = eigh_tridiagonal(diag, -np.sqrt(off2), select="i",
                                  select_range=(0, n_below - 1))
    inner = disc.x > 0.5 * disc.x_lo
    mass = (vecs[inner] ** 2).sum(axis=0) / (vecs ** 2).sum(axis=0)
    keep = np.flatnonzero(mass >= MASS_FRACTION)[:count]
    lam = _lowest(diag, off2, int(keep.max()) + 1) if keep.size else np.empty(0)
    return lam[keep]


def wall_discrete_spectrum(k: float, count: int = MAX_COUNT,
                           disc: Optional[FiberDiscretization] = None,
                           extrapolate: bool = True) -> OracleResult:
    """Wall eigenvalues below the essential spectrum [k^2, inf).

    Eigenvalues closer than DELTA_ESS to k^2, and eigenvectors with more than
    1% of their mass on the outer half of the plateau (discretized continuum),
    are discarded.
    """
    if k <= 0:
        raise DomainError("the wall has no discrete spectrum for k <= 0")
    if disc is None:
        disc = full_line(MagneticStep(0), k, k * k)
    lam_h = _wall_filtered(disc, k, count)
    if not extrapolate:
        return OracleResult(lam_h, disc.h, False, float("nan"))
    lam_h2 = _wall_filtered(disc.refined(), k, count)
    n = min(lam_h.size, lam_h2.size)
    lam_h, lam_h2 = lam_h[:n], lam_h2[:n]
    err = np.abs(lam_h - lam_h2) / 3.0
    return OracleResult((4.0 * lam_h2 - lam_h) / 3.0, disc.h / 2, True,
                        float(err.max()) if n else 0.0, err)


def convergence_ratio(disc: FiberDiscretization, count: int) -> np.ndarray:
    """|lam_h - lam_{h/2}| / |lam_{h/2} - lam_{h/4}|, about 4 for a second-order scheme."""
    l1 = eigenvalues_on(disc, count)
    l2 = eigenvalues_on(disc.refined(2), count)
    l4 = eigenvalues_on(disc.refined(4), count)
    return np.abs(l1 - l2) / np.abs(l2 - l4)
